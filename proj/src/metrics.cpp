#include "fedsched/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fedsched {

namespace {

void append_g9(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out += buf;
}

}  // namespace

std::string metrics_to_csv(const std::vector<MetricsRecord>& records) {
    std::string out = "round,tau,K,loss,accuracy,cum_delay_s,cum_energy_J,seed\n";
    for (const auto& r : records) {
        out += std::to_string(r.round);
        out += ',';
        out += std::to_string(r.tau);
        out += ',';
        out += std::to_string(r.K);
        out += ',';
        append_g9(out, r.loss);
        out += ',';
        append_g9(out, r.accuracy);
        out += ',';
        append_g9(out, r.cum_delay_s);
        out += ',';
        append_g9(out, r.cum_energy_J);
        out += ',';
        out += std::to_string(r.seed);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fedsched
