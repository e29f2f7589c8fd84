#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fedsched {

// One per-aggregation metrics row. Cumulative columns are nondecreasing
// within a run.
struct MetricsRecord {
    long long round = 0;
    long long tau = 0;
    long long K = 0;
    double loss = 0.0;
    double accuracy = 0.0;
    double cum_delay_s = 0.0;
    double cum_energy_J = 0.0;
    std::uint64_t seed = 0;
};

// CSV with header round,tau,K,loss,accuracy,cum_delay_s,cum_energy_J,seed.
// Floats are printed with 9 significant digits; identical input always yields
// byte-identical output.
std::string metrics_to_csv(const std::vector<MetricsRecord>& records);

// Writes content to path; failures surface with the path in the message.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fedsched
