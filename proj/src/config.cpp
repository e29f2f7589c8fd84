#include "fedsched/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fedsched {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::runtime_error("trailing characters in number: " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::runtime_error("bad unsigned integer: " + s);
    return v;
}

template <typename T, typename ParseOne>
std::vector<T> parse_list(const std::string& s, ParseOne parse_one) {
    std::vector<T> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
    return out;
}

template <typename T, typename FormatOne>
std::string format_list(const std::vector<T>& v, FormatOne format_one) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += format_one(v[i]);
    }
    return out;
}

struct Field {
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define STR_FIELD(name)                                                       \
    Field{#name, [](const ExperimentConfig& c) { return c.name; },            \
          [](ExperimentConfig& c, const std::string& v) { c.name = v; }}
#define DBL_FIELD(name)                                                       \
    Field{#name, [](const ExperimentConfig& c) { return format_double(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_double(v); }}
#define U64_FIELD(name)                                                       \
    Field{#name, [](const ExperimentConfig& c) { return std::to_string(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_u64(v); }}
#define BOOL_FIELD(name)                                                      \
    Field{#name, [](const ExperimentConfig& c) { return std::string(c.name ? "1" : "0"); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_u64(v) != 0; }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        STR_FIELD(model),
        DBL_FIELD(eta),
        DBL_FIELD(l2),
        STR_FIELD(init),
        DBL_FIELD(init_std),
        STR_FIELD(dataset),
        U64_FIELD(n_samples),
        U64_FIELD(dim),
        DBL_FIELD(separation),
        STR_FIELD(idx_images),
        STR_FIELD(idx_labels),
        U64_FIELD(subset),
        DBL_FIELD(holdout),
        U64_FIELD(N),
        STR_FIELD(partition),
        U64_FIELD(seed),
        DBL_FIELD(rho),
        DBL_FIELD(grad_f_star),
        DBL_FIELD(epsilon),
        DBL_FIELD(tau_max),
        DBL_FIELD(eps_target),
        DBL_FIELD(mu),
        DBL_FIELD(a),
        BOOL_FIELD(heterogeneous_a),
        DBL_FIELD(t_cm),
        DBL_FIELD(P_cm),
        DBL_FIELD(E_tr),
        DBL_FIELD(kappa),
        DBL_FIELD(C),
        DBL_FIELD(D_max),
        DBL_FIELD(B),
        DBL_FIELD(N0),
        DBL_FIELD(Z),
        Field{"h",
              [](const ExperimentConfig& c) { return format_list(c.h, format_double); },
              [](ExperimentConfig& c, const std::string& v) {
                  c.h = parse_list<double>(v, parse_double);
              }},
        DBL_FIELD(t_tot),
        DBL_FIELD(E_tot),
        U64_FIELD(tau),
        U64_FIELD(K),
        Field{"sweep_taus",
              [](const ExperimentConfig& c) {
                  return format_list(c.sweep_taus,
                                     [](long long v) { return std::to_string(v); });
              },
              [](ExperimentConfig& c, const std::string& v) {
                  c.sweep_taus = parse_list<long long>(v, [](const std::string& s) {
                      return static_cast<long long>(parse_u64(s));
                  });
              }},
        STR_FIELD(delay_model),
    };
    return table;
}

#undef STR_FIELD
#undef DBL_FIELD
#undef U64_FIELD
#undef BOOL_FIELD

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& f : fields()) {
            if (key == f.key) {
                try {
                    f.set(cfg, value);
                } catch (const std::exception& e) {
                    throw std::runtime_error("config line " + std::to_string(line_no) + " (" +
                                             key + "): " + e.what());
                }
                known = true;
                break;
            }
        }
        if (!known)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig cfg = parse_config(buffer.str());
    validate_config(cfg);
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(cfg);
        out += '\n';
    }
    return out;
}

void validate_config(const ExperimentConfig& cfg) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::runtime_error(std::string("config: ") + msg);
    };
    require(cfg.model == "svm" || cfg.model == "logloss" || cfg.model == "mse",
            "model must be svm, logloss or mse");
    require(cfg.eta > 0.0, "eta must be positive");
    require(cfg.l2 >= 0.0, "l2 must be nonnegative");
    require(cfg.init == "zeros" || cfg.init == "gaussian", "init must be zeros or gaussian");
    require(cfg.dataset == "synthetic" || cfg.dataset == "idx",
            "dataset must be synthetic or idx");
    require(cfg.holdout >= 0.0 && cfg.holdout < 1.0, "holdout must be in [0,1)");
    require(cfg.N >= 1, "N must be >= 1");
    require(cfg.partition == "iid" || cfg.partition == "label-sorted",
            "partition must be iid or label-sorted");
    require(cfg.tau_max >= 1.0, "tau_max must be >= 1");
    require(cfg.mu > 0.0, "mu must be positive");
    require(cfg.a > 0.0, "a must be positive");
    require(cfg.P_cm > 0.0, "P_cm must be positive");
    require(cfg.t_tot > 0.0, "t_tot must be positive");
    require(cfg.E_tot > 0.0, "E_tot must be positive");
    require(cfg.tau >= 1, "tau must be >= 1");
    require(cfg.delay_model == "expected" || cfg.delay_model == "sampled",
            "delay_model must be expected or sampled");
    if (cfg.dataset == "idx") {
        require(std::filesystem::exists(cfg.idx_images), "idx_images file does not exist");
        require(std::filesystem::exists(cfg.idx_labels), "idx_labels file does not exist");
    }
}

}  // namespace fedsched
