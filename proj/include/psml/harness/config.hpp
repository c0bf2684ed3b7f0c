#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psml/core.hpp"
#include "psml/estimators.hpp"
#include "psml/sa_gradient.hpp"

namespace psml {

/// Invalid configuration: the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scenario { linear_gaussian, bernoulli, spectrum, spectrum_knn };
enum class SweepVar { N, Delta, M, K };

struct ExperimentConfig {
    Scenario scenario = Scenario::linear_gaussian;
    std::string theta_recipe = "gaussian-paper";
    std::vector<double> theta_explicit;  // used when theta_recipe == "explicit"

    SweepVar sweep_var = SweepVar::N;
    std::vector<double> sweep_values;

    int M = 10;
    int N = 100;
    double rho_x = 0.8;
    double rho_y = 0.2;
    double delta_shift = 0.0;  // Bernoulli offset when not sweeping it

    long trials = 1000;
    std::vector<std::string> estimators;

    SaConfig sa;
    EstimatorConfig est;

    std::uint64_t seed = 1;
    int workers = 0;  // 0 = hardware concurrency
    bool emit_crb = false;
    int crb_K = 10000;
    bool timing = true;
    double fail_abort_rate = 0.01;

    int knn_ref_size = 500;
    int knn_k = 5;

    bool keep_trials = false;  // library-only: retain per-trial outcomes
    int bench_warmup = 4;      // bench-only: untimed estimates per point
};

namespace cfgdetail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number for '" + key + "': " + v);
    }
    if (pos != v.size()) throw ConfigError("config: bad number for '" + key + "': " + v);
    return d;
}

inline long parse_long(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    long n = 0;
    try {
        n = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer for '" + key + "': " + v);
    }
    if (pos != v.size()) throw ConfigError("config: bad integer for '" + key + "': " + v);
    return n;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
        n = std::stoull(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed for '" + key + "': " + v);
    }
    if (pos != v.size()) throw ConfigError("config: bad seed for '" + key + "': " + v);
    return n;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError("config: bad flag for '" + key + "' (use on/off): " + v);
}

}  // namespace cfgdetail

inline Scenario scenario_from_name(const std::string& name) {
    if (name == "linear-gaussian") return Scenario::linear_gaussian;
    if (name == "bernoulli") return Scenario::bernoulli;
    if (name == "spectrum") return Scenario::spectrum;
    if (name == "spectrum-knn") return Scenario::spectrum_knn;
    throw ConfigError("config: unknown scenario '" + name + "'");
}

inline std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::linear_gaussian: return "linear-gaussian";
        case Scenario::bernoulli: return "bernoulli";
        case Scenario::spectrum: return "spectrum";
        case Scenario::spectrum_knn: return "spectrum-knn";
    }
    return "?";
}

inline SweepVar sweep_from_name(const std::string& name) {
    if (name == "N") return SweepVar::N;
    if (name == "delta") return SweepVar::Delta;
    if (name == "M") return SweepVar::M;
    if (name == "K") return SweepVar::K;
    throw ConfigError("config: unknown sweep variable '" + name + "' (N, delta, M, K)");
}

inline std::string sweep_name(SweepVar v) {
    switch (v) {
        case SweepVar::N: return "N";
        case SweepVar::Delta: return "delta";
        case SweepVar::M: return "M";
        case SweepVar::K: return "K";
    }
    return "?";
}

inline const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> names = {
        "ml", "ml-split", "ml-first", "mbp-psml", "2b-psml", "sa-psml", "james-stein"};
    return names;
}

/// Parse the flat key-value config grammar:
///   - '#' starts a comment (whole line or trailing),
///   - '[section]' opens a section,
///   - 'key = value' assigns within the current section,
///   - blank lines are ignored; unknown keys are errors.
inline void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    using namespace cfgdetail;
    std::istringstream in(text);
    std::string line;
    std::string section = "experiment";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) + ": bad section");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;

        if (full == "experiment.scenario") {
            cfg.scenario = scenario_from_name(value);
        } else if (full == "experiment.theta_recipe") {
            cfg.theta_recipe = value;
        } else if (full == "experiment.theta") {
            cfg.theta_explicit.clear();
            for (const auto& item : split_list(value)) {
                cfg.theta_explicit.push_back(parse_double(full, item));
            }
            cfg.theta_recipe = "explicit";
        } else if (full == "experiment.sweep") {
            cfg.sweep_var = sweep_from_name(value);
        } else if (full == "experiment.sweep_values") {
            cfg.sweep_values.clear();
            for (const auto& item : split_list(value)) {
                cfg.sweep_values.push_back(parse_double(full, item));
            }
        } else if (full == "experiment.M") {
            cfg.M = static_cast<int>(parse_long(full, value));
        } else if (full == "experiment.N") {
            cfg.N = static_cast<int>(parse_long(full, value));
        } else if (full == "experiment.rho_x") {
            cfg.rho_x = parse_double(full, value);
        } else if (full == "experiment.rho_y") {
            cfg.rho_y = parse_double(full, value);
        } else if (full == "experiment.delta") {
            cfg.delta_shift = parse_double(full, value);
        } else if (full == "experiment.trials") {
            cfg.trials = parse_long(full, value);
        } else if (full == "experiment.estimators") {
            cfg.estimators = split_list(value);
        } else if (full == "experiment.seed") {
            cfg.seed = parse_u64(full, value);
        } else if (full == "experiment.workers") {
            cfg.workers = static_cast<int>(parse_long(full, value));
        } else if (full == "experiment.crb") {
            cfg.emit_crb = parse_bool(full, value);
        } else if (full == "experiment.crb_K") {
            cfg.crb_K = static_cast<int>(parse_long(full, value));
        } else if (full == "experiment.timing") {
            cfg.timing = parse_bool(full, value);
        } else if (full == "experiment.fail_abort_rate") {
            cfg.fail_abort_rate = parse_double(full, value);
        } else if (full == "sa.K") {
            cfg.sa.K = static_cast<int>(parse_long(full, value));
        } else if (full == "sa.zero_threshold") {
            cfg.sa.zero_threshold_scale = parse_double(full, value);
        } else if (full == "sa.common_random_numbers") {
            cfg.sa.common_random_numbers = parse_bool(full, value);
        } else if (full == "estimator.delta") {
            cfg.est.delta = parse_double(full, value);
        } else if (full == "estimator.max_iter") {
            cfg.est.max_iter = static_cast<int>(parse_long(full, value));
        } else if (full == "estimator.update_mode") {
            if (value == "score-solve") {
                cfg.est.update_mode = UpdateMode::score_solve;
            } else if (value == "linear-efficient") {
                cfg.est.update_mode = UpdateMode::linear_efficient;
            } else {
                throw ConfigError("config: unknown update_mode '" + value + "'");
            }
        } else if (full == "estimator.g_source") {
            if (value == "analytic-full") {
                cfg.est.g_source = GSource::analytic_full;
            } else if (value == "analytic-pairwise") {
                cfg.est.g_source = GSource::analytic_pairwise;
            } else if (value == "stochastic") {
                cfg.est.g_source = GSource::stochastic;
            } else {
                throw ConfigError("config: unknown g_source '" + value + "'");
            }
        } else if (full == "knn.ref_size") {
            cfg.knn_ref_size = static_cast<int>(parse_long(full, value));
        } else if (full == "knn.k") {
            cfg.knn_k = static_cast<int>(parse_long(full, value));
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '"
                              + full + "'");
        }
    }
}

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.sweep_values.empty()) throw ConfigError("config: sweep_values is empty");
    if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
    if (cfg.rho_x <= 0.0 || cfg.rho_y <= 0.0
        || std::abs(cfg.rho_x + cfg.rho_y - 1.0) > 1e-12) {
        throw ConfigError("config: stage fractions must be positive and sum to 1");
    }
    if (cfg.estimators.empty()) throw ConfigError("config: no estimators requested");
    for (const auto& name : cfg.estimators) {
        if (std::find(known_estimators().begin(), known_estimators().end(), name)
            == known_estimators().end()) {
            throw ConfigError("config: unknown estimator '" + name + "'");
        }
    }
    if (cfg.est.delta <= 0.0 || cfg.est.max_iter < 1) {
        throw ConfigError("config: estimator delta/max_iter out of range");
    }
    if (cfg.sa.K < 1) throw ConfigError("config: sa.K must be >= 1");
    if (cfg.workers < 0) throw ConfigError("config: workers must be >= 0");
    if (cfg.fail_abort_rate < 0.0 || cfg.fail_abort_rate > 1.0) {
        throw ConfigError("config: fail_abort_rate must be in [0, 1]");
    }
    if (cfg.knn_k < 1 || cfg.knn_ref_size < cfg.knn_k) {
        throw ConfigError("config: knn needs 1 <= k <= ref_size");
    }
}

namespace cfgdetail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace cfgdetail

/// Canonical text form; parsing it back reproduces the configuration.
inline std::string config_to_text(const ExperimentConfig& cfg) {
    using cfgdetail::fmt;
    std::ostringstream out;
    out << "[experiment]\n";
    out << "scenario = " << scenario_name(cfg.scenario) << "\n";
    if (cfg.theta_recipe == "explicit") {
        out << "theta = ";
        for (std::size_t i = 0; i < cfg.theta_explicit.size(); ++i) {
            out << (i ? ", " : "") << fmt(cfg.theta_explicit[i]);
        }
        out << "\n";
    } else {
        out << "theta_recipe = " << cfg.theta_recipe << "\n";
    }
    out << "sweep = " << sweep_name(cfg.sweep_var) << "\n";
    out << "sweep_values = ";
    for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
        out << (i ? ", " : "") << fmt(cfg.sweep_values[i]);
    }
    out << "\n";
    out << "M = " << cfg.M << "\n";
    out << "N = " << cfg.N << "\n";
    out << "rho_x = " << fmt(cfg.rho_x) << "\n";
    out << "rho_y = " << fmt(cfg.rho_y) << "\n";
    out << "delta = " << fmt(cfg.delta_shift) << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "estimators = ";
    for (std::size_t i = 0; i < cfg.estimators.size(); ++i) {
        out << (i ? ", " : "") << cfg.estimators[i];
    }
    out << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "crb = " << (cfg.emit_crb ? "on" : "off") << "\n";
    out << "crb_K = " << cfg.crb_K << "\n";
    out << "timing = " << (cfg.timing ? "on" : "off") << "\n";
    out << "fail_abort_rate = " << fmt(cfg.fail_abort_rate) << "\n";
    out << "\n[sa]\n";
    out << "K = " << cfg.sa.K << "\n";
    out << "zero_threshold = " << fmt(cfg.sa.zero_threshold_scale) << "\n";
    out << "common_random_numbers = " << (cfg.sa.common_random_numbers ? "on" : "off") << "\n";
    out << "\n[estimator]\n";
    out << "delta = " << fmt(cfg.est.delta) << "\n";
    out << "max_iter = " << cfg.est.max_iter << "\n";
    out << "update_mode = "
        << (cfg.est.update_mode == UpdateMode::score_solve ? "score-solve" : "linear-efficient")
        << "\n";
    out << "g_source = "
        << (cfg.est.g_source == GSource::analytic_full      ? "analytic-full"
            : cfg.est.g_source == GSource::analytic_pairwise ? "analytic-pairwise"
                                                             : "stochastic")
        << "\n";
    out << "\n[knn]\n";
    out << "ref_size = " << cfg.knn_ref_size << "\n";
    out << "k = " << cfg.knn_k << "\n";
    return out.str();
}

/// Theta pattern for a sweep point. Recipes mirror the simulation setups;
/// "explicit" takes the configured vector verbatim.
inline Vec theta_from_recipe(const ExperimentConfig& cfg, int M, double delta_shift) {
    const std::string& r = cfg.theta_recipe;
    if (r == "explicit") {
        if (static_cast<int>(cfg.theta_explicit.size()) != M) {
            throw ConfigError("config: explicit theta length != M");
        }
        return Eigen::Map<const Vec>(cfg.theta_explicit.data(), M);
    }
    if (r == "ones") return Vec::Ones(M);
    if (r == "gaussian-paper") {
        if (M < 5) throw ConfigError("config: gaussian-paper recipe needs M >= 5");
        Vec t = Vec::Ones(M);
        t[0] = 1.05;
        t[1] = 1.01;
        t[2] = 1.02;
        t[M - 1] = 0.0;
        return t;
    }
    if (r == "bernoulli-delta") {
        Vec t = Vec::Constant(M, 0.5);
        t[0] = 0.5 + delta_shift;
        return t;
    }
    if (r == "spectrum-paper") {
        if (M < 7) throw ConfigError("config: spectrum-paper recipe needs M >= 7");
        Vec t = Vec::Ones(M);
        t[0] = 0.95;
        t[1] = 0.96;
        t[2] = 0.98;
        t[3] = t[4] = t[5] = 3.0;
        return t;
    }
    if (r == "knn-paper") {
        if (M < 4) throw ConfigError("config: knn-paper recipe needs M >= 4");
        Vec t = Vec::Ones(M);
        t[0] = 0.9;
        t[1] = t[2] = 0.95;
        return t;
    }
    throw ConfigError("config: unknown theta recipe '" + r + "'");
}

}  // namespace psml
