#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "anmimo/common.hpp"

namespace anmimo {

// Antenna geometry and the three power ratios. Powers are always derived
// from (alpha, beta, gamma), never stored, so a config cannot go
// inconsistent. Bob's noise variance is normalized to 1 throughout.
struct SystemConfig {
    int n_a = 0;  // transmit antennas (Alice)
    int n_b = 0;  // legitimate receive antennas (Bob), n_b < n_a
    int n_e = 0;  // eavesdropper antennas (Eve)
    double alpha = 0.0;  // eavesdropper SNR, sigma_u^2 / sigma_e^2
    double beta = 0.0;   // AN-to-information power ratio, sigma_v^2 / sigma_u^2
    double gamma = 0.0;  // Eve-to-Bob noise-power ratio, sigma_e^2 / sigma_b^2
    int feedback_bits = 0;

    void validate() const {
        if (n_a < 1 || n_b < 1 || n_e < 1) throw DomainError("antenna counts must be >= 1");
        if (n_b >= n_a) throw DomainError("n_b must be < n_a (AN needs a nontrivial null space)");
        if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
        if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
        if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
        if (feedback_bits < 0) throw DomainError("feedback_bits must be >= 0");
    }

    double snr_bob() const { return alpha * gamma; }
    double snr_eve() const { return alpha; }
    std::uint64_t codebook_size() const { return std::uint64_t{1} << feedback_bits; }
};

struct PowerBudget {
    double p_u = 0.0;      // information power, E||u||^2
    double p_v = 0.0;      // artificial-noise power, E||v||^2
    double p_total = 0.0;  // average transmit power
};

struct DerivedDims {
    int n_min = 0;     // min{n_e, n_a - n_b}
    int n_max = 0;     // max{n_e, n_a - n_b}
    int nhat_min = 0;  // min{n_e, n_a}
    int nhat_max = 0;  // max{n_e, n_a}
    std::vector<double> theta_vec;  // alpha for the first n_b slots, alpha*beta after
    double theta_min = 0.0;         // min{alpha*gamma, alpha*beta*gamma}
};

inline PowerBudget derive_powers(const SystemConfig& cfg) {
    cfg.validate();
    PowerBudget p;
    p.p_u = cfg.alpha * cfg.gamma * cfg.n_b;
    p.p_v = cfg.alpha * cfg.beta * cfg.gamma * (cfg.n_a - cfg.n_b);
    p.p_total = p.p_u + p.p_v;
    return p;
}

// Solves p_total = alpha*gamma*n_b + alpha*beta*gamma*(n_a - n_b) for alpha.
inline SystemConfig config_from_total_power(double p_total, double beta, double gamma, int n_a,
                                            int n_b, int n_e, int feedback_bits) {
    if (!(p_total > 0.0)) throw DomainError("p_total must be > 0");
    if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
    if (!(gamma > 0.0)) throw DomainError("gamma must be > 0");
    const double denom = gamma * (n_b + beta * (n_a - n_b));
    if (!(denom > 0.0)) throw DomainError("degenerate power split: no stream carries power");
    SystemConfig cfg;
    cfg.n_a = n_a;
    cfg.n_b = n_b;
    cfg.n_e = n_e;
    cfg.alpha = p_total / denom;
    cfg.beta = beta;
    cfg.gamma = gamma;
    cfg.feedback_bits = feedback_bits;
    cfg.validate();
    return cfg;
}

inline DerivedDims derive_dims(const SystemConfig& cfg) {
    cfg.validate();
    DerivedDims d;
    d.n_min = std::min(cfg.n_e, cfg.n_a - cfg.n_b);
    d.n_max = std::max(cfg.n_e, cfg.n_a - cfg.n_b);
    d.nhat_min = std::min(cfg.n_e, cfg.n_a);
    d.nhat_max = std::max(cfg.n_e, cfg.n_a);
    d.theta_vec.resize(cfg.n_a);
    for (int i = 0; i < cfg.n_a; ++i) d.theta_vec[i] = i < cfg.n_b ? cfg.alpha : cfg.alpha * cfg.beta;
    d.theta_min = std::min(cfg.alpha * cfg.gamma, cfg.alpha * cfg.beta * cfg.gamma);
    return d;
}

// --- key=value config files ------------------------------------------------
//
// One `key = value` pair per line; '#' starts a comment. Recognized keys:
// n_a, n_b, n_e, alpha | p_total (exactly one), beta, gamma, feedback_bits,
// seed, trials. Consumers of extended schemas (sweep files) pull further
// keys out of the same map.

inline std::map<std::string, std::string> parse_kv_text(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        if (strip(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw DomainError("config line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key)) throw DomainError("duplicate config key: " + key);
        kv[key] = value;
    }
    return kv;
}

inline double kv_number(const std::map<std::string, std::string>& kv, const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw DomainError("missing config key: " + key);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        throw DomainError("config key " + key + ": not a number: " + it->second);
    }
    if (pos != it->second.size())
        throw DomainError("config key " + key + ": trailing characters in " + it->second);
    return value;
}

inline double kv_number_or(const std::map<std::string, std::string>& kv, const std::string& key,
                           double fallback) {
    return kv.count(key) ? kv_number(kv, key) : fallback;
}

inline SystemConfig config_from_kv(const std::map<std::string, std::string>& kv) {
    const bool has_alpha = kv.count("alpha") > 0;
    const bool has_ptotal = kv.count("p_total") > 0;
    if (has_alpha == has_ptotal)
        throw DomainError("config must set exactly one of alpha / p_total");
    const int n_a = static_cast<int>(kv_number(kv, "n_a"));
    const int n_b = static_cast<int>(kv_number(kv, "n_b"));
    const int n_e = static_cast<int>(kv_number(kv, "n_e"));
    const double beta = kv_number(kv, "beta");
    const double gamma = kv_number(kv, "gamma");
    const int bits = static_cast<int>(kv_number_or(kv, "feedback_bits", 0));
    if (has_ptotal)
        return config_from_total_power(kv_number(kv, "p_total"), beta, gamma, n_a, n_b, n_e, bits);
    SystemConfig cfg;
    cfg.n_a = n_a;
    cfg.n_b = n_b;
    cfg.n_e = n_e;
    cfg.alpha = kv_number(kv, "alpha");
    cfg.beta = beta;
    cfg.gamma = gamma;
    cfg.feedback_bits = bits;
    cfg.validate();
    return cfg;
}

}  // namespace anmimo
