#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anmimo/closed_form.hpp"
#include "anmimo/common.hpp"
#include "anmimo/quantizer.hpp"
#include "anmimo/rng.hpp"
#include "anmimo/secrecy_mc.hpp"
#include "anmimo/system_model.hpp"

namespace anmimo {

enum class SweepVariable { feedback_bits, p_v, beta, b_bar };

enum class OutputColumn {
    mc_loss,
    ub_theorem2,
    ub_heuristic,
    asymptote,
    c_lb_q,
    c_bob,
    mc_rsq_rvq,
    mc_rsq_sphere,
    ers_closed,
};

// Codebook the mc_loss column measures against; mc_rsq_rvq is always fresh
// RVQ and mc_rsq_sphere is always the deterministic sphere codebook.
enum class LossCodebookPolicy { fresh_per_trial, fixed_sphere };

inline std::string sweep_variable_name(SweepVariable v) {
    switch (v) {
        case SweepVariable::feedback_bits: return "feedback_bits";
        case SweepVariable::p_v: return "p_v";
        case SweepVariable::beta: return "beta";
        case SweepVariable::b_bar: return "b_bar";
    }
    throw DomainError("unknown sweep variable");
}

inline SweepVariable sweep_variable_from_name(const std::string& s) {
    if (s == "feedback_bits") return SweepVariable::feedback_bits;
    if (s == "p_v") return SweepVariable::p_v;
    if (s == "beta") return SweepVariable::beta;
    if (s == "b_bar") return SweepVariable::b_bar;
    throw DomainError("unknown sweep variable: " + s);
}

inline std::string output_column_name(OutputColumn c) {
    switch (c) {
        case OutputColumn::mc_loss: return "mc_loss";
        case OutputColumn::ub_theorem2: return "ub_theorem2";
        case OutputColumn::ub_heuristic: return "ub_heuristic";
        case OutputColumn::asymptote: return "asymptote";
        case OutputColumn::c_lb_q: return "c_lb_q";
        case OutputColumn::c_bob: return "c_bob";
        case OutputColumn::mc_rsq_rvq: return "mc_rsq_rvq";
        case OutputColumn::mc_rsq_sphere: return "mc_rsq_sphere";
        case OutputColumn::ers_closed: return "ers_closed";
    }
    throw DomainError("unknown output column");
}

inline OutputColumn output_column_from_name(const std::string& s) {
    for (OutputColumn c :
         {OutputColumn::mc_loss, OutputColumn::ub_theorem2, OutputColumn::ub_heuristic,
          OutputColumn::asymptote, OutputColumn::c_lb_q, OutputColumn::c_bob,
          OutputColumn::mc_rsq_rvq, OutputColumn::mc_rsq_sphere, OutputColumn::ers_closed}) {
        if (output_column_name(c) == s) return c;
    }
    throw DomainError("unknown output column: " + s);
}

inline bool output_is_mc(OutputColumn c) {
    return c == OutputColumn::mc_loss || c == OutputColumn::mc_rsq_rvq ||
           c == OutputColumn::mc_rsq_sphere;
}

struct ExperimentSpec {
    int n_a = 0;
    int n_b = 0;
    int n_e = 0;
    bool use_p_total = false;  // base power given as p_total instead of alpha
    double alpha = 0.0;
    double p_total = 0.0;
    double beta = 1.0;
    double gamma = 1.0;
    int feedback_bits = 0;

    SweepVariable sweep = SweepVariable::feedback_bits;
    std::vector<double> grid;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 12345;
    LossCodebookPolicy codebook_policy = LossCodebookPolicy::fresh_per_trial;
    std::vector<OutputColumn> outputs;
    double zeta = 0.5;
    std::string label = "sweep";

    void validate() const {
        if (grid.empty()) throw DomainError("sweep grid must be nonempty");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1])) throw DomainError("sweep grid must be strictly increasing");
        if (trials < 100) throw DomainError("trials must be >= 100");
        if (outputs.empty()) throw DomainError("at least one output column required");
        for (std::size_t i = 0; i < outputs.size(); ++i)
            for (std::size_t j = i + 1; j < outputs.size(); ++j)
                if (outputs[i] == outputs[j])
                    throw DomainError("duplicate output column: " + output_column_name(outputs[i]));
        if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
        if (sweep == SweepVariable::feedback_bits || sweep == SweepVariable::b_bar) {
            for (double v : grid) {
                const double bits =
                    sweep == SweepVariable::b_bar ? v * static_cast<double>(n_a) : v;
                if (!(bits >= 0.0) || std::fabs(bits - std::round(bits)) > 1e-9)
                    throw DomainError("sweep grid must map to integer feedback_bits >= 0");
            }
        }
        if (sweep == SweepVariable::p_v && use_p_total)
            throw DomainError("p_v sweep holds alpha fixed; give the base config in alpha form");
        if (sweep == SweepVariable::p_v || sweep == SweepVariable::beta) {
            for (double v : grid)
                if (!(v >= 0.0)) throw DomainError("p_v / beta grid values must be >= 0");
        }
        const bool wants_sphere =
            codebook_policy == LossCodebookPolicy::fixed_sphere ||
            std::count(outputs.begin(), outputs.end(), OutputColumn::mc_rsq_sphere) > 0;
        if (wants_sphere && (n_a != 2 || n_b != 1))
            throw DomainError("sphere codebook columns require n_a = 2, n_b = 1");
    }
};

struct ExperimentResult {
    std::vector<std::string> names;
    std::vector<std::string> units;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;
};

namespace detail {

// Stable per-(row, column) seed stream so results do not depend on
// execution order or thread count.
inline std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t row, std::uint64_t column) {
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (row + 1);
    const std::uint64_t first = splitmix64(state);
    state += 0x9e3779b97f4a7c15ULL * (column + 1);
    return first ^ splitmix64(state);
}

struct RowContext {
    SystemConfig cfg;
    double p_total = 0.0;
    double p_v = 0.0;
    double b_bar = 0.0;
};

inline RowContext row_context(const ExperimentSpec& spec, double value) {
    RowContext ctx;
    SystemConfig& cfg = ctx.cfg;
    cfg.n_a = spec.n_a;
    cfg.n_b = spec.n_b;
    cfg.n_e = spec.n_e;
    cfg.beta = spec.beta;
    cfg.gamma = spec.gamma;
    cfg.feedback_bits = spec.feedback_bits;
    switch (spec.sweep) {
        case SweepVariable::feedback_bits:
            cfg.feedback_bits = static_cast<int>(std::llround(value));
            break;
        case SweepVariable::b_bar:
            cfg.feedback_bits = static_cast<int>(std::llround(value * spec.n_a));
            break;
        case SweepVariable::beta:
            cfg.beta = value;
            break;
        case SweepVariable::p_v: {
            // p_v = alpha*beta*gamma*(n_a - n_b), alpha held fixed
            cfg.beta = value / (spec.alpha * spec.gamma * (spec.n_a - spec.n_b));
            break;
        }
    }
    if (spec.use_p_total) {
        cfg = config_from_total_power(spec.p_total, cfg.beta, cfg.gamma, cfg.n_a, cfg.n_b, cfg.n_e,
                                      cfg.feedback_bits);
    } else {
        cfg.alpha = spec.alpha;
        cfg.validate();
    }
    const PowerBudget p = derive_powers(cfg);
    ctx.p_total = p.p_total;
    ctx.p_v = p.p_v;
    ctx.b_bar = static_cast<double>(cfg.feedback_bits) / static_cast<double>(cfg.n_a);
    return ctx;
}

inline void lead_columns(const ExperimentSpec& spec, std::vector<std::string>& names,
                         std::vector<std::string>& units) {
    switch (spec.sweep) {
        case SweepVariable::feedback_bits:
            names = {"feedback_bits"};
            units = {"bits"};
            break;
        case SweepVariable::p_v:
            names = {"p_v", "beta"};
            units = {"power", "ratio"};
            break;
        case SweepVariable::beta:
            names = {"beta", "p_v"};
            units = {"ratio", "power"};
            break;
        case SweepVariable::b_bar:
            names = {"b_bar", "feedback_bits"};
            units = {"bits_per_tx_antenna", "bits"};
            break;
    }
}

inline void lead_values(const ExperimentSpec& spec, double value, const RowContext& ctx,
                        std::vector<double>& row) {
    switch (spec.sweep) {
        case SweepVariable::feedback_bits:
            row = {static_cast<double>(ctx.cfg.feedback_bits)};
            break;
        case SweepVariable::p_v:
            row = {value, ctx.cfg.beta};
            break;
        case SweepVariable::beta:
            row = {value, ctx.p_v};
            break;
        case SweepVariable::b_bar:
            row = {value, static_cast<double>(ctx.cfg.feedback_bits)};
            break;
    }
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentSpec& spec, unsigned threads = 0) {
    spec.validate();

    ExperimentResult result;
    detail::lead_columns(spec, result.names, result.units);
    for (OutputColumn c : spec.outputs) {
        result.names.push_back(output_column_name(c));
        result.units.push_back("bits");
        if (output_is_mc(c)) {
            result.names.push_back(output_column_name(c) + "_stderr");
            result.units.push_back("bits");
            result.names.push_back(output_column_name(c) + "_clipped");
            result.units.push_back("bits");
        }
    }

    bool condition_warning = false;
    bool clamped_falling_factorial = false;
    bool used_exact_law = false;
    bool used_brute_stream = false;

    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double value = spec.grid[i];
        try {
            const detail::RowContext ctx = detail::row_context(spec, value);
            const SystemConfig& cfg = ctx.cfg;
            std::vector<double> row;
            detail::lead_values(spec, value, ctx, row);

            Codebook sphere;
            const bool needs_sphere =
                spec.codebook_policy == LossCodebookPolicy::fixed_sphere ||
                std::count(spec.outputs.begin(), spec.outputs.end(), OutputColumn::mc_rsq_sphere) >
                    0;
            if (needs_sphere) sphere = build_sphere_codebook(cfg.feedback_bits);
            const CodebookPolicy loss_policy =
                spec.codebook_policy == LossCodebookPolicy::fixed_sphere
                    ? CodebookPolicy::fixed(sphere)
                    : CodebookPolicy::fresh();

            for (std::size_t c = 0; c < spec.outputs.size(); ++c) {
                const std::uint64_t col_seed = detail::derived_seed(spec.seed, i, c);
                OmegaDiagnostics diag;
                switch (spec.outputs[c]) {
                    case OutputColumn::mc_loss: {
                        const auto est = mc_ergodic_pair(cfg, ErgodicQuantity::rate_loss,
                                                         spec.trials, col_seed, loss_policy,
                                                         threads);
                        row.push_back(est.first.mean);
                        row.push_back(est.first.std_err);
                        row.push_back(est.second.mean);
                        break;
                    }
                    case OutputColumn::mc_rsq_rvq: {
                        const auto est = mc_ergodic_pair(cfg, ErgodicQuantity::rate_quantized,
                                                         spec.trials, col_seed,
                                                         CodebookPolicy::fresh(), threads);
                        row.push_back(est.first.mean);
                        row.push_back(est.first.std_err);
                        row.push_back(est.second.mean);
                        break;
                    }
                    case OutputColumn::mc_rsq_sphere: {
                        const auto est = mc_ergodic_pair(cfg, ErgodicQuantity::rate_quantized,
                                                         spec.trials, col_seed,
                                                         CodebookPolicy::fixed(sphere), threads);
                        row.push_back(est.first.mean);
                        row.push_back(est.first.std_err);
                        row.push_back(est.second.mean);
                        break;
                    }
                    case OutputColumn::ub_theorem2:
                        row.push_back(loss_upper_bound_theorem2(cfg, spec.zeta));
                        break;
                    case OutputColumn::ub_heuristic: {
                        const double eta = distortion_bound_eta(cfg.n_a, cfg.n_b,
                                                                cfg.codebook_size(), spec.zeta);
                        const double d = std::min(eta, static_cast<double>(cfg.n_b) - 1e-9);
                        row.push_back(loss_upper_bound_heuristic(cfg, d));
                        break;
                    }
                    case OutputColumn::asymptote:
                        row.push_back(asymptotic_loss(ctx.p_total, cfg.beta, ctx.b_bar));
                        break;
                    case OutputColumn::c_lb_q:
                        row.push_back(capacity_lower_bound(cfg, spec.zeta, &diag));
                        break;
                    case OutputColumn::c_bob:
                        row.push_back(bob_capacity(cfg));
                        break;
                    case OutputColumn::ers_closed:
                        row.push_back(ergodic_secrecy_rate_closed(cfg, &diag));
                        break;
                }
                condition_warning = condition_warning || diag.condition_warning;
                clamped_falling_factorial =
                    clamped_falling_factorial || diag.clamped_falling_factorial;
                if (output_is_mc(spec.outputs[c])) {
                    const bool sphere_col = spec.outputs[c] == OutputColumn::mc_rsq_sphere ||
                                            (spec.outputs[c] == OutputColumn::mc_loss &&
                                             spec.codebook_policy ==
                                                 LossCodebookPolicy::fixed_sphere);
                    if (!sphere_col) {
                        if (min_distance_law_available(cfg.n_a, cfg.n_b))
                            used_exact_law = true;
                        else
                            used_brute_stream = true;
                    }
                }
            }
            result.rows.push_back(std::move(row));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "grid point " << sweep_variable_name(spec.sweep) << " = " << value << ": "
                << e.what();
            throw std::runtime_error(msg.str());
        }
    }

    auto join_doubles = [](const std::vector<double>& v) {
        std::ostringstream s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s << ",";
            s << v[i];
        }
        return s.str();
    };
    std::string outputs_joined;
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        if (i) outputs_joined += ",";
        outputs_joined += output_column_name(spec.outputs[i]);
    }

    result.meta.emplace_back("version", kVersion);
    result.meta.emplace_back("experiment", spec.label);
    result.meta.emplace_back("n_a", std::to_string(spec.n_a));
    result.meta.emplace_back("n_b", std::to_string(spec.n_b));
    result.meta.emplace_back("n_e", std::to_string(spec.n_e));
    result.meta.emplace_back("power_form", spec.use_p_total ? "p_total" : "alpha");
    {
        std::ostringstream s;
        s << (spec.use_p_total ? spec.p_total : spec.alpha);
        result.meta.emplace_back(spec.use_p_total ? "p_total" : "alpha", s.str());
    }
    {
        std::ostringstream s;
        s << spec.beta;
        result.meta.emplace_back("beta_base", s.str());
    }
    {
        std::ostringstream s;
        s << spec.gamma;
        result.meta.emplace_back("gamma", s.str());
    }
    result.meta.emplace_back("feedback_bits_base", std::to_string(spec.feedback_bits));
    result.meta.emplace_back("sweep", sweep_variable_name(spec.sweep));
    result.meta.emplace_back("grid", join_doubles(spec.grid));
    result.meta.emplace_back("outputs", outputs_joined);
    result.meta.emplace_back("trials", std::to_string(spec.trials));
    result.meta.emplace_back("seed", std::to_string(spec.seed));
    {
        std::ostringstream s;
        s << spec.zeta;
        result.meta.emplace_back("zeta", s.str());
    }
    result.meta.emplace_back("codebook_policy",
                             spec.codebook_policy == LossCodebookPolicy::fixed_sphere
                                 ? "fixed_sphere"
                                 : "fresh_per_trial");
    result.meta.emplace_back(
        "negative_rate_convention",
        "headline columns average raw (possibly negative) rates; *_clipped columns clip each "
        "realization at zero before averaging, and loss columns difference the clipped rates");
    result.meta.emplace_back("rate_units", "bits");
    result.meta.emplace_back("rng", "mt19937_64 with splitmix64 per-trial substreams");
    if (used_exact_law || used_brute_stream)
        result.meta.emplace_back("quantized_sampler", used_brute_stream
                                                          ? (used_exact_law ? "mixed" : "brute_stream")
                                                          : "exact_law");
    result.meta.emplace_back("omega_condition_warning", condition_warning ? "1" : "0");
    result.meta.emplace_back("omega_clamped_falling_factorial",
                             clamped_falling_factorial ? "1" : "0");
    return result;
}

// --- figure presets ----------------------------------------------------------

inline ExperimentSpec figure_spec(const std::string& id) {
    ExperimentSpec spec;
    if (id == "fig1") {
        // AN ratio 1, unit Bob SNR; the eavesdropper antenna count is not
        // pinned by the preset definition, so 2 is used and logged.
        spec.n_a = 4;
        spec.n_b = 2;
        spec.n_e = 2;
        spec.alpha = 1.0;
        spec.beta = 1.0;
        spec.gamma = 1.0;
        spec.sweep = SweepVariable::feedback_bits;
        spec.grid = {2, 4, 6, 8, 10, 12, 14, 16};
        spec.outputs = {OutputColumn::mc_loss, OutputColumn::ub_theorem2,
                        OutputColumn::ub_heuristic};
        spec.label = "fig1";
    } else if (id == "fig2") {
        spec.n_a = 10;
        spec.n_b = 1;
        spec.n_e = 1;
        spec.use_p_total = true;
        spec.p_total = 1.0;
        spec.beta = 1.0;
        spec.gamma = 1.0;
        spec.sweep = SweepVariable::feedback_bits;
        spec.grid = {2, 3, 4, 5, 6, 7, 8, 9, 10};
        spec.outputs = {OutputColumn::mc_loss, OutputColumn::asymptote};
        spec.label = "fig2";
    } else if (id == "fig3") {
        // one block of the three-codebook-size family; run_figure_preset
        // stitches the blocks together
        spec.n_a = 4;
        spec.n_b = 2;
        spec.n_e = 2;
        spec.alpha = 1.0;
        spec.beta = 1.0;
        spec.gamma = 1.0;
        spec.sweep = SweepVariable::p_v;
        spec.grid = {2, 4, 8, 16, 32, 64, 128};  // beta in {1,2,...,64}
        spec.outputs = {OutputColumn::c_lb_q, OutputColumn::c_bob, OutputColumn::mc_rsq_rvq};
        spec.label = "fig3";
    } else if (id == "fig4") {
        spec.n_a = 2;
        spec.n_b = 1;
        spec.n_e = 1;
        spec.use_p_total = true;
        spec.p_total = 10.0;
        spec.beta = 2.0;
        spec.gamma = 1.0;
        spec.sweep = SweepVariable::feedback_bits;
        spec.grid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
        spec.outputs = {OutputColumn::mc_rsq_rvq, OutputColumn::mc_rsq_sphere};
        spec.label = "fig4";
    } else {
        throw DomainError("unknown figure id: " + id + " (expected fig1..fig4)");
    }
    return spec;
}

inline const std::vector<int>& fig3_feedback_bits() {
    static const std::vector<int> bits = {6, 10, 20};
    return bits;
}

inline ExperimentResult run_figure_preset(const std::string& id, std::uint64_t seed,
                                          std::uint64_t trials = 0, unsigned threads = 0) {
    if (id == "fig3") {
        ExperimentResult merged;
        bool first = true;
        for (std::size_t b = 0; b < fig3_feedback_bits().size(); ++b) {
            ExperimentSpec spec = figure_spec("fig3");
            spec.feedback_bits = fig3_feedback_bits()[b];
            spec.seed = detail::derived_seed(seed, 0x0f1e2d3c4b5a6978ULL, b);
            if (trials) spec.trials = trials;
            ExperimentResult block = run_experiment(spec, threads);
            if (first) {
                merged.names = block.names;
                merged.names.insert(merged.names.begin(), "feedback_bits");
                merged.units = block.units;
                merged.units.insert(merged.units.begin(), "bits");
                merged.meta = block.meta;
                first = false;
            } else {
                // keep the first block's meta; only the warning flags can
                // differ, so merge those by OR
                for (auto& kv : merged.meta) {
                    if (kv.first != "omega_condition_warning" &&
                        kv.first != "omega_clamped_falling_factorial")
                        continue;
                    for (const auto& other : block.meta)
                        if (other.first == kv.first && other.second == "1") kv.second = "1";
                }
            }
            for (auto& row : block.rows) {
                row.insert(row.begin(), static_cast<double>(spec.feedback_bits));
                merged.rows.push_back(std::move(row));
            }
        }
        std::string bits_joined;
        for (std::size_t b = 0; b < fig3_feedback_bits().size(); ++b) {
            if (b) bits_joined += ",";
            bits_joined += std::to_string(fig3_feedback_bits()[b]);
        }
        merged.meta.emplace_back("fig3_feedback_bits_set", bits_joined);
        merged.meta.emplace_back("run_seed", std::to_string(seed));
        return merged;
    }
    ExperimentSpec spec = figure_spec(id);
    spec.seed = seed;
    if (trials) spec.trials = trials;
    ExperimentResult result = run_experiment(spec, threads);
    if (id == "fig1") result.meta.emplace_back("fig1_n_e_default", "2");
    return result;
}

// --- sweep files --------------------------------------------------------------
//
// Extends the key=value config schema with: sweep (variable name), grid
// (comma-separated, strictly increasing), outputs (comma-separated column
// names), and optionally trials, seed, zeta, codebook_policy.

inline ExperimentSpec parse_experiment_kv(const std::map<std::string, std::string>& kv) {
    ExperimentSpec spec;
    spec.n_a = static_cast<int>(kv_number(kv, "n_a"));
    spec.n_b = static_cast<int>(kv_number(kv, "n_b"));
    spec.n_e = static_cast<int>(kv_number(kv, "n_e"));
    const bool has_alpha = kv.count("alpha") > 0;
    const bool has_ptotal = kv.count("p_total") > 0;
    if (has_alpha == has_ptotal)
        throw DomainError("sweep file must set exactly one of alpha / p_total");
    spec.use_p_total = has_ptotal;
    if (has_ptotal)
        spec.p_total = kv_number(kv, "p_total");
    else
        spec.alpha = kv_number(kv, "alpha");
    spec.beta = kv_number_or(kv, "beta", 1.0);
    spec.gamma = kv_number_or(kv, "gamma", 1.0);
    spec.feedback_bits = static_cast<int>(kv_number_or(kv, "feedback_bits", 0));
    spec.trials = static_cast<std::uint64_t>(kv_number_or(kv, "trials", 100000));
    spec.seed = static_cast<std::uint64_t>(kv_number_or(kv, "seed", 12345));
    spec.zeta = kv_number_or(kv, "zeta", 0.5);

    const auto sweep_it = kv.find("sweep");
    if (sweep_it == kv.end()) throw DomainError("sweep file missing key: sweep");
    spec.sweep = sweep_variable_from_name(sweep_it->second);

    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::string item;
        std::istringstream in(s);
        while (std::getline(in, item, ',')) {
            const auto b = item.find_first_not_of(" \t");
            const auto e = item.find_last_not_of(" \t");
            if (b == std::string::npos) throw DomainError("empty list item in: " + s);
            parts.push_back(item.substr(b, e - b + 1));
        }
        return parts;
    };

    const auto grid_it = kv.find("grid");
    if (grid_it == kv.end()) throw DomainError("sweep file missing key: grid");
    for (const std::string& part : split(grid_it->second)) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(part, &pos);
        } catch (const std::exception&) {
            throw DomainError("grid: not a number: " + part);
        }
        if (pos != part.size()) throw DomainError("grid: trailing characters in " + part);
        spec.grid.push_back(v);
    }

    const auto outputs_it = kv.find("outputs");
    if (outputs_it == kv.end()) throw DomainError("sweep file missing key: outputs");
    for (const std::string& part : split(outputs_it->second))
        spec.outputs.push_back(output_column_from_name(part));

    if (const auto it = kv.find("codebook_policy"); it != kv.end()) {
        if (it->second == "fresh_per_trial")
            spec.codebook_policy = LossCodebookPolicy::fresh_per_trial;
        else if (it->second == "fixed_sphere")
            spec.codebook_policy = LossCodebookPolicy::fixed_sphere;
        else
            throw DomainError("codebook_policy must be fresh_per_trial or fixed_sphere");
    }

    static const char* known[] = {"n_a",   "n_b",     "n_e",   "alpha",         "p_total",
                                  "beta",  "gamma",   "feedback_bits", "trials", "seed",
                                  "zeta",  "sweep",   "grid",  "outputs",       "codebook_policy"};
    for (const auto& [key, value] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw DomainError("unknown sweep file key: " + key);
    }

    spec.validate();
    return spec;
}

inline ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sweep file: " + path);
    ExperimentSpec spec = parse_experiment_kv(parse_kv_text(in));
    const auto slash = path.find_last_of('/');
    spec.label = slash == std::string::npos ? path : path.substr(slash + 1);
    return spec;
}

// --- output files ------------------------------------------------------------

inline std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_to_string(const ExperimentResult& result) {
    std::string out;
    for (std::size_t i = 0; i < result.names.size(); ++i) {
        if (i) out += ",";
        out += result.names[i];
    }
    out += "\n";
    for (std::size_t i = 0; i < result.units.size(); ++i) {
        if (i) out += ",";
        out += result.units[i];
    }
    out += "\n";
    for (const auto& row : result.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += format_cell(row[i]);
        }
        out += "\n";
    }
    return out;
}

inline std::string meta_to_string(const ExperimentResult& result) {
    std::string out;
    for (const auto& [key, value] : result.meta) {
        out += key;
        out += "=";
        out += value;
        out += "\n";
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Writes <out_dir>/<stem>.csv and <out_dir>/<stem>.meta.
inline void write_result_files(const ExperimentResult& result, const std::string& out_dir,
                               const std::string& stem) {
    write_text_file(out_dir + "/" + stem + ".csv", csv_to_string(result));
    write_text_file(out_dir + "/" + stem + ".meta", meta_to_string(result));
}

}  // namespace anmimo
