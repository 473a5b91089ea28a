#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "anmimo/anmimo.hpp"

namespace {

void print_table(const anmimo::ExperimentResult& result) {
    if (result.rows.size() > 40) {
        std::cout << "(" << result.rows.size() << " rows, table omitted)\n";
        return;
    }
    std::vector<std::size_t> widths(result.names.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < result.names.size(); ++i) widths[i] = result.names[i].size();
    for (const auto& row : result.rows) {
        std::vector<std::string> line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", row[i]);
            line.emplace_back(buf);
            widths[i] = std::max(widths[i], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    auto emit = [&](const std::vector<std::string>& line) {
        for (std::size_t i = 0; i < line.size(); ++i)
            std::cout << (i ? "  " : "") << std::string(widths[i] - line[i].size(), ' ')
                      << line[i];
        std::cout << "\n";
    };
    emit(result.names);
    emit(cells.empty() ? result.names : cells.front());
    for (std::size_t r = 1; r < cells.size(); ++r) emit(cells[r]);
}

void write_and_report(const anmimo::ExperimentResult& result, const std::string& out_dir,
                      const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    anmimo::write_result_files(result, out_dir, stem);
    std::cout << "wrote " << out_dir << "/" << stem << ".csv (" << result.rows.size()
              << " rows, " << result.names.size() << " columns)\n";
    std::cout << "wrote " << out_dir << "/" << stem << ".meta\n";
}

struct SelftestReport {
    int failures = 0;

    void check(const std::string& name, bool ok, const std::string& detail) {
        std::cout << "selftest " << name << ": " << (ok ? "PASS" : "FAIL") << " (" << detail
                  << ")\n";
        if (!ok) ++failures;
    }
};

int run_selftest(std::uint64_t seed, unsigned threads) {
    using namespace anmimo;
    SelftestReport report;
    char detail[160];

    {
        const double got = theta_capacity(1, 1, 1.0);
        const double want = 0.86034738227088595;
        std::snprintf(detail, sizeof detail, "theta(1,1,1) = %.12f, expected %.12f", got, want);
        report.check("siso_capacity", std::fabs(got - want) < 1e-9, detail);
    }
    {
        // Gamma(a+1,b) = a*Gamma(a,b) + b^a e^{-b}, checked across signs of a
        bool ok = true;
        double worst = 0.0;
        for (int a = -6; a <= 6; ++a) {
            for (double b : {0.25, 1.0, 4.0}) {
                const double lhs = upper_incomplete_gamma(a + 1, b);
                const double rhs =
                    a * upper_incomplete_gamma(a, b) + std::pow(b, a) * std::exp(-b);
                const double rel = std::fabs(lhs - rhs) / std::max(1e-300, std::fabs(lhs));
                worst = std::max(worst, rel);
                ok = ok && rel < 1e-9;
            }
        }
        std::snprintf(detail, sizeof detail, "recurrence worst rel err %.2e", worst);
        report.check("incomplete_gamma_recurrence", ok, detail);
    }
    {
        const double closed = theta_capacity(2, 4, 1.0);
        const MCEstimate mc = wishart_capacity_mc(2, 4, 1.0, 20000, seed, threads);
        const double dev = std::fabs(mc.mean - closed);
        std::snprintf(detail, sizeof detail, "closed %.6f vs MC %.6f +/- %.6f", closed, mc.mean,
                      mc.std_err);
        report.check("wishart_capacity_mc", dev < 4.0 * mc.std_err, detail);
    }
    {
        SystemConfig cfg;
        cfg.n_a = 4;
        cfg.n_b = 2;
        cfg.n_e = 2;
        cfg.alpha = 1.0;
        cfg.beta = 1.0;
        cfg.gamma = 1.0;
        const DerivedDims dims = derive_dims(cfg);
        const double direct = theta_capacity(dims.nhat_min, dims.nhat_max, cfg.alpha);
        const double via_omega = omega_term(cfg);
        std::snprintf(detail, sizeof detail, "omega %.12f vs theta %.12f", via_omega, direct);
        report.check("omega_equal_power_branch", via_omega == direct, detail);
    }
    {
        const MCEstimate d_hat = estimate_distortion(2, 1, 6, 4000, seed, threads);
        const double lo = distortion_bound_mu(2, 1, 64.0);
        const double hi = distortion_bound_eta(2, 1, 64.0);
        const bool ok = lo <= d_hat.mean + 3.0 * d_hat.std_err &&
                        d_hat.mean - 3.0 * d_hat.std_err <= hi;
        std::snprintf(detail, sizeof detail, "mu %.5f <= D %.5f +/- %.5f <= eta %.5f", lo,
                      d_hat.mean, d_hat.std_err, hi);
        report.check("distortion_sandwich", ok, detail);
    }
    {
        SystemConfig cfg;
        cfg.n_a = 2;
        cfg.n_b = 1;
        cfg.n_e = 1;
        cfg.alpha = 1.0;
        cfg.beta = 1.0;
        cfg.gamma = 1.0;
        cfg.feedback_bits = 4;
        const MCEstimate a = mc_ergodic(cfg, ErgodicQuantity::rate_loss, 2000, seed,
                                        CodebookPolicy::fresh(), 1);
        const MCEstimate b = mc_ergodic(cfg, ErgodicQuantity::rate_loss, 2000, seed,
                                        CodebookPolicy::fresh(), 2);
        std::snprintf(detail, sizeof detail, "1 thread %.17g vs 2 threads %.17g", a.mean, b.mean);
        report.check("thread_determinism", a.mean == b.mean && a.std_err == b.std_err, detail);
    }
    {
        SystemConfig cfg;
        cfg.n_a = 4;
        cfg.n_b = 2;
        cfg.n_e = 2;
        cfg.alpha = 1.0;
        cfg.beta = 1.0;
        cfg.gamma = 1.0;
        cfg.feedback_bits = 3;
        Rng rng = trial_rng(seed, 7);
        const ChannelRealization ch = sample_channels(cfg, rng);
        const SvdBasis basis = svd_right_basis(ch.h);
        Codebook cb = build_rvq_codebook(cfg.n_a, cfg.n_b, cfg.feedback_bits, rng);
        cb.entries[5] = basis.v_tilde;
        const double rs = secrecy_rate_perfect(cfg, ch);
        const double rsq = secrecy_rate_quantized(cfg, ch, cb);
        std::snprintf(detail, sizeof detail, "|R_SQ - R_S| = %.2e with exact codeword present",
                      std::fabs(rsq - rs));
        report.check("exact_quantization_identity", std::fabs(rsq - rs) < 1e-8, detail);
    }

    std::cout << (report.failures == 0 ? "selftest: all checks passed\n"
                                       : "selftest: FAILURES present\n");
    return report.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"artificial-noise MIMOME wiretap experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 12345;
    std::uint64_t trials = 0;
    std::string out_dir = "out";
    unsigned threads = 0;
    app.add_option("--seed", seed, "base RNG seed")->capture_default_str();
    app.add_option("--trials", trials, "Monte Carlo trials per point (0 = preset/file default)")
        ->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();

    std::string figure_id;
    CLI::App* figure = app.add_subcommand("figure", "reproduce a figure preset (fig1..fig4)");
    figure->add_option("id", figure_id, "preset id")->required();

    std::string sweep_file;
    CLI::App* sweep = app.add_subcommand("sweep", "run a sweep described by a key=value file");
    sweep->add_option("spec-file", sweep_file, "sweep spec file")->required();

    CLI::App* codebook = app.add_subcommand("codebook", "codebook utilities");
    codebook->require_subcommand(1);
    std::string cb_kind = "rvq";
    int cb_bits = 4;
    int cb_n_a = 2;
    int cb_n_b = 1;
    std::string cb_file;
    CLI::App* cb_export = codebook->add_subcommand("export", "write a codebook as text");
    cb_export->add_option("--kind", cb_kind, "rvq or sphere")->capture_default_str();
    cb_export->add_option("--bits", cb_bits, "feedback bits B")->capture_default_str();
    cb_export->add_option("--n-a", cb_n_a, "transmit antennas")->capture_default_str();
    cb_export->add_option("--n-b", cb_n_b, "codeword columns")->capture_default_str();
    cb_export->add_option("--file", cb_file, "output path (default under --out)");

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (figure->parsed()) {
            const anmimo::ExperimentResult result =
                anmimo::run_figure_preset(figure_id, seed, trials, threads);
            print_table(result);
            write_and_report(result, out_dir, figure_id);
            return 0;
        }
        if (sweep->parsed()) {
            anmimo::ExperimentSpec spec = anmimo::load_experiment_file(sweep_file);
            if (app.count("--seed")) spec.seed = seed;
            if (trials) spec.trials = trials;
            const anmimo::ExperimentResult result = anmimo::run_experiment(spec, threads);
            print_table(result);
            std::string stem = std::filesystem::path(sweep_file).stem().string();
            if (stem.empty()) stem = "sweep";
            write_and_report(result, out_dir, stem);
            return 0;
        }
        if (cb_export->parsed()) {
            anmimo::Codebook cb;
            if (cb_kind == "rvq") {
                anmimo::Rng rng(seed);
                cb = anmimo::build_rvq_codebook(cb_n_a, cb_n_b, cb_bits, rng);
            } else if (cb_kind == "sphere") {
                if (cb_n_a != 2 || cb_n_b != 1)
                    throw anmimo::DomainError("sphere codebook requires --n-a 2 --n-b 1");
                cb = anmimo::build_sphere_codebook(cb_bits);
            } else {
                throw anmimo::DomainError("--kind must be rvq or sphere");
            }
            std::string path = cb_file;
            if (path.empty()) {
                std::filesystem::create_directories(out_dir);
                path = out_dir + "/codebook_" + cb_kind + "_" + std::to_string(cb_n_a) + "x" +
                       std::to_string(cb_n_b) + "_b" + std::to_string(cb_bits) + ".txt";
            }
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write file: " + path);
            anmimo::write_codebook(out, cb);
            if (!out) throw std::runtime_error("write failed: " + path);
            std::cout << "wrote " << path << " (" << cb.entries.size() << " entries)\n";
            return 0;
        }
        if (selftest->parsed()) return run_selftest(seed, threads);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
