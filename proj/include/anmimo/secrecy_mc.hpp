#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "anmimo/common.hpp"
#include "anmimo/matrix_rand.hpp"
#include "anmimo/parallel.hpp"
#include "anmimo/quantizer.hpp"
#include "anmimo/rng.hpp"
#include "anmimo/system_model.hpp"

namespace anmimo {

struct ChannelRealization {
    CMatrix h;  // n_b x n_a, Bob
    CMatrix g;  // n_e x n_a, Eve
};

inline ChannelRealization sample_channels(const SystemConfig& cfg, Rng& rng) {
    return {sample_gaussian(cfg.n_b, cfg.n_a, rng), sample_gaussian(cfg.n_e, cfg.n_a, rng)};
}

// Instantaneous secrecy rate with perfect feedback: Bob's capacity term plus
// the AN-only Eve term minus Eve's full observation term. May be negative
// for individual realizations; nothing is clipped here.
inline double secrecy_rate_perfect(const SystemConfig& cfg, const ChannelRealization& ch) {
    cfg.validate();
    const SvdBasis basis = svd_right_basis(ch.h);
    const CMatrix gv = ch.g * basis.v_tilde;
    const CMatrix gz = ch.g * basis.z;
    const double bob = log_det_eye_plus(cfg.alpha * cfg.gamma * (ch.h * ch.h.adjoint()));
    const double eve_an = log_det_eye_plus(cfg.alpha * cfg.beta * (gz * gz.adjoint()));
    const double eve_all = log_det_eye_plus(cfg.alpha * (gv * gv.adjoint()) +
                                            cfg.alpha * cfg.beta * (gz * gz.adjoint()));
    return bob + eve_an - eve_all;
}

namespace detail {

// Both sides' log-ratio terms for a given quantized information basis; the
// AN basis is the unitary completion of the codeword, and its leakage into
// Bob's channel is treated as noise.
inline double secrecy_rate_quantized_given(const SystemConfig& cfg, const ChannelRealization& ch,
                                           const CMatrix& codeword) {
    const CMatrix v_hat = gram_schmidt_complete(codeword);
    const auto z_hat = v_hat.rightCols(cfg.n_a - cfg.n_b);
    const CMatrix hv = ch.h * codeword;
    const CMatrix hz = ch.h * z_hat;
    const CMatrix gv = ch.g * codeword;
    const CMatrix gz = ch.g * z_hat;
    const double abg = cfg.alpha * cfg.beta * cfg.gamma;
    const double bob = log_det_eye_plus(cfg.alpha * cfg.gamma * (hv * hv.adjoint()) +
                                        abg * (hz * hz.adjoint())) -
                       log_det_eye_plus(abg * (hz * hz.adjoint()));
    const double eve = log_det_eye_plus(cfg.alpha * (gv * gv.adjoint()) +
                                        cfg.alpha * cfg.beta * (gz * gz.adjoint())) -
                       log_det_eye_plus(cfg.alpha * cfg.beta * (gz * gz.adjoint()));
    return bob - eve;
}

}  // namespace detail

inline double secrecy_rate_quantized(const SystemConfig& cfg, const ChannelRealization& ch,
                                     const Codebook& cb) {
    cfg.validate();
    if (cb.n_a != cfg.n_a || cb.n_b != cfg.n_b)
        throw DomainError("secrecy_rate_quantized: codebook shape mismatch");
    const SvdBasis basis = svd_right_basis(ch.h);
    const QuantizationResult q = quantize(cb, basis.v_tilde);
    return detail::secrecy_rate_quantized_given(cfg, ch, q.codeword);
}

enum class ErgodicQuantity {
    rate_perfect,
    rate_quantized,
    rate_loss,
    bob_capacity_term,
    eve_omega_term,
};

// Selects the codebook the quantized-CSI quantities run against: a fresh RVQ
// draw per trial (the expectation convention of the analytic bounds) or one
// fixed codebook shared by all trials.
struct CodebookPolicy {
    enum class Kind { fresh_per_trial, fixed };
    Kind kind = Kind::fresh_per_trial;
    const Codebook* codebook = nullptr;

    static CodebookPolicy fresh() { return {}; }
    static CodebookPolicy fixed(const Codebook& cb) {
        CodebookPolicy p;
        p.kind = Kind::fixed;
        p.codebook = &cb;
        return p;
    }
};

namespace detail {

// Winning codeword of a fresh 2^B RVQ codebook against basis.v_tilde.
// Exact-law sampling where the distance law is known; otherwise the
// codebook is streamed without materialization.
inline CMatrix fresh_rvq_codeword(const SystemConfig& cfg, const SvdBasis& basis, Rng& rng) {
    if (min_distance_law_available(cfg.n_a, cfg.n_b)) {
        const double d2 = sample_min_distance_sq(cfg.n_a, cfg.n_b, cfg.feedback_bits, rng);
        return sample_quantized_codeword(basis.v_tilde, basis.z, d2, rng);
    }
    const std::uint64_t count = cfg.codebook_size();
    if (count > kCodebookEntryCap)
        throw DomainError("fresh_rvq_codeword: streamed codebook exceeds entry cap 2^24");
    CMatrix best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < count; ++k) {
        CMatrix cand = sample_haar_semiunitary(cfg.n_a, cfg.n_b, rng);
        const double d = chordal_distance_sq(cand, basis.v_tilde);
        if (d < best_d) {
            best_d = d;
            best = std::move(cand);
        }
    }
    return best;
}

inline CMatrix policy_codeword(const SystemConfig& cfg, const SvdBasis& basis,
                               const CodebookPolicy& policy, Rng& rng) {
    if (policy.kind == CodebookPolicy::Kind::fixed) {
        if (policy.codebook == nullptr) throw DomainError("CodebookPolicy: missing fixed codebook");
        return quantize(*policy.codebook, basis.v_tilde).codeword;
    }
    return fresh_rvq_codeword(cfg, basis, rng);
}

// Raw value plus its max(rate, 0)-clipped companion for one realization.
inline std::pair<double, double> ergodic_sample(const SystemConfig& cfg, ErgodicQuantity quantity,
                                                const CodebookPolicy& policy, Rng& rng) {
    const ChannelRealization ch = sample_channels(cfg, rng);
    switch (quantity) {
        case ErgodicQuantity::bob_capacity_term: {
            const double v = log_det_eye_plus(cfg.alpha * cfg.gamma * (ch.h * ch.h.adjoint()));
            return {v, v};
        }
        case ErgodicQuantity::eve_omega_term: {
            const SvdBasis basis = svd_right_basis(ch.h);
            const CMatrix gv = ch.g * basis.v_tilde;
            const CMatrix gz = ch.g * basis.z;
            const double v = log_det_eye_plus(cfg.alpha * (gv * gv.adjoint()) +
                                              cfg.alpha * cfg.beta * (gz * gz.adjoint()));
            return {v, v};
        }
        case ErgodicQuantity::rate_perfect: {
            const double v = secrecy_rate_perfect(cfg, ch);
            return {v, std::max(v, 0.0)};
        }
        case ErgodicQuantity::rate_quantized: {
            const SvdBasis basis = svd_right_basis(ch.h);
            const CMatrix codeword = policy_codeword(cfg, basis, policy, rng);
            const double v = secrecy_rate_quantized_given(cfg, ch, codeword);
            return {v, std::max(v, 0.0)};
        }
        case ErgodicQuantity::rate_loss: {
            // both rates on the same realization: common random numbers
            const SvdBasis basis = svd_right_basis(ch.h);
            const CMatrix gv = ch.g * basis.v_tilde;
            const CMatrix gz = ch.g * basis.z;
            const double bob = log_det_eye_plus(cfg.alpha * cfg.gamma * (ch.h * ch.h.adjoint()));
            const double eve_an = log_det_eye_plus(cfg.alpha * cfg.beta * (gz * gz.adjoint()));
            const double eve_all = log_det_eye_plus(cfg.alpha * (gv * gv.adjoint()) +
                                                    cfg.alpha * cfg.beta * (gz * gz.adjoint()));
            const double rs = bob + eve_an - eve_all;
            const CMatrix codeword = policy_codeword(cfg, basis, policy, rng);
            const double rsq = secrecy_rate_quantized_given(cfg, ch, codeword);
            return {rs - rsq, std::max(rs, 0.0) - std::max(rsq, 0.0)};
        }
    }
    throw DomainError("mc_ergodic: unknown quantity");
}

}  // namespace detail

// Mean and standard error of one ergodic quantity; .first is the raw
// convention, .second clips each realization's rate at zero first.
inline std::pair<MCEstimate, MCEstimate> mc_ergodic_pair(
    const SystemConfig& cfg, ErgodicQuantity quantity, std::uint64_t trials, std::uint64_t seed,
    const CodebookPolicy& policy = CodebookPolicy::fresh(), unsigned threads = 0) {
    cfg.validate();
    if (trials < 2) throw DomainError("mc_ergodic: need trials >= 2");
    std::vector<std::pair<double, double>> values(trials);
    parallel_for(trials, threads, [&](std::uint64_t i) {
        Rng rng = trial_rng(seed, i);
        values[i] = detail::ergodic_sample(cfg, quantity, policy, rng);
    });
    auto reduce = [&](auto select) {
        double mean = 0.0;
        for (const auto& v : values) mean += select(v);
        mean /= static_cast<double>(trials);
        double ss = 0.0;
        for (const auto& v : values) {
            const double d = select(v) - mean;
            ss += d * d;
        }
        MCEstimate est;
        est.mean = mean;
        est.std_err =
            std::sqrt(ss / (static_cast<double>(trials) - 1.0) / static_cast<double>(trials));
        est.trials = trials;
        est.seed = seed;
        return est;
    };
    return {reduce([](const auto& v) { return v.first; }),
            reduce([](const auto& v) { return v.second; })};
}

inline MCEstimate mc_ergodic(const SystemConfig& cfg, ErgodicQuantity quantity,
                             std::uint64_t trials, std::uint64_t seed,
                             const CodebookPolicy& policy = CodebookPolicy::fresh(),
                             unsigned threads = 0) {
    return mc_ergodic_pair(cfg, quantity, trials, seed, policy, threads).first;
}

// E[log2 det(I_m + x H H^H)] for H an m x n complex Gaussian matrix: the
// Monte Carlo twin of theta_capacity, also serving as the reduced-antenna
// override for Bob's capacity term.
inline MCEstimate wishart_capacity_mc(int m, int n, double x, std::uint64_t trials,
                                      std::uint64_t seed, unsigned threads = 0) {
    if (m < 1 || n < 1) throw DomainError("wishart_capacity_mc: need m, n >= 1");
    if (!(x >= 0.0)) throw DomainError("wishart_capacity_mc: need x >= 0");
    return mc_reduce(trials, seed, threads, [&](std::uint64_t i) {
        Rng rng = trial_rng(seed, i);
        const CMatrix h = sample_gaussian(m, n, rng);
        return log_det_eye_plus(x * (h * h.adjoint()));
    });
}

// Mean Frobenius norm of H * Z_hat, the AN leakage into Bob's channel under
// quantized feedback.
inline MCEstimate an_leakage_norm_mc(const SystemConfig& cfg, std::uint64_t trials,
                                     std::uint64_t seed,
                                     const CodebookPolicy& policy = CodebookPolicy::fresh(),
                                     unsigned threads = 0) {
    cfg.validate();
    return mc_reduce(trials, seed, threads, [&](std::uint64_t i) {
        Rng rng = trial_rng(seed, i);
        const ChannelRealization ch = sample_channels(cfg, rng);
        const SvdBasis basis = svd_right_basis(ch.h);
        const CMatrix codeword = detail::policy_codeword(cfg, basis, policy, rng);
        const CMatrix v_hat = gram_schmidt_complete(codeword);
        return (ch.h * v_hat.rightCols(cfg.n_a - cfg.n_b)).norm();
    });
}

}  // namespace anmimo
