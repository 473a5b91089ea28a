#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "anmimo/common.hpp"
#include "anmimo/matrix_rand.hpp"
#include "anmimo/parallel.hpp"
#include "anmimo/rng.hpp"
#include "anmimo/special_functions.hpp"

namespace anmimo {

inline constexpr std::uint64_t kCodebookEntryCap = std::uint64_t{1} << 24;

struct Codebook {
    enum class Kind { rvq, sphere };
    std::vector<CMatrix> entries;
    int n_a = 0;
    int n_b = 0;
    int feedback_bits = 0;
    Kind kind = Kind::rvq;
};

struct QuantizationResult {
    int index = 0;  // 1-based position in the codebook
    CMatrix codeword;
    double distance_sq = 0.0;
};

struct Precoder {
    CMatrix v_hat;  // n_a x n_a unitary, [info_block | an_block]
    int n_b = 0;
    auto info_block() const { return v_hat.leftCols(n_b); }
    auto an_block() const { return v_hat.rightCols(v_hat.cols() - n_b); }
};

// Squared chordal distance p - ||a^H b||_F^2 between the column spans of
// two n x p semi-unitary matrices.
inline double chordal_distance_sq(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DomainError("chordal_distance_sq: shape mismatch");
    const double d = static_cast<double>(a.cols()) - (a.adjoint() * b).squaredNorm();
    return std::clamp(d, 0.0, static_cast<double>(a.cols()));
}

inline Codebook build_rvq_codebook(int n_a, int n_b, int feedback_bits, Rng& rng) {
    if (n_b >= n_a || n_b < 1) throw DomainError("build_rvq_codebook: need 1 <= n_b < n_a");
    if (feedback_bits < 0) throw DomainError("build_rvq_codebook: need feedback_bits >= 0");
    const std::uint64_t count = std::uint64_t{1} << feedback_bits;
    if (count > kCodebookEntryCap) throw DomainError("build_rvq_codebook: exceeds entry cap 2^24");
    Codebook cb;
    cb.n_a = n_a;
    cb.n_b = n_b;
    cb.feedback_bits = feedback_bits;
    cb.kind = Codebook::Kind::rvq;
    cb.entries.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i)
        cb.entries.push_back(sample_haar_semiunitary(n_a, n_b, rng));
    return cb;
}

// Deterministic codebook on the Grassmannian of lines in C^2: a rectangular
// grid over the sphere parameterization (t, phi) with 2^floor(B/2) polar
// levels and 2^ceil(B/2) phases.
inline Codebook build_sphere_codebook(int feedback_bits) {
    if (feedback_bits < 1) throw DomainError("build_sphere_codebook: need feedback_bits >= 1");
    const std::uint64_t count = std::uint64_t{1} << feedback_bits;
    if (count > kCodebookEntryCap) throw DomainError("build_sphere_codebook: exceeds entry cap 2^24");
    const double n_phase = std::pow(2.0, std::ceil(feedback_bits / 2.0));
    const double n_polar = std::pow(2.0, std::floor(feedback_bits / 2.0));
    Codebook cb;
    cb.n_a = 2;
    cb.n_b = 1;
    cb.feedback_bits = feedback_bits;
    cb.kind = Codebook::Kind::sphere;
    cb.entries.reserve(count);
    for (std::uint64_t i = 1; i <= count; ++i) {
        const double level = std::ceil(static_cast<double>(i) / n_phase);
        const double t = -1.0 + (2.0 * level - 1.0) / n_polar;
        const double phi =
            2.0 * M_PI * static_cast<double>(i % static_cast<std::uint64_t>(n_phase)) / n_phase;
        const double half = 0.5 * std::acos(t);
        CMatrix e(2, 1);
        e(0, 0) = std::cos(half);
        e(1, 0) = std::polar(std::sin(half), phi);
        cb.entries.push_back(e);
    }
    return cb;
}

inline QuantizationResult quantize(const Codebook& cb, const CMatrix& v_tilde) {
    if (cb.entries.empty()) throw DomainError("quantize: empty codebook");
    if (v_tilde.rows() != cb.n_a || v_tilde.cols() != cb.n_b)
        throw DomainError("quantize: shape mismatch with codebook");
    QuantizationResult best;
    best.index = 1;
    best.distance_sq = chordal_distance_sq(cb.entries[0], v_tilde);
    for (std::size_t i = 1; i < cb.entries.size(); ++i) {
        const double d = chordal_distance_sq(cb.entries[i], v_tilde);
        if (d < best.distance_sq) {  // strict: ties keep the lowest index
            best.distance_sq = d;
            best.index = static_cast<int>(i + 1);
        }
    }
    best.codeword = cb.entries[best.index - 1];
    return best;
}

inline Precoder assemble_precoder(const QuantizationResult& q) {
    Precoder p;
    p.v_hat = gram_schmidt_complete(q.codeword);
    p.n_b = static_cast<int>(q.codeword.cols());
    return p;
}

// --- analytic distortion bounds ---------------------------------------------

// Ball-volume constant of the complex Grassmannian G(n, p).
inline double ball_constant_c(int n, int p) {
    if (p < 1 || p >= n) throw DomainError("ball_constant_c: need 1 <= p < n");
    const int t = p * (n - p);
    double prod = 1.0;
    if (n >= 2 * p) {
        for (int i = 1; i <= p; ++i) prod *= detail::factorial(n - i) / detail::factorial(p - i);
    } else {
        for (int i = 1; i <= n - p; ++i)
            prod *= detail::factorial(n - i) / detail::factorial(n - p - i);
    }
    return prod / detail::factorial(t);
}

// Upper bound on the expected squared chordal distortion of a size-K random
// codebook; zeta in (0, 1) trades the two terms.
inline double distortion_bound_eta(int n, int p, double codebook_size, double zeta = 0.5) {
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("distortion_bound_eta: need 0 < zeta < 1");
    if (!(codebook_size >= 1.0)) throw DomainError("distortion_bound_eta: need codebook_size >= 1");
    const double t = p * (n - p);
    const double kc = codebook_size * ball_constant_c(n, p);
    return std::tgamma(1.0 / t) / t * std::pow(kc, -1.0 / t) +
           p * std::exp(-std::pow(kc, 1.0 - zeta));
}

// Matching lower bound.
inline double distortion_bound_mu(int n, int p, double codebook_size) {
    if (!(codebook_size >= 1.0)) throw DomainError("distortion_bound_mu: need codebook_size >= 1");
    const double t = p * (n - p);
    const double kc = codebook_size * ball_constant_c(n, p);
    return t / (t + 1.0) * std::pow(kc, -1.0 / t);
}

// Expected squared distortion of RVQ by brute force: a fresh codebook and a
// fresh Haar source per trial (the expectation is over both).
inline MCEstimate estimate_distortion(int n_a, int n_b, int feedback_bits, std::uint64_t trials,
                                      std::uint64_t seed, unsigned threads = 0) {
    if (trials < 1) throw DomainError("estimate_distortion: need trials >= 1");
    const std::uint64_t count = std::uint64_t{1} << feedback_bits;
    if (count > kCodebookEntryCap) throw DomainError("estimate_distortion: exceeds entry cap 2^24");
    return mc_reduce(trials, seed, threads, [&](std::uint64_t i) {
        Rng rng = trial_rng(seed, i);
        const CMatrix v = sample_haar_semiunitary(n_a, n_b, rng);
        double best = static_cast<double>(n_b);
        for (std::uint64_t k = 0; k < count; ++k) {
            const CMatrix cand = sample_haar_semiunitary(n_a, n_b, rng);
            best = std::min(best, chordal_distance_sq(cand, v));
        }
        return best;
    });
}

// --- exact-law RVQ sampling --------------------------------------------------
//
// For the shapes below, the squared chordal distance between one Haar
// codeword and a fixed p-plane has a known CDF, so the minimum over 2^B
// i.i.d. codewords can be drawn by inverse transform and the winning
// codeword reconstructed conditionally. This is distribution-exact and
// replaces 2^B Haar draws per trial with O(1) work; the brute-force path
// above remains both as fallback for other shapes and as the oracle the
// equivalence tests compare against.

inline bool min_distance_law_available(int n_a, int n_b) {
    if (n_b == 1 && n_a >= 2) return true;
    return n_a == 4 && n_b == 2;
}

namespace detail {

// CDF of the squared chordal distance from one Haar sample to a fixed plane:
// lines in C^n: F(x) = x^{n-1} on [0,1];
// G(4,2):       F(x) = x^4/2 on [0,1], 1 - (2-x)^4/2 on (1,2].
inline double min_distance_icdf(int n_a, int n_b, double y) {
    if (n_b == 1) return std::pow(y, 1.0 / (n_a - 1));
    if (y <= 0.5) return std::pow(2.0 * y, 0.25);
    return 2.0 - std::pow(2.0 * (1.0 - y), 0.25);
}

}  // namespace detail

// Minimum squared chordal distance from a fixed plane to the best of 2^B
// i.i.d. Haar codewords, drawn from its exact law.
inline double sample_min_distance_sq(int n_a, int n_b, int feedback_bits, Rng& rng) {
    if (!min_distance_law_available(n_a, n_b))
        throw DomainError("sample_min_distance_sq: no closed-form law for this shape");
    const double k = std::pow(2.0, feedback_bits);
    const double u = rng.uniform();
    // y = 1 - (1-u)^{1/K}, the minimum's CDF inverted through the single-draw law
    const double y = -std::expm1(std::log1p(-u) / k);
    return detail::min_distance_icdf(n_a, n_b, std::clamp(y, 0.0, 1.0));
}

// Reconstructs the selected codeword given its squared distance to the
// reference plane: principal-angle magnitudes carry the distance, all
// remaining factors of the CS decomposition against [v_tilde | z] are Haar.
inline CMatrix sample_quantized_codeword(const CMatrix& v_tilde, const CMatrix& z,
                                         double distance_sq, Rng& rng) {
    const int n_a = static_cast<int>(v_tilde.rows());
    const int n_b = static_cast<int>(v_tilde.cols());
    if (z.rows() != n_a || z.cols() != n_a - n_b)
        throw DomainError("sample_quantized_codeword: complement shape mismatch");
    if (n_b == 1) {
        const double c = std::sqrt(std::max(0.0, 1.0 - distance_sq));
        const double s = std::sqrt(std::max(0.0, distance_sq));
        const double psi = 2.0 * M_PI * rng.uniform();
        CVector w(n_a - 1);
        double norm = 0.0;
        do {
            for (int i = 0; i < n_a - 1; ++i) w(i) = rng.complex_gaussian();
            norm = w.norm();
        } while (norm < 1e-12);
        return std::polar(c, psi) * v_tilde + (s / norm) * (z * w);
    }
    if (n_a == 4 && n_b == 2) {
        // cos^2 of the two principal angles: sum fixed by the distance, the
        // gap u = lambda1 - lambda2 has density 3u^2 / m^3 on [0, m]
        const double sum = 2.0 - distance_sq;
        const double m = std::min(sum, 2.0 - sum);
        const double u = m * std::cbrt(rng.uniform());
        const double l1 = std::clamp(0.5 * (sum + u), 0.0, 1.0);
        const double l2 = std::clamp(0.5 * (sum - u), 0.0, 1.0);
        const CMatrix u1 = sample_haar_semiunitary(2, 2, rng);
        const CMatrix u2 = sample_haar_semiunitary(2, 2, rng);
        const CMatrix v1 = sample_haar_semiunitary(2, 2, rng);
        Eigen::Vector2d cosines(std::sqrt(l1), std::sqrt(l2));
        Eigen::Vector2d sines(std::sqrt(1.0 - l1), std::sqrt(1.0 - l2));
        return v_tilde * (u1 * cosines.asDiagonal() * v1.adjoint()) +
               z * (u2 * sines.asDiagonal() * v1.adjoint());
    }
    throw DomainError("sample_quantized_codeword: no closed-form law for this shape");
}

// --- codebook text format ----------------------------------------------------
//
// Line 1: "anmimo-codebook n_a n_b feedback_bits kind"
// Then per entry: a line "entry <1-based index>" followed by n_a rows of
// n_b "re im" pairs.

inline void write_codebook(std::ostream& out, const Codebook& cb) {
    out << "anmimo-codebook " << cb.n_a << ' ' << cb.n_b << ' ' << cb.feedback_bits << ' '
        << (cb.kind == Codebook::Kind::rvq ? "rvq" : "sphere") << '\n';
    out << std::setprecision(17);
    for (std::size_t e = 0; e < cb.entries.size(); ++e) {
        out << "entry " << e + 1 << '\n';
        const CMatrix& m = cb.entries[e];
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                if (j) out << ' ';
                out << m(i, j).real() << ' ' << m(i, j).imag();
            }
            out << '\n';
        }
    }
}

inline Codebook read_codebook(std::istream& in) {
    std::string magic, kind;
    Codebook cb;
    if (!(in >> magic >> cb.n_a >> cb.n_b >> cb.feedback_bits >> kind) ||
        magic != "anmimo-codebook")
        throw DomainError("read_codebook: bad header");
    if (kind == "rvq")
        cb.kind = Codebook::Kind::rvq;
    else if (kind == "sphere")
        cb.kind = Codebook::Kind::sphere;
    else
        throw DomainError("read_codebook: unknown kind " + kind);
    const std::uint64_t count = std::uint64_t{1} << cb.feedback_bits;
    cb.entries.reserve(count);
    for (std::uint64_t e = 0; e < count; ++e) {
        std::string tag;
        std::uint64_t index = 0;
        if (!(in >> tag >> index) || tag != "entry" || index != e + 1)
            throw DomainError("read_codebook: malformed entry header");
        CMatrix m(cb.n_a, cb.n_b);
        for (int i = 0; i < cb.n_a; ++i)
            for (int j = 0; j < cb.n_b; ++j) {
                double re = 0.0, im = 0.0;
                if (!(in >> re >> im)) throw DomainError("read_codebook: truncated entry");
                m(i, j) = {re, im};
            }
        cb.entries.push_back(std::move(m));
    }
    return cb;
}

}  // namespace anmimo
