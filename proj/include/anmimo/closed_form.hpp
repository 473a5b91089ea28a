#pragma once

#include <cmath>
#include <iostream>
#include <vector>

#include <Eigen/Dense>

#include "anmimo/common.hpp"
#include "anmimo/quantizer.hpp"
#include "anmimo/special_functions.hpp"
#include "anmimo/system_model.hpp"

namespace anmimo {

// E[log2 det(I_m + x W)] in bits for W ~ W_m(n, I), n >= m.
inline double theta_capacity(int m, int n, double x) {
    return wishart_capacity_nats(m, n, x) * kLog2E;
}

// The two distinct eigenvalues of diag(1/theta_i) with their multiplicities,
// descending. Defined only for beta != 1.
struct EigStructure {
    double mu1 = 0.0;
    double mu2 = 0.0;
    int m1 = 0;
    int m2 = 0;
};

inline EigStructure eig_structure(const SystemConfig& cfg) {
    if (!(cfg.beta > 0.0)) throw DomainError("eig_structure: need beta > 0");
    if (std::abs(cfg.beta - 1.0) < 1e-9)
        throw DomainError("eig_structure: beta = 1 has a single eigenvalue");
    EigStructure e;
    const double inv_a = 1.0 / cfg.alpha;
    const double inv_ab = 1.0 / (cfg.alpha * cfg.beta);
    if (inv_a > inv_ab) {  // beta > 1
        e.mu1 = inv_a;
        e.m1 = cfg.n_b;
        e.mu2 = inv_ab;
        e.m2 = cfg.n_a - cfg.n_b;
    } else {  // beta < 1
        e.mu1 = inv_ab;
        e.m1 = cfg.n_a - cfg.n_b;
        e.mu2 = inv_a;
        e.m2 = cfg.n_b;
    }
    return e;
}

struct OmegaDiagnostics {
    double max_condition = 0.0;
    bool condition_warning = false;
    bool clamped_falling_factorial = false;
};

namespace detail {

// Gamma_k(n) = prod_{i=1}^{k} (n - i)!, the normalization product of the
// ordered-eigenvalue density (no pi factor; that cancels in the expectation).
inline double gamma_k_product(int k, int n) {
    double g = 1.0;
    for (int i = 1; i <= k; ++i) g *= factorial(n - i);
    return g;
}

}  // namespace detail

// Eve's ergodic log-det term E[log2 det(I + alpha GV GV^H + alpha beta GZ GZ^H)]
// in bits: a weighted determinant expansion for beta != 1, the single-Wishart
// capacity for beta = 1 (guard band |beta-1| < 1e-9).
inline double omega_term(const SystemConfig& cfg, OmegaDiagnostics* diag = nullptr) {
    cfg.validate();
    if (!(cfg.beta > 0.0)) throw DomainError("omega_term: needs beta > 0");
    const DerivedDims dims = derive_dims(cfg);
    if (std::abs(cfg.beta - 1.0) < 1e-9)
        return theta_capacity(dims.nhat_min, dims.nhat_max, cfg.alpha);

    const EigStructure eig = eig_structure(cfg);
    const int n_a = cfg.n_a;
    const int n_e = cfg.n_e;
    const int nhat_min = dims.nhat_min;

    const double sign = (static_cast<long long>(n_e) * (n_a - nhat_min)) % 2 == 0 ? 1.0 : -1.0;
    const double k_const = sign / detail::gamma_k_product(nhat_min, n_e) *
                           std::pow(eig.mu1, eig.m1 * n_e) * std::pow(eig.mu2, eig.m2 * n_e) /
                           (detail::gamma_k_product(eig.m1, eig.m1) *
                            detail::gamma_k_product(eig.m2, eig.m2) *
                            std::pow(eig.mu1 - eig.mu2, eig.m1 * eig.m2));

    // Per-row structure: which eigenvalue the row belongs to and its
    // within-block descent index.
    std::vector<double> mu_row(n_a);
    std::vector<int> d_row(n_a);
    for (int i = 1; i <= n_a; ++i) {
        const bool first_block = i <= eig.m1;
        mu_row[i - 1] = first_block ? eig.mu1 : eig.mu2;
        d_row[i - 1] = (first_block ? eig.m1 : n_a) - i;
    }

    // Prefix sums of the scaled incomplete-gamma terms per eigenvalue, used
    // by the diagonal-replacement column.
    const int phi_max = n_e - nhat_min + nhat_min - 1 + n_a;  // loose upper bound
    auto scaled_prefix = [&](double mu) {
        std::vector<double> prefix(phi_max + 1);
        double acc = 0.0;
        for (int q = 0; q <= phi_max; ++q) {
            acc += detail::scaled_gamma_term(q, mu);
            prefix[q] = acc;
        }
        return prefix;
    };
    const std::vector<double> prefix1 = scaled_prefix(eig.mu1);
    const std::vector<double> prefix2 = scaled_prefix(eig.mu2);

    OmegaDiagnostics local;
    double det_sum = 0.0;
    for (int k = 1; k <= nhat_min; ++k) {
        Eigen::MatrixXd r(n_a, n_a);
        for (int i = 1; i <= n_a; ++i) {
            const double mu = mu_row[i - 1];
            const int d = d_row[i - 1];
            const double alt = d % 2 == 0 ? 1.0 : -1.0;
            for (int j = 1; j <= n_a; ++j) {
                double value = 0.0;
                if (j > nhat_min) {
                    const int pw = n_a - j - d;
                    if (pw < 0) {
                        local.clamped_falling_factorial = true;  // derivative of a monomial past degree
                    } else {
                        value = std::pow(mu, pw) * detail::factorial(n_a - j) /
                                detail::factorial(pw);
                    }
                } else {
                    const int phi = n_e - nhat_min + j - 1 + d;
                    if (phi < 0) throw NumericalError("omega_term: negative factorial order");
                    if (j != k) {
                        value = alt * detail::factorial(phi) / std::pow(mu, phi + 1);
                    } else {
                        const auto& prefix = mu == eig.mu1 ? prefix1 : prefix2;
                        value = alt * detail::factorial(phi) * prefix[phi] / std::pow(mu, phi + 1);
                    }
                }
                r(i - 1, j - 1) = value;
            }
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(r);
        const double det = lu.determinant();
        if (!std::isfinite(det)) throw NumericalError("omega_term: non-finite determinant");
        const double cond = r.cwiseAbs().rowwise().sum().maxCoeff() *
                            lu.inverse().cwiseAbs().rowwise().sum().maxCoeff();
        local.max_condition = std::max(local.max_condition, cond);
        det_sum += det;
    }
    if (local.max_condition > 1e12) {
        local.condition_warning = true;
        std::cerr << "omega_term: determinant condition " << local.max_condition
                  << " exceeds 1e12; result may be inaccurate (beta near 1?)\n";
    }
    if (diag) *diag = local;
    const double nats = k_const * det_sum;
    if (!std::isfinite(nats)) throw NumericalError("omega_term: non-finite result");
    return nats * kLog2E;
}

// Closed-form ergodic secrecy rate under perfect feedback.
inline double ergodic_secrecy_rate_closed(const SystemConfig& cfg, OmegaDiagnostics* diag = nullptr) {
    const DerivedDims dims = derive_dims(cfg);
    return theta_capacity(cfg.n_b, cfg.n_a, cfg.alpha * cfg.gamma) +
           theta_capacity(dims.n_min, dims.n_max, cfg.alpha * cfg.beta) - omega_term(cfg, diag);
}

// Ceiling: Bob's ergodic capacity, which no secrecy rate can exceed.
inline double bob_capacity(const SystemConfig& cfg) {
    cfg.validate();
    return theta_capacity(cfg.n_b, cfg.n_a, cfg.alpha * cfg.gamma);
}

// Upper bound on the ergodic secrecy-rate loss due to quantized feedback.
inline double loss_upper_bound_theorem2(const SystemConfig& cfg, double zeta = 0.5) {
    cfg.validate();
    const DerivedDims dims = derive_dims(cfg);
    const double eta =
        distortion_bound_eta(cfg.n_a, cfg.n_b, static_cast<double>(cfg.codebook_size()), zeta);
    return theta_capacity(cfg.n_b, cfg.n_a, cfg.alpha * cfg.gamma) -
           theta_capacity(cfg.n_b, cfg.n_a, dims.theta_min) +
           theta_capacity(cfg.n_b, cfg.n_a, cfg.alpha * cfg.beta * cfg.gamma * eta / cfg.n_b);
}

// Earlier heuristic loss bound; d_value is the expected squared distortion
// (measured, or an analytic bound for it).
inline double loss_upper_bound_heuristic(const SystemConfig& cfg, double d_value) {
    cfg.validate();
    if (!(d_value >= 0.0) || d_value >= cfg.n_b)
        throw DomainError("loss_upper_bound_heuristic: need 0 <= d_value < n_b");
    const double n_b = cfg.n_b;
    return n_b * std::log2((n_b + cfg.alpha * cfg.beta * cfg.gamma * cfg.n_a * d_value) /
                           (n_b - d_value)) +
           n_b * std::log2(1.0 + 1.0 / (cfg.alpha * cfg.gamma * (cfg.n_a - cfg.n_b)));
}

// Large-system secrecy-rate loss (n_a -> inf at fixed b_bar = B / n_a).
inline double asymptotic_loss(double p_total, double beta, double b_bar) {
    if (!(p_total > 0.0)) throw DomainError("asymptotic_loss: need p_total > 0");
    if (!(beta > 0.0)) throw DomainError("asymptotic_loss: need beta > 0");
    if (!(b_bar >= 0.0)) throw DomainError("asymptotic_loss: need b_bar >= 0");
    const double shrink = std::exp2(-b_bar);
    return std::log2(1.0 + p_total / beta) + std::log2(1.0 + shrink * p_total) -
           std::log2(1.0 + p_total + (1.0 - beta) / beta * (1.0 - shrink) * p_total);
}

// Lower bound on the ergodic secrecy capacity with quantized feedback.
inline double capacity_lower_bound(const SystemConfig& cfg, double zeta = 0.5,
                                   OmegaDiagnostics* diag = nullptr) {
    cfg.validate();
    const DerivedDims dims = derive_dims(cfg);
    const double eta =
        distortion_bound_eta(cfg.n_a, cfg.n_b, static_cast<double>(cfg.codebook_size()), zeta);
    return theta_capacity(dims.n_min, dims.n_max, cfg.alpha * cfg.beta) - omega_term(cfg, diag) +
           theta_capacity(cfg.n_b, cfg.n_a, dims.theta_min) -
           theta_capacity(cfg.n_b, cfg.n_a, cfg.alpha * cfg.beta * cfg.gamma * eta / cfg.n_b);
}

// Every closed-form quantity for one configuration.
struct BoundSet {
    double ub_theorem2 = 0.0;
    double ub_heuristic = 0.0;
    double ergodic_rs_closed = 0.0;
    double omega = 0.0;
    double c_lb_q = 0.0;
    double c_bob = 0.0;
};

inline BoundSet bound_set(const SystemConfig& cfg, double zeta = 0.5,
                          OmegaDiagnostics* diag = nullptr) {
    BoundSet b;
    OmegaDiagnostics local;
    b.omega = omega_term(cfg, &local);
    b.ub_theorem2 = loss_upper_bound_theorem2(cfg, zeta);
    const double eta =
        distortion_bound_eta(cfg.n_a, cfg.n_b, static_cast<double>(cfg.codebook_size()), zeta);
    b.ub_heuristic = loss_upper_bound_heuristic(cfg, std::min(eta, cfg.n_b - 1e-9));
    b.ergodic_rs_closed = ergodic_secrecy_rate_closed(cfg);
    b.c_lb_q = capacity_lower_bound(cfg, zeta);
    b.c_bob = bob_capacity(cfg);
    if (diag) *diag = local;
    return b;
}

}  // namespace anmimo
