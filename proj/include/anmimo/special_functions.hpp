#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "anmimo/common.hpp"

namespace anmimo {

// E1(b) = int_b^inf e^{-t}/t dt for b > 0.
inline double exp_integral_e1(double b) {
    if (!(b > 0.0)) throw DomainError("exp_integral_e1: need b > 0");
    return -std::expint(-b);
}

namespace detail {

inline double factorial(int n) {
    if (n < 0) throw DomainError("factorial: negative argument");
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// Modified Lentz evaluation of the continued fraction for Gamma(a, b),
// a = -j <= 0, b >= 1. Returns e^b * b^j * Gamma(-j, b) directly: the
// fraction value h equals that scaled quantity, so no large powers are
// ever formed.
inline double scaled_gamma_cf(int j, double b) {
    const double a = -static_cast<double>(j);
    constexpr double tiny = 1e-300;
    double b0 = b + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b0;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b0 += 2.0;
        d = an * d + b0;
        if (std::abs(d) < tiny) d = tiny;
        c = b0 + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) return h;
    }
    throw NumericalError("scaled_gamma_cf: continued fraction did not converge");
}

// S_j(b) = e^b * b^j * Gamma(-j, b), the b-scaled incomplete-gamma terms the
// ergodic-capacity formula consumes. Continued fraction for b >= 1;
// for b < 1 the downward recurrence in S-form, S_j = (1 - b*S_{j-1})/j,
// seeded at S_0 = e^b E1(b), which involves no extreme magnitudes.
inline double scaled_gamma_term(int j, double b) {
    if (j < 0) throw DomainError("scaled_gamma_term: need j >= 0");
    if (!(b > 0.0)) throw DomainError("scaled_gamma_term: need b > 0");
    if (b >= 1.0) return scaled_gamma_cf(j, b);
    double s = std::exp(b) * exp_integral_e1(b);
    for (int k = 1; k <= j; ++k) s = (1.0 - b * s) / k;
    return s;
}

}  // namespace detail

// Gamma(a, b) = int_b^inf x^{a-1} e^{-x} dx for integer a (any sign), b > 0.
// Nonpositive a uses the downward recurrence
// Gamma(a, b) = (Gamma(a+1, b) - b^a e^{-b}) / a seeded at Gamma(0, b) = E1(b).
inline double upper_incomplete_gamma(int a, double b) {
    if (!(b > 0.0)) throw DomainError("upper_incomplete_gamma: need b > 0");
    if (a > 0) {
        // finite sum: Gamma(a, b) = (a-1)! e^{-b} sum_{k<a} b^k / k!
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < a; ++k) {
            term *= b / k;
            sum += term;
        }
        return detail::factorial(a - 1) * std::exp(-b) * sum;
    }
    double g = exp_integral_e1(b);
    const double eb = std::exp(-b);
    for (int k = -1; k >= a; --k) {
        g = (g - std::pow(b, k) * eb) / k;
        if (!std::isfinite(g)) throw NumericalError("upper_incomplete_gamma: recurrence overflow");
    }
    return g;
}

// Ergodic capacity of an uncorrelated central Wishart channel:
// E[ln det(I_m + x W)] in nats for W ~ W_m(n, I), n >= m.
inline double wishart_capacity_nats(int m, int n, double x) {
    if (m < 1 || n < m) throw DomainError("wishart_capacity_nats: need n >= m >= 1");
    if (x < 0.0) throw DomainError("wishart_capacity_nats: need x >= 0");
    if (x == 0.0) return 0.0;
    const double b = 1.0 / x;
    const int j_max = n - m + 2 * (m - 1);
    // prefix[t] = sum_{j=0}^{t} e^b b^j Gamma(-j, b); e^{1/x} x^{-j} Gamma(-j, 1/x) in x-terms
    std::vector<double> prefix(j_max + 1);
    double acc = 0.0;
    for (int j = 0; j <= j_max; ++j) {
        acc += detail::scaled_gamma_term(j, b);
        prefix[j] = acc;
    }
    double total = 0.0;
    for (int k = 0; k <= m - 1; ++k) {
        for (int l = 0; l <= k; ++l) {
            for (int i = 0; i <= 2 * l; ++i) {
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                const double coeff = sign * detail::factorial(2 * l) *
                                     detail::factorial(n - m + i) /
                                     (std::pow(2.0, 2 * k - i) * detail::factorial(l) *
                                      detail::factorial(i) * detail::factorial(n - m + l));
                const double combos = detail::binomial(2 * (k - l), k - l) *
                                      detail::binomial(2 * (l + n - m), 2 * l - i);
                total += coeff * combos * prefix[n - m + i];
            }
        }
    }
    return total;
}

}  // namespace anmimo
