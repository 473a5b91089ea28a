#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace anmimo {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniforms and Gaussians are derived from raw engine words rather than
// std::uniform_real_distribution / std::normal_distribution, whose output
// sequences are implementation-defined; sequences here are pinned by this
// header alone.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

    // Circularly symmetric complex Gaussian, unit total variance
    // (real and imaginary parts each variance 1/2).
    std::complex<double> complex_gaussian() {
        constexpr double kInvSqrt2 = 0.70710678118654752440;
        const double re = normal() * kInvSqrt2;
        const double im = normal() * kInvSqrt2;
        return {re, im};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Independent substream for one Monte Carlo trial. Keying by (seed, index)
// makes per-trial randomness a pure function of the trial, so results do
// not depend on how trials are partitioned across threads.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t state = seed ^ 0x8000000000000000ULL;
    const std::uint64_t a = splitmix64(state);
    state ^= index * 0x9e3779b97f4a7c15ULL + 0x165667b19e3779f9ULL;
    const std::uint64_t b = splitmix64(state);
    return Rng(a ^ (b + 0x2545f4914f6cdd1dULL));
}

}  // namespace anmimo
