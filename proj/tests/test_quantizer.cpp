#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "anmimo/quantizer.hpp"
#include "anmimo/rng.hpp"
#include "test_helpers.hpp"

using namespace anmimo;

TEST_CASE("chordal distance", "[quantizer]") {
    Rng rng(101);
    const CMatrix a = sample_haar_semiunitary(4, 2, rng);
    CHECK(chordal_distance_sq(a, a) == Catch::Approx(0.0).margin(1e-12));

    const CMatrix left = CMatrix::Identity(4, 4).leftCols(2);
    const CMatrix right = CMatrix::Identity(4, 4).rightCols(2);
    CHECK(chordal_distance_sq(left, right) == 2.0);

    // projector-distance identity oracle
    const CMatrix b = sample_haar_semiunitary(4, 2, rng);
    const double oracle =
        0.5 * (a * a.adjoint() - b * b.adjoint()).squaredNorm();
    CHECK(chordal_distance_sq(a, b) == Catch::Approx(oracle).margin(1e-12));

    // invariant under right-multiplication by a unitary (subspace distance)
    const CMatrix u = sample_haar_semiunitary(2, 2, rng);
    CHECK(chordal_distance_sq(a * u, b) ==
          Catch::Approx(chordal_distance_sq(a, b)).margin(1e-12));
    CHECK(chordal_distance_sq(b, a) ==
          Catch::Approx(chordal_distance_sq(a, b)).margin(1e-12));

    CHECK_THROWS_AS(chordal_distance_sq(a, CMatrix::Identity(3, 2)), DomainError);
}

TEST_CASE("rvq codebook construction", "[quantizer]") {
    Rng rng(55);
    const Codebook single = build_rvq_codebook(2, 1, 0, rng);
    CHECK(single.entries.size() == 1);
    CHECK(single.kind == Codebook::Kind::rvq);

    const Codebook cb = build_rvq_codebook(4, 2, 3, rng);
    REQUIRE(cb.entries.size() == 8);
    for (const CMatrix& e : cb.entries) CHECK(is_semiunitary(e));

    Rng r1(9), r2(9);
    const Codebook a = build_rvq_codebook(3, 1, 4, r1);
    const Codebook b = build_rvq_codebook(3, 1, 4, r2);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        CHECK((a.entries[i] - b.entries[i]).norm() == 0.0);

    CHECK_THROWS_AS(build_rvq_codebook(4, 2, 25, rng), DomainError);
    CHECK_THROWS_AS(build_rvq_codebook(2, 2, 3, rng), DomainError);
}

TEST_CASE("sphere codebook construction", "[quantizer]") {
    const double r = std::sqrt(0.5);
    const Codebook b1 = build_sphere_codebook(1);
    REQUIRE(b1.entries.size() == 2);
    CHECK(std::abs(b1.entries[0](0, 0) - r) < 1e-12);
    CHECK(std::abs(b1.entries[0](1, 0) - (-r)) < 1e-12);
    CHECK(std::abs(b1.entries[1](0, 0) - r) < 1e-12);
    CHECK(std::abs(b1.entries[1](1, 0) - r) < 1e-12);

    // B=2: polar levels t in {-1/2, 1/2}, phases in {0, pi}
    const Codebook b2 = build_sphere_codebook(2);
    REQUIRE(b2.entries.size() == 4);
    auto entry_for = [](double t, double phi) {
        const double half = 0.5 * std::acos(t);
        CMatrix e(2, 1);
        e(0, 0) = std::cos(half);
        e(1, 0) = std::polar(std::sin(half), phi);
        return e;
    };
    const double pi = std::acos(-1.0);
    CHECK((b2.entries[0] - entry_for(-0.5, pi)).norm() < 1e-12);
    CHECK((b2.entries[1] - entry_for(-0.5, 0.0)).norm() < 1e-12);
    CHECK((b2.entries[2] - entry_for(0.5, pi)).norm() < 1e-12);
    CHECK((b2.entries[3] - entry_for(0.5, 0.0)).norm() < 1e-12);

    for (int bits = 1; bits <= 10; ++bits) {
        const Codebook cb = build_sphere_codebook(bits);
        REQUIRE(cb.entries.size() == (std::size_t{1} << bits));
        for (const CMatrix& e : cb.entries)
            CHECK(std::fabs(e.norm() - 1.0) < 1e-12);
        for (std::size_t i = 0; i + 1 < cb.entries.size() && bits <= 6; ++i)
            for (std::size_t j = i + 1; j < cb.entries.size(); ++j)
                CHECK(chordal_distance_sq(cb.entries[i], cb.entries[j]) > 1e-12);
    }

    CHECK_THROWS_AS(build_sphere_codebook(0), DomainError);
}

TEST_CASE("quantization", "[quantizer]") {
    Rng rng(808);
    Codebook cb = build_rvq_codebook(4, 2, 5, rng);

    // in-codebook input maps to itself with zero distance
    const QuantizationResult self = quantize(cb, cb.entries[13]);
    CHECK(self.index == 14);
    CHECK(self.distance_sq < 1e-12);

    // B=0: the single entry regardless of input
    const Codebook single = build_rvq_codebook(4, 2, 0, rng);
    const QuantizationResult forced = quantize(single, cb.entries[3]);
    CHECK(forced.index == 1);
    CHECK((forced.codeword - single.entries[0]).norm() == 0.0);

    // brute-force re-scan oracle
    for (int rep = 0; rep < 20; ++rep) {
        const CMatrix v = sample_haar_semiunitary(4, 2, rng);
        const QuantizationResult q = quantize(cb, v);
        int best_idx = 0;
        double best_d = chordal_distance_sq(cb.entries[0], v);
        for (std::size_t i = 1; i < cb.entries.size(); ++i) {
            const double d = chordal_distance_sq(cb.entries[i], v);
            if (d < best_d) {
                best_d = d;
                best_idx = static_cast<int>(i);
            }
        }
        CHECK(q.index == best_idx + 1);
        CHECK(q.distance_sq == best_d);
        CHECK(q.distance_sq <= 2.0);
    }

    // exact ties break to the lowest index
    Codebook tie = cb;
    tie.entries[7] = tie.entries[2];
    const QuantizationResult tied = quantize(tie, tie.entries[2]);
    CHECK(tied.index == 3);
}

TEST_CASE("precoder assembly", "[quantizer]") {
    Rng rng(313);
    const Codebook cb = build_rvq_codebook(4, 2, 2, rng);
    const QuantizationResult q = quantize(cb, sample_haar_semiunitary(4, 2, rng));
    const Precoder p = assemble_precoder(q);
    CHECK(is_semiunitary(p.v_hat));
    CHECK((p.info_block() - q.codeword).norm() == 0.0);
    CHECK((q.codeword.adjoint() * p.an_block()).norm() < 1e-10);
}

TEST_CASE("distortion estimate", "[quantizer]") {
    // lines in C^2: single-draw distance is uniform on [0, 1], so the
    // minimum over K draws has mean exactly 1/(K+1)
    const MCEstimate d0 = estimate_distortion(2, 1, 0, 40000, 90210);
    CHECK(std::fabs(d0.mean - 0.5) <= 3.5 * d0.std_err);

    double previous = 1.0;
    for (int bits = 0; bits <= 10; ++bits) {
        const MCEstimate d = estimate_distortion(2, 1, bits, 10000, 1000 + bits);
        const double exact = 1.0 / (std::pow(2.0, bits) + 1.0);
        INFO("bits=" << bits << " mean=" << d.mean << " exact=" << exact);
        CHECK(std::fabs(d.mean - exact) <= 3.5 * d.std_err);
        CHECK(d.mean < previous);
        previous = d.mean;
    }
}

TEST_CASE("distortion bounds", "[quantizer]") {
    CHECK(ball_constant_c(2, 1) == 1.0);
    CHECK(ball_constant_c(4, 2) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(ball_constant_c(4, 3) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(ball_constant_c(6, 2) == Catch::Approx(1.0 / 14.0).epsilon(1e-14));
    CHECK(ball_constant_c(3, 1) == Catch::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(ball_constant_c(2, 2), DomainError);

    for (int bits : {0, 4, 10})
        CHECK(distortion_bound_mu(2, 1, std::pow(2.0, bits)) ==
              Catch::Approx(std::pow(2.0, -(bits + 1))).epsilon(1e-14));
    CHECK(distortion_bound_mu(4, 2, 64.0) ==
          Catch::Approx(0.33635856610148595).epsilon(1e-12));
    CHECK(distortion_bound_eta(4, 2, 64.0) ==
          Catch::Approx(0.38808227541981094).epsilon(1e-12));

    CHECK_THROWS_AS(distortion_bound_eta(4, 2, 16.0, 0.0), DomainError);
    CHECK_THROWS_AS(distortion_bound_eta(4, 2, 16.0, 1.0), DomainError);

    // sandwich against the brute-force estimate
    for (int bits : {4, 8}) {
        const MCEstimate d = estimate_distortion(4, 2, bits, 3000, 77 + bits);
        const double lo = distortion_bound_mu(4, 2, std::pow(2.0, bits));
        const double hi = distortion_bound_eta(4, 2, std::pow(2.0, bits));
        INFO("bits=" << bits << " mu=" << lo << " D=" << d.mean << " eta=" << hi);
        CHECK(lo <= d.mean + 3.0 * d.std_err);
        CHECK(d.mean - 3.0 * d.std_err <= hi);
    }
}

TEST_CASE("exact-law minimum distance sampling", "[quantizer]") {
    CHECK(min_distance_law_available(2, 1));
    CHECK(min_distance_law_available(3, 1));
    CHECK(min_distance_law_available(10, 1));
    CHECK(min_distance_law_available(4, 2));
    CHECK_FALSE(min_distance_law_available(4, 3));
    CHECK_FALSE(min_distance_law_available(5, 2));
    {
        Rng rng(5);
        CHECK_THROWS_AS(sample_min_distance_sq(4, 3, 2, rng), DomainError);
    }

    // lines in C^2, K = 16: mean of the law sampler must hit 1/17
    {
        Rng rng(42);
        double sum = 0.0, sumsq = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const double d = sample_min_distance_sq(2, 1, 4, rng);
            sum += d;
            sumsq += d * d;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sumsq / n - mean * mean) / (n - 1));
        CHECK(std::fabs(mean - 1.0 / 17.0) <= 3.5 * se);
    }

    // G(4,2), K = 16: two-sample KS against the brute-force minimum
    {
        const int n = 4000;
        std::vector<double> law, brute;
        Rng rng_law(2001), rng_brute(2002);
        for (int i = 0; i < n; ++i) law.push_back(sample_min_distance_sq(4, 2, 4, rng_law));
        for (int i = 0; i < n; ++i) {
            const CMatrix v = sample_haar_semiunitary(4, 2, rng_brute);
            double best = 2.0;
            for (int k = 0; k < 16; ++k)
                best = std::min(best,
                                chordal_distance_sq(sample_haar_semiunitary(4, 2, rng_brute), v));
            brute.push_back(best);
        }
        const double ks = testutil::ks_statistic(law, brute);
        CHECK(ks < testutil::ks_critical_1pct(n, n));
    }
}

TEST_CASE("conditional codeword reconstruction", "[quantizer]") {
    Rng rng(606);

    {
        const CMatrix h = sample_gaussian(1, 3, rng);
        const SvdBasis basis = svd_right_basis(h);
        for (double d2 : {0.05, 0.4, 0.9}) {
            const CMatrix w = sample_quantized_codeword(basis.v_tilde, basis.z, d2, rng);
            CHECK(is_semiunitary(w));
            CHECK(chordal_distance_sq(w, basis.v_tilde) == Catch::Approx(d2).margin(1e-10));
        }
    }
    {
        const CMatrix h = sample_gaussian(2, 4, rng);
        const SvdBasis basis = svd_right_basis(h);
        for (double d2 : {0.1, 0.7, 1.3}) {
            const CMatrix w = sample_quantized_codeword(basis.v_tilde, basis.z, d2, rng);
            CHECK(is_semiunitary(w));
            CHECK(chordal_distance_sq(w, basis.v_tilde) == Catch::Approx(d2).margin(1e-10));
        }
    }
}

TEST_CASE("codebook text round-trip", "[quantizer]") {
    Rng rng(404);
    for (const Codebook& cb :
         {build_rvq_codebook(3, 2, 2, rng), build_sphere_codebook(3)}) {
        std::stringstream buf;
        write_codebook(buf, cb);
        const Codebook back = read_codebook(buf);
        CHECK(back.n_a == cb.n_a);
        CHECK(back.n_b == cb.n_b);
        CHECK(back.feedback_bits == cb.feedback_bits);
        CHECK(back.kind == cb.kind);
        REQUIRE(back.entries.size() == cb.entries.size());
        for (std::size_t i = 0; i < cb.entries.size(); ++i)
            CHECK((back.entries[i] - cb.entries[i]).norm() == 0.0);
    }

    std::istringstream bad("not-a-codebook 2 1 1 rvq\n");
    CHECK_THROWS_AS(read_codebook(bad), DomainError);

    std::stringstream truncated;
    write_codebook(truncated, build_sphere_codebook(2));
    std::string text = truncated.str();
    std::istringstream cut(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(read_codebook(cut), DomainError);
}
