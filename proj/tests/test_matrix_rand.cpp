#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "anmimo/matrix_rand.hpp"
#include "anmimo/rng.hpp"
#include "test_helpers.hpp"

using namespace anmimo;

TEST_CASE("gaussian sampling moments and determinism", "[matrix_rand]") {
    Rng rng(4242);
    const CMatrix m = sample_gaussian(1000, 1000, rng);
    const std::complex<double> mean = m.mean();
    const double bound = 4.0 / 1000.0;  // 4 / sqrt(10^6) per component
    CHECK(std::fabs(mean.real()) < bound);
    CHECK(std::fabs(mean.imag()) < bound);
    CHECK(m.cwiseAbs2().mean() == Catch::Approx(1.0).margin(0.01));

    Rng r1(7), r2(7);
    CHECK((sample_gaussian(3, 5, r1) - sample_gaussian(3, 5, r2)).norm() == 0.0);
}

TEST_CASE("haar sampling is semi-unitary", "[matrix_rand]") {
    Rng rng(11);
    CHECK(is_semiunitary(sample_haar_semiunitary(4, 2, rng)));
    CHECK(is_semiunitary(sample_haar_semiunitary(3, 3, rng)));
    CHECK(is_semiunitary(sample_haar_semiunitary(5, 1, rng)));
    const CMatrix scalar = sample_haar_semiunitary(1, 1, rng);
    CHECK(std::fabs(std::abs(scalar(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("haar sampling is rotation invariant", "[matrix_rand]") {
    // chordal distance to a fixed reference vs. to a rotated reference:
    // same law iff the samples are Haar
    const int n = 4, p = 2;
    const std::size_t samples = 10000;
    Rng ref_rng(2024);
    const CMatrix ref = sample_haar_semiunitary(n, p, ref_rng);
    const CMatrix rot = sample_haar_semiunitary(n, n, ref_rng);
    const CMatrix ref_rotated = rot * ref;

    auto project_dist = [&](const CMatrix& a, const CMatrix& b) {
        return static_cast<double>(p) - (a.adjoint() * b).squaredNorm();
    };
    std::vector<double> d_plain, d_rotated;
    Rng rng_a(555), rng_b(777);
    for (std::size_t i = 0; i < samples; ++i) {
        d_plain.push_back(project_dist(sample_haar_semiunitary(n, p, rng_a), ref));
        d_rotated.push_back(project_dist(sample_haar_semiunitary(n, p, rng_b), ref_rotated));
    }
    const double ks = testutil::ks_statistic(d_plain, d_rotated);
    CHECK(ks < testutil::ks_critical_1pct(samples, samples));
}

TEST_CASE("svd right basis", "[matrix_rand]") {
    CMatrix h = CMatrix::Zero(2, 3);
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    const SvdBasis basis = svd_right_basis(h);
    REQUIRE(basis.z.cols() == 1);
    CHECK(std::abs(basis.z(2, 0)) == Catch::Approx(1.0).margin(1e-10));
    CHECK(std::abs(basis.z(0, 0)) < 1e-10);
    CHECK(std::abs(basis.z(1, 0)) < 1e-10);

    const CMatrix hr = testutil::random_gaussian(2, 4, 31);
    const SvdBasis br = svd_right_basis(hr);
    CHECK((hr * br.z).norm() < 1e-9);
    CHECK((hr * br.v_tilde).squaredNorm() == Catch::Approx(hr.squaredNorm()).margin(1e-9));
    CMatrix full(4, 4);
    full << br.v_tilde, br.z;
    CHECK(is_semiunitary(full));
    REQUIRE(br.singular_values.size() == 2);
    CHECK(br.singular_values(0) >= br.singular_values(1));

    // rank-deficient input must be rejected
    const CMatrix row = testutil::random_gaussian(1, 4, 32);
    CMatrix rank1(2, 4);
    rank1.row(0) = row;
    rank1.row(1) = 2.0 * row;
    CHECK_THROWS_AS(svd_right_basis(rank1), NumericalError);
}

TEST_CASE("gram-schmidt completion", "[matrix_rand]") {
    const CMatrix eye2 = CMatrix::Identity(4, 2);
    const CMatrix completed = gram_schmidt_complete(eye2);
    CHECK((completed - CMatrix::Identity(4, 4)).norm() < 1e-12);

    Rng rng(77);
    const CMatrix v = sample_haar_semiunitary(5, 2, rng);
    const CMatrix u = gram_schmidt_complete(v);
    CHECK(is_semiunitary(u));
    CHECK((u.leftCols(2) - v).norm() == 0.0);

    const CMatrix h = testutil::random_gaussian(2, 4, 55);
    const SvdBasis basis = svd_right_basis(h);
    const CMatrix vhat = gram_schmidt_complete(basis.v_tilde);
    CHECK((h * vhat.rightCols(2)).norm() < 1e-8);
}

TEST_CASE("log det of identity plus PSD", "[matrix_rand]") {
    CHECK(log_det_eye_plus(CMatrix::Zero(3, 3)) == 0.0);

    CMatrix three(1, 1);
    three(0, 0) = 3.0;
    CHECK(log_det_eye_plus(three) == Catch::Approx(2.0).epsilon(1e-14));

    // LU-determinant oracle on a random Gram matrix
    const CMatrix b = testutil::random_gaussian(3, 5, 91);
    const CMatrix a = b * b.adjoint();
    const CMatrix eye_plus = CMatrix::Identity(3, 3) + a;
    const double oracle = std::log2(std::abs(eye_plus.determinant()));
    CHECK(log_det_eye_plus(a) == Catch::Approx(oracle).margin(1e-9));

    // |I + AB| = |I + BA|
    const CMatrix x = testutil::random_gaussian(3, 5, 92);
    CHECK(log_det_eye_plus(0.7 * (x * x.adjoint())) ==
          Catch::Approx(log_det_eye_plus(0.7 * (x.adjoint() * x))).margin(1e-9));

    CMatrix neg = CMatrix::Zero(2, 2);
    neg(0, 0) = -2.0;
    neg(1, 1) = 1.0;
    CHECK_THROWS_AS(log_det_eye_plus(neg), NumericalError);

    CMatrix skew = CMatrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    CHECK_THROWS_AS(log_det_eye_plus(skew), DomainError);

    CHECK_THROWS_AS(log_det_eye_plus(CMatrix::Zero(2, 3)), DomainError);
}
