#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmbo/errors.hpp"
#include "cmbo/gaussian.hpp"
#include "cmbo/linalg.hpp"
#include "properties.hpp"

using namespace cmbo;

TEST_CASE("cholesky_with_jitter on the identity") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
    const CholeskyResult result = cholesky_with_jitter(eye, 1e-10);
    CHECK((result.lower - eye).norm() <= 1e-12);
    CHECK((result.jitter == 0.0 || result.jitter == 1e-10));
}

TEST_CASE("cholesky_with_jitter on a diagonal matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 4.0, 0.0, 0.0, 9.0;
    const CholeskyResult result = cholesky_with_jitter(a);
    CHECK(result.lower(0, 0) == doctest::Approx(2.0));
    CHECK(result.lower(1, 1) == doctest::Approx(3.0));
    CHECK(result.lower(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("cholesky_with_jitter rejects an indefinite matrix") {
    Eigen::MatrixXd a(2, 2);
    a << 1.0, 2.0, 2.0, 1.0;
    // Characteristic polynomial (1 - t)^2 - 4 has roots 3 and -1, so the
    // matrix is indefinite and no jitter below the ceiling can fix it.
    const double disc = std::sqrt(std::pow(a(0, 0) - a(1, 1), 2) / 4.0 + a(0, 1) * a(1, 0));
    const double lo = (a(0, 0) + a(1, 1)) / 2.0 - disc;
    CHECK(lo == doctest::Approx(-1.0));
    CHECK_THROWS_AS(cholesky_with_jitter(a), NotPositiveDefinite);
}

TEST_CASE("cholesky_with_jitter checks its preconditions") {
    CHECK_THROWS_AS(cholesky_with_jitter(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(cholesky_with_jitter(asym), DimensionMismatch);
}

TEST_CASE("logdet_psd examples") {
    CHECK(logdet_psd(Eigen::MatrixXd::Identity(5, 5)) == doctest::Approx(0.0).epsilon(1e-12));

    Eigen::MatrixXd diag(2, 2);
    diag << 2.0, 0.0, 0.0, 3.0;
    // Eigenvalue-product oracle: det = 2 * 3.
    CHECK(logdet_psd(diag) == doctest::Approx(std::log(6.0)).epsilon(1e-10));

    Eigen::MatrixXd full(2, 2);
    full << 2.0, 1.0, 1.0, 2.0;
    // Cofactor expansion: det = 2*2 - 1*1 = 3.
    CHECK(logdet_psd(full) == doctest::Approx(std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("sqrtm_psd examples") {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
    CHECK((sqrtm_psd(eye) - eye).norm() <= 1e-12);

    Eigen::MatrixXd diag(2, 2);
    diag << 4.0, 0.0, 0.0, 9.0;
    const Eigen::MatrixXd root = sqrtm_psd(diag);
    CHECK(root(0, 0) == doctest::Approx(2.0));
    CHECK(root(1, 1) == doctest::Approx(3.0));

    Eigen::MatrixXd full(2, 2);
    full << 2.0, 1.0, 1.0, 2.0;
    const Eigen::MatrixXd r = sqrtm_psd(full);
    CHECK(r(0, 0) == doctest::Approx(1.36603).epsilon(1e-5));
    CHECK(r(0, 1) == doctest::Approx(0.36603).epsilon(1e-5));
    CHECK((r * r - full).norm() <= 1e-7 * (1.0 + full.norm()));
}

TEST_CASE("GaussianDist validates and symmetrizes") {
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.2, 0.2, 1.0;
    CHECK_THROWS_AS(GaussianDist(Eigen::VectorXd::Zero(3), cov), DimensionMismatch);

    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(GaussianDist(Eigen::VectorXd::Zero(2), indefinite), NotPositiveDefinite);

    Eigen::MatrixXd lopsided(2, 2);
    lopsided << 1.0, 0.3, 0.1, 1.0;
    const GaussianDist gd(Eigen::VectorXd::Zero(2), lopsided);
    CHECK(gd.cov()(0, 1) == doctest::Approx(0.2));
    CHECK(gd.cov()(1, 0) == doctest::Approx(0.2));
}

TEST_CASE("gaussmath property suites (smoke)") {
    CHECK_NOTHROW(props::prop_sqrtm_square_back(40, 11));
    CHECK_NOTHROW(props::prop_logdet_eigen_oracle(40, 12));
    CHECK_NOTHROW(props::prop_cholesky_deterministic(40, 13));
    CHECK_NOTHROW(props::prop_gaussian_dist_construction(40, 14));
}
