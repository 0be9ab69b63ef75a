#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cmbo/errors.hpp"
#include "cmbo/gp.hpp"
#include "cmbo/kernels.hpp"
#include "properties.hpp"

using namespace cmbo;

namespace {

Eigen::VectorXd vec1(double x) {
    Eigen::VectorXd v(1);
    v(0) = x;
    return v;
}

}  // namespace

TEST_CASE("kernel_eval closed forms") {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(1);
    const Kernel m32 = Kernel::matern32(ones, 1.7);
    CHECK(m32(vec1(0.3), vec1(0.3)) == doctest::Approx(1.7));

    const Kernel m12 = Kernel::matern12(ones, 1.0);
    CHECK(m12(vec1(0.0), vec1(1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

    const Kernel product = Kernel::product({Kernel::matern32(ones, 2.0), Kernel::matern12(ones, 3.0)});
    CHECK(product(vec1(0.5), vec1(0.5)) == doctest::Approx(6.0));

    const Kernel rbf = Kernel::rbf(ones, 1.0);
    CHECK(rbf(vec1(0.0), vec1(1.0)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));

    CHECK_THROWS_AS(m32(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)), DimensionMismatch);
}

TEST_CASE("kernel gram matrices factor under the jitter policy") {
    Rng rng(5);
    const Eigen::MatrixXd points = test_helpers::random_grid(rng, 12, 2);
    for (const Kernel& k :
         {Kernel::matern12(Eigen::VectorXd::Ones(2)), Kernel::matern32(Eigen::VectorXd::Ones(2)),
          Kernel::rbf(Eigen::VectorXd::Ones(2)),
          Kernel::product({Kernel::matern32(Eigen::VectorXd::Ones(2)),
                           Kernel::matern12(Eigen::VectorXd::Ones(2))})}) {
        CHECK_NOTHROW(cholesky_with_jitter(k.gram(points)));
    }
}

TEST_CASE("posterior matches closed-form bivariate conditioning") {
    Eigen::MatrixXd grid(2, 1);
    grid << 0.2, 0.8;
    Eigen::MatrixXd cov(2, 2);
    cov << 1.0, 0.6, 0.6, 1.3;
    Eigen::VectorXd mean(2);
    mean << 0.0, 0.0;
    const double noise = 0.01;
    const GpModel model(grid, mean, cov, noise);

    Eigen::MatrixXd x(1, 1);
    x << 0.2;
    Eigen::VectorXd y(1);
    y << 0.9;
    const GpModel post = posterior(model, Dataset(x, y));

    // Independent conditioning arithmetic for observing grid point 0.
    const double k00 = cov(0, 0) + noise;
    const Eigen::Vector2d col(cov(0, 0), cov(1, 0));
    const Eigen::Vector2d expected_mean = col * (y(0) / k00);
    const Eigen::Matrix2d expected_cov =
        Eigen::Matrix2d(cov) - col * col.transpose() / k00;
    CHECK((post.mean() - expected_mean).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((post.cov() - expected_cov).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("posterior leaves the prior unchanged on an empty dataset") {
    Rng rng(7);
    const GpModel model = props::random_kernel_model(rng, 6, 2, 1e-4);
    const GpModel post = posterior(model, Dataset(2));
    CHECK(post.mean() == model.mean());
    CHECK(post.cov() == model.cov());
}

TEST_CASE("posterior never inflates grid variances") {
    Rng rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        const GpModel model = props::random_kernel_model(rng, 10, 2, 1e-4);
        Eigen::MatrixXd x(3, 2);
        Eigen::VectorXd y(3);
        for (int i = 0; i < 3; ++i) {
            x.row(i) = model.grid().row(i * 2);
            y(i) = rng.normal();
        }
        const GpModel post = posterior(model, Dataset(x, y));
        for (Eigen::Index i = 0; i < model.size(); ++i) {
            CHECK(post.cov()(i, i) <= model.cov()(i, i) + 1e-9);
        }
    }
}

TEST_CASE("posterior rejects rows off the grid") {
    Rng rng(9);
    const GpModel model = props::random_kernel_model(rng, 5, 2, 1e-4);
    Eigen::MatrixXd x(1, 2);
    x << -3.0, -3.0;
    Eigen::VectorXd y(1);
    y << 0.0;
    CHECK_THROWS_AS(posterior(model, Dataset(x, y)), RowNotOnGrid);
}

TEST_CASE("log marginal likelihood of a single standard observation") {
    Eigen::MatrixXd grid(1, 1);
    grid << 0.5;
    Eigen::MatrixXd cov(1, 1);
    cov << 1.0;
    const GpModel model(grid, Eigen::VectorXd::Zero(1), cov, 0.0);  // noise floored to 1e-8
    Eigen::VectorXd y(1);
    y << 0.0;
    const double lml = log_marginal_likelihood(model, Dataset(grid, y));
    CHECK(lml == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-7));
}

TEST_CASE("log marginal likelihood peaks when outputs sit on the prior mean") {
    Rng rng(10);
    const GpModel base = props::random_kernel_model(rng, 8, 1, 1e-2);
    Eigen::VectorXd shifted_mean = test_helpers::random_vector(rng, 8);
    const GpModel model(base.grid(), shifted_mean, base.cov(), 1e-2);
    const Dataset at_mean(model.grid(), shifted_mean);
    const double best = log_marginal_likelihood(model, at_mean);
    for (double c : {-2.0, -0.5, 0.3, 1.7}) {
        const Dataset shifted(model.grid(), shifted_mean.array() + c);
        CHECK(log_marginal_likelihood(model, shifted) < best);
    }
}

TEST_CASE("log marginal likelihood agrees with a dense evaluation") {
    Rng rng(11);
    const GpModel model = props::random_kernel_model(rng, 3, 1, 1e-3);
    const Eigen::VectorXd y = test_helpers::random_vector(rng, 3);
    const Dataset data(model.grid(), y);
    // Independent dense-formula evaluation.
    Eigen::MatrixXd gram = model.cov();
    gram.diagonal().array() += model.noise_var();
    const double dense = -0.5 * (y.dot(gram.inverse() * y) + std::log(gram.determinant()) +
                                 3.0 * std::log(2.0 * M_PI));
    CHECK(log_marginal_likelihood(model, data) == doctest::Approx(dense).epsilon(1e-9));
}

TEST_CASE("fit_hyperparams recovers a known lengthscale") {
    Rng rng(40);
    const Eigen::Index n = 50;
    const Eigen::MatrixXd grid = test_helpers::random_grid(rng, n, 1);
    const Kernel truth = Kernel::matern32(Eigen::VectorXd::Ones(1), 1.0);
    const CholeskyResult chol = cholesky_with_jitter(truth.gram(grid), 1e-8);
    const Eigen::VectorXd draw = chol.lower * test_helpers::random_vector(rng, n);
    const Kernel fitted = fit_hyperparams(Kernel::matern32(Eigen::VectorXd::Ones(1)),
                                          Dataset(grid, draw), 1e-4);
    const double k0 = fitted(vec1(0.0), vec1(0.0));
    const double k1 = fitted(vec1(0.0), vec1(1.0));
    // Invert the Matern-3/2 form for the fitted lengthscale at unit distance.
    const double ratio = k1 / k0;
    double lo = 1e-3, hi = 1e3;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double t = std::sqrt(3.0) / mid;
        ((1.0 + t) * std::exp(-t) < ratio ? lo : hi) = mid;
    }
    const double recovered = std::sqrt(lo * hi);
    // Within one grid step of 1.0 on the log10 grid (step 0.15).
    CHECK(std::abs(std::log10(recovered)) <= 0.15 + 1e-9);
}

TEST_CASE("fit_hyperparams picks the smallest variance for constant outputs") {
    Rng rng(41);
    const Eigen::MatrixXd grid = test_helpers::random_grid(rng, 10, 2);
    const Dataset data(grid, Eigen::VectorXd::Zero(10));
    const Kernel fitted =
        fit_hyperparams(Kernel::matern32(Eigen::VectorXd::Ones(2)), data, 1e-4);
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(2);
    CHECK(fitted(origin, origin) == doctest::Approx(0.01).epsilon(1e-9));

    // Exhaustive scan oracle over the same grids via the public likelihood.
    double best = -std::numeric_limits<double>::infinity();
    double best_var = 0.0;
    for (double ell : hyperparam_grid()) {
        for (double var : hyperparam_grid()) {
            const Kernel k =
                Kernel::matern32(Eigen::VectorXd::Ones(2)).with_shared_hyperparams(ell, var);
            const double lml =
                log_marginal_likelihood(GpModel::from_kernel(grid, k, 1e-4), data);
            if (lml > best) {
                best = lml;
                best_var = var;
            }
        }
    }
    CHECK(best_var == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("fit_hyperparams needs two observations") {
    Eigen::MatrixXd x(1, 1);
    x << 0.5;
    Eigen::VectorXd y(1);
    y << 1.0;
    CHECK_THROWS_AS(fit_hyperparams(Kernel::matern32(Eigen::VectorXd::Ones(1)),
                                    Dataset(x, y), 1e-4),
                    InsufficientData);
}

TEST_CASE("discretize restrictions") {
    Rng rng(42);
    const GpModel model = props::random_kernel_model(rng, 8, 2, 1e-4);

    const GaussianDist full = discretize(model, model.grid());
    CHECK(full.mean() == model.mean());
    CHECK((full.cov() - model.cov()).cwiseAbs().maxCoeff() <= 1e-15);

    const GaussianDist single = discretize(model, std::vector<Eigen::Index>{3});
    CHECK(single.dim() == 1);
    CHECK(single.mean()(0) == model.mean()(3));
    CHECK(single.cov()(0, 0) == doctest::Approx(model.cov()(3, 3)));

    // Submatrix extraction oracle on a larger model.
    const GpModel big = props::random_kernel_model(rng, 60, 2, 1e-4);
    std::vector<Eigen::Index> subset;
    for (Eigen::Index i = 0; i < 20; ++i) subset.push_back(i * 3);
    const GaussianDist sub = discretize(big, subset);
    for (std::size_t a = 0; a < subset.size(); ++a) {
        CHECK(sub.mean()(static_cast<Eigen::Index>(a)) == big.mean()(subset[a]));
        for (std::size_t b = 0; b < subset.size(); ++b) {
            CHECK(sub.cov()(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) ==
                  doctest::Approx(big.cov()(subset[a], subset[b])));
        }
    }

    Eigen::MatrixXd off(1, 2);
    off << 9.0, 9.0;
    CHECK_THROWS_AS(discretize(model, off), RowNotOnGrid);
}

TEST_CASE("gp property suites (smoke)") {
    CHECK_NOTHROW(props::prop_posterior_empty_idempotent(25, 21));
    CHECK_NOTHROW(props::prop_sequential_equals_batch(25, 22));
    CHECK_NOTHROW(props::prop_posterior_cov_ignores_outputs(25, 23));
    CHECK_NOTHROW(props::prop_matern_discretize_positive(25, 24));
}
