#pragma once

// Shared test utilities: random matrix/distribution generators, a Simpson
// quadrature oracle and the adjusted Rand index.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cmbo/gaussian.hpp"
#include "cmbo/rng.hpp"

namespace test_helpers {

inline Eigen::VectorXd random_vector(cmbo::Rng& rng, Eigen::Index n, double scale = 1.0) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = scale * rng.normal();
    return v;
}

inline Eigen::MatrixXd random_orthogonal(cmbo::Rng& rng, Eigen::Index n) {
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rng.normal();
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return q;
}

/// Symmetric matrix with eigenvalues drawn uniformly from [lo, hi].
inline Eigen::MatrixXd random_spd(cmbo::Rng& rng, Eigen::Index n, double lo = 0.1,
                                  double hi = 10.0) {
    const Eigen::MatrixXd q = random_orthogonal(rng, n);
    Eigen::VectorXd eigs(n);
    for (Eigen::Index i = 0; i < n; ++i) eigs(i) = rng.uniform(lo, hi);
    return 0.5 * (q * eigs.asDiagonal() * q.transpose() +
                  (q * eigs.asDiagonal() * q.transpose()).transpose());
}

inline cmbo::GaussianDist random_gd(cmbo::Rng& rng, Eigen::Index n, double mean_scale = 1.0,
                                    double eig_lo = 0.1, double eig_hi = 4.0) {
    return {random_vector(rng, n, mean_scale), random_spd(rng, n, eig_lo, eig_hi)};
}

/// Random grid with rows comfortably distinct.
inline Eigen::MatrixXd random_grid(cmbo::Rng& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd grid(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) grid(i, j) = rng.uniform();
    }
    return grid;
}

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int intervals) {
    if (intervals % 2 != 0) ++intervals;
    const double h = (b - a) / intervals;
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) {
        sum += f(a + i * h) * (i % 2 == 0 ? 2.0 : 4.0);
    }
    return sum * h / 3.0;
}

inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const auto n = a.size();
    const int ka = *std::max_element(a.begin(), a.end()) + 1;
    const int kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<std::vector<long>> table(static_cast<std::size_t>(ka),
                                         std::vector<long>(static_cast<std::size_t>(kb), 0));
    for (std::size_t i = 0; i < n; ++i) {
        ++table[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];
    }
    const auto choose2 = [](long m) { return 0.5 * static_cast<double>(m) * (m - 1); };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < ka; ++i) {
        long row = 0;
        for (int j = 0; j < kb; ++j) {
            sum_ij += choose2(table[i][j]);
            row += table[i][j];
        }
        sum_a += choose2(row);
    }
    for (int j = 0; j < kb; ++j) {
        long col = 0;
        for (int i = 0; i < ka; ++i) col += table[i][j];
        sum_b += choose2(col);
    }
    const double total = choose2(static_cast<long>(n));
    const double expected = sum_a * sum_b / total;
    const double maximum = 0.5 * (sum_a + sum_b);
    if (maximum == expected) return 1.0;
    return (sum_ij - expected) / (maximum - expected);
}

}  // namespace test_helpers
