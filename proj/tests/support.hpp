#pragma once

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "lssboost/rng.hpp"

namespace lssboost::testing {

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    EXPECT_EQ(a.rows(), b.rows());
    EXPECT_EQ(a.cols(), b.cols());
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    return (a - b).cwiseAbs().maxCoeff();
}

/// Central difference of f at x with step h.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Entry-wise Kronecker product by explicit loops.
inline Eigen::MatrixXd brute_kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

inline Eigen::MatrixXd random_normal(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) {
    return random_normal(n, 1, rng);
}

}  // namespace lssboost::testing
