#include "lssboost/basis.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

BSplineBasis::BSplineBasis(double lower, double upper, int size, int degree,
                           KnotPlacement placement)
    : lower_(lower), upper_(upper), size_(size), degree_(degree) {
    if (degree < 0) throw DimensionError("negative spline degree");
    if (size < degree + 1) {
        throw DimensionError("basis size " + std::to_string(size) + " below degree + 1 = " +
                             std::to_string(degree + 1));
    }
    if (!(upper > lower)) throw InvalidGridError("empty spline domain");
    const int intervals = size - degree;
    knots_.resize(size + degree + 1);
    for (int i = 0; i < knots_.size(); ++i) {
        knots_(i) = lower + (upper - lower) * (i - degree) / intervals;
    }
    if (placement == KnotPlacement::clamped) {
        for (int i = 0; i <= degree; ++i) {
            knots_(i) = lower;
            knots_(size + i) = upper;
        }
    }
}

Eigen::MatrixXd BSplineBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const double span_tol = 1e-12 * (upper_ - lower_);
    const int intervals = size_ - degree_;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.size(), size_);
    Eigen::VectorXd left(degree_ + 1), right(degree_ + 1), values(degree_ + 1);
    for (Eigen::Index r = 0; r < x.size(); ++r) {
        double s = x(r);
        if (!std::isfinite(s) || s < lower_ - span_tol || s > upper_ + span_tol) {
            throw DataError("spline argument " + std::to_string(s) + " outside [" +
                            std::to_string(lower_) + ", " + std::to_string(upper_) + "]");
        }
        s = std::clamp(s, lower_, upper_);
        // knot span [knots(span), knots(span+1)) with the right end folded into the last span
        int interval = static_cast<int>(std::floor((s - lower_) / (upper_ - lower_) * intervals));
        interval = std::clamp(interval, 0, intervals - 1);
        if (interval + 1 < intervals && s >= knots_(degree_ + interval + 1)) ++interval;
        if (interval > 0 && s < knots_(degree_ + interval)) --interval;
        const int span = degree_ + interval;

        values(0) = 1.0;
        for (int j = 1; j <= degree_; ++j) {
            left(j) = s - knots_(span + 1 - j);
            right(j) = knots_(span + j) - s;
            double saved = 0.0;
            for (int k = 0; k < j; ++k) {
                const double temp = values(k) / (right(k + 1) + left(j - k));
                values(k) = saved + right(k + 1) * temp;
                saved = left(j - k) * temp;
            }
            values(j) = saved;
        }
        for (int j = 0; j <= degree_; ++j) out(r, span - degree_ + j) = values(j);
    }
    return out;
}

Eigen::MatrixXd bspline_design(const Grid& grid, int K, int degree) {
    return BSplineBasis(grid.lower(), grid.upper(), K, degree).evaluate(grid.points());
}

Eigen::MatrixXd difference_penalty(int K, int order) {
    if (order < 1) throw DimensionError("difference order must be positive");
    if (K <= order) {
        throw DimensionError("difference penalty needs K > order, got K=" + std::to_string(K) +
                             ", order=" + std::to_string(order));
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Identity(K, K);
    for (int d = 0; d < order; ++d) {
        const Eigen::Index rows = D.rows() - 1;
        D = (D.bottomRows(rows) - D.topRows(rows)).eval();
    }
    return D.transpose() * D;
}

Eigen::MatrixXd signal_design(const Eigen::Ref<const Eigen::MatrixXd>& x, const Grid& grid,
                              const Eigen::Ref<const Eigen::MatrixXd>& basis) {
    if (x.cols() != grid.size() || basis.rows() != grid.size()) {
        throw DimensionError("functional covariate has " + std::to_string(x.cols()) +
                             " columns, grid " + std::to_string(grid.size()) +
                             " points, basis " + std::to_string(basis.rows()) + " rows");
    }
    return (x * grid.weights().asDiagonal()) * basis;
}

Eigen::MatrixXd row_tensor(const Eigen::Ref<const Eigen::MatrixXd>& b1,
                           const Eigen::Ref<const Eigen::MatrixXd>& b2) {
    if (b1.rows() != b2.rows()) {
        throw DimensionError("row tensor of " + std::to_string(b1.rows()) + " and " +
                             std::to_string(b2.rows()) + " rows");
    }
    const Eigen::Index k2 = b2.cols();
    Eigen::MatrixXd out(b1.rows(), b1.cols() * k2);
    for (Eigen::Index k = 0; k < b1.cols(); ++k) {
        out.middleCols(k * k2, k2) = b2.array().colwise() * b1.col(k).array();
    }
    return out;
}

Eigen::MatrixXd kronecker_sum_penalty(const Eigen::Ref<const Eigen::MatrixXd>& p1,
                                      const Eigen::Ref<const Eigen::MatrixXd>& p2,
                                      double lambda1, double lambda2) {
    if (lambda1 < 0.0 || lambda2 < 0.0) {
        throw ConfigError("negative smoothing parameter in tensor penalty");
    }
    if (p1.rows() != p1.cols() || p2.rows() != p2.cols()) {
        throw DimensionError("marginal penalties must be square");
    }
    const Eigen::MatrixXd i1 = Eigen::MatrixXd::Identity(p1.rows(), p1.rows());
    const Eigen::MatrixXd i2 = Eigen::MatrixXd::Identity(p2.rows(), p2.rows());
    Eigen::MatrixXd a = Eigen::kroneckerProduct(Eigen::MatrixXd(p1), i2);
    Eigen::MatrixXd b = Eigen::kroneckerProduct(i1, Eigen::MatrixXd(p2));
    return lambda1 * a + lambda2 * b;
}

Eigen::MatrixXd center_covariate(const Eigen::Ref<const Eigen::MatrixXd>& x, bool standardize) {
    Eigen::MatrixXd out = x.rowwise() - x.colwise().mean();
    if (standardize) {
        const double n = static_cast<double>(out.size());
        const double sd = std::sqrt(out.squaredNorm() / (n - 1.0));
        if (sd > 0.0) out /= sd;
    }
    return out;
}

}  // namespace lssboost
