#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lssboost {

/// Evaluation points of a functional domain together with trapezoidal
/// quadrature weights.
class Grid {
public:
    /// Throws InvalidGridError unless there are at least two finite,
    /// strictly increasing points.
    explicit Grid(Eigen::VectorXd points);

    const Eigen::VectorXd& points() const noexcept { return points_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    Eigen::Index size() const noexcept { return points_.size(); }
    double lower() const noexcept { return points_(0); }
    double upper() const noexcept { return points_(points_.size() - 1); }

    /// Quadrature of f sampled on the grid.
    double integrate(const Eigen::Ref<const Eigen::VectorXd>& f) const;

    bool same_points(const Grid& other, double tol = 1e-12) const;

private:
    Eigen::VectorXd points_;
    Eigen::VectorXd weights_;
};

Grid make_grid(const std::vector<double>& points);

/// R equally spaced points on [lo, hi].
Grid uniform_grid(double lo, double hi, Eigen::Index R);

}  // namespace lssboost
