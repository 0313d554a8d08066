#include "lssboost/grid.hpp"

#include <cmath>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

Grid::Grid(Eigen::VectorXd points) : points_(std::move(points)) {
    const Eigen::Index R = points_.size();
    if (R < 2) {
        throw InvalidGridError("need at least two points, got " + std::to_string(R));
    }
    for (Eigen::Index r = 0; r < R; ++r) {
        if (!std::isfinite(points_(r))) {
            throw InvalidGridError("non-finite point at index " + std::to_string(r));
        }
        if (r > 0 && !(points_(r) > points_(r - 1))) {
            throw InvalidGridError("points not strictly increasing at index " +
                                   std::to_string(r));
        }
    }
    weights_.resize(R);
    weights_(0) = 0.5 * (points_(1) - points_(0));
    weights_(R - 1) = 0.5 * (points_(R - 1) - points_(R - 2));
    for (Eigen::Index r = 1; r + 1 < R; ++r) {
        weights_(r) = 0.5 * (points_(r + 1) - points_(r - 1));
    }
}

double Grid::integrate(const Eigen::Ref<const Eigen::VectorXd>& f) const {
    if (f.size() != size()) {
        throw DimensionError("integrand has " + std::to_string(f.size()) +
                             " values, grid has " + std::to_string(size()));
    }
    return weights_.dot(f);
}

bool Grid::same_points(const Grid& other, double tol) const {
    if (other.size() != size()) return false;
    return ((points_ - other.points_).array().abs() <= tol).all();
}

Grid make_grid(const std::vector<double>& points) {
    return Grid(Eigen::Map<const Eigen::VectorXd>(points.data(),
                                                  static_cast<Eigen::Index>(points.size())));
}

Grid uniform_grid(double lo, double hi, Eigen::Index R) {
    return Grid(Eigen::VectorXd::LinSpaced(R, lo, hi));
}

}  // namespace lssboost
