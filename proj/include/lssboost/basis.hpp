#pragma once

#include <Eigen/Dense>

#include "lssboost/grid.hpp"

namespace lssboost {

/// extended: equally spaced knots continued beyond both ends (P-splines).
/// clamped: boundary knots repeated degree+1 times.
enum class KnotPlacement { extended, clamped };

/// B-spline basis on [lower, upper] with equally spaced interior knots.
/// `size` counts basis functions.
class BSplineBasis {
public:
    BSplineBasis(double lower, double upper, int size, int degree,
                 KnotPlacement placement = KnotPlacement::extended);

    int size() const noexcept { return size_; }
    int degree() const noexcept { return degree_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    const Eigen::VectorXd& knots() const noexcept { return knots_; }

    /// Row r holds all basis functions evaluated at x(r). Points outside
    /// [lower, upper] raise a DataError.
    Eigen::MatrixXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

private:
    double lower_;
    double upper_;
    int size_;
    int degree_;
    Eigen::VectorXd knots_;
};

/// R x K design of basis values on the grid points.
Eigen::MatrixXd bspline_design(const Grid& grid, int K, int degree);

/// D'D for the order-th difference operator D on K coefficients.
Eigen::MatrixXd difference_penalty(int K, int order);

/// Entry (i,k) = sum_r weight_r * x(i,r) * basis(r,k).
Eigen::MatrixXd signal_design(const Eigen::Ref<const Eigen::MatrixXd>& x, const Grid& grid,
                              const Eigen::Ref<const Eigen::MatrixXd>& basis);

/// Row-wise Kronecker product; column (k1, k2) sits at k1 * K2 + k2.
Eigen::MatrixXd row_tensor(const Eigen::Ref<const Eigen::MatrixXd>& b1,
                           const Eigen::Ref<const Eigen::MatrixXd>& b2);

/// lambda1 (P1 kron I) + lambda2 (I kron P2), ordered like row_tensor.
Eigen::MatrixXd kronecker_sum_penalty(const Eigen::Ref<const Eigen::MatrixXd>& p1,
                                      const Eigen::Ref<const Eigen::MatrixXd>& p2,
                                      double lambda1, double lambda2);

/// Subtracts column means. With `standardize`, additionally divides every
/// entry by the sample standard deviation of all centered entries.
Eigen::MatrixXd center_covariate(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                 bool standardize = false);

}  // namespace lssboost
