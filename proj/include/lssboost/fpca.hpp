#pragma once

#include <Eigen/Dense>

#include "lssboost/grid.hpp"

namespace lssboost {

enum class FpcPenalty { identity, inverse_eigenvalue };

/// Functional principal components of a sample of curves on a common grid.
struct FpcBasis {
    Eigen::VectorXd mean_curve;      ///< pointwise mean over curves
    Eigen::MatrixXd eigenfunctions;  ///< R x K, orthonormal under the grid quadrature
    Eigen::VectorXd eigenvalues;     ///< nonincreasing
    Eigen::MatrixXd scores;          ///< N x K
    double pve = 1.0;                ///< requested proportion of variance
    double explained = 0.0;          ///< proportion actually retained
    Eigen::VectorXd all_eigenvalues; ///< full positive spectrum

    Eigen::Index size() const noexcept { return eigenfunctions.cols(); }

    /// Scores of new curves observed on the same grid.
    Eigen::MatrixXd project(const Eigen::Ref<const Eigen::MatrixXd>& x, const Grid& grid) const;

    Eigen::MatrixXd penalty(FpcPenalty kind) const;
};

/// Eigendecomposition of the quadrature-weighted sample covariance of x,
/// truncated at the smallest number of components explaining `pve`.
FpcBasis fpca(const Eigen::Ref<const Eigen::MatrixXd>& x, const Grid& grid, double pve);

}  // namespace lssboost
