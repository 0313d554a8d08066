#include "lssboost/fpca.hpp"

#include <cmath>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

FpcBasis fpca(const Eigen::Ref<const Eigen::MatrixXd>& x, const Grid& grid, double pve) {
    if (!(pve > 0.0 && pve <= 1.0)) {
        throw ConfigError("pve must lie in (0, 1], got " + std::to_string(pve));
    }
    if (x.rows() < 3) throw DimensionError("fpca needs at least 3 curves");
    if (x.cols() != grid.size()) {
        throw DimensionError("curves have " + std::to_string(x.cols()) + " points, grid " +
                             std::to_string(grid.size()));
    }
    const double n = static_cast<double>(x.rows());

    FpcBasis out;
    out.pve = pve;
    out.mean_curve = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - out.mean_curve.transpose();
    const Eigen::MatrixXd cov = centered.transpose() * centered / (n - 1.0);

    // Symmetrized operator W^1/2 C W^1/2; its eigenvectors v give e = W^-1/2 v.
    const Eigen::VectorXd root_w = grid.weights().array().sqrt();
    const Eigen::MatrixXd op = root_w.asDiagonal() * cov * root_w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);
    if (eig.info() != Eigen::Success) throw NumericalError("fpca eigendecomposition failed");

    const Eigen::Index R = grid.size();
    const double largest = eig.eigenvalues()(R - 1);
    if (!(largest > 1e-14 * std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff()))) {
        throw ZeroBasisError("covariance of the curves vanishes");
    }
    const double tol = 1e-12 * largest;
    Eigen::Index positive = 0;
    while (positive < R && eig.eigenvalues()(R - 1 - positive) > tol) ++positive;

    out.all_eigenvalues.resize(positive);
    for (Eigen::Index k = 0; k < positive; ++k) {
        out.all_eigenvalues(k) = eig.eigenvalues()(R - 1 - k);
    }
    const double total = out.all_eigenvalues.sum();
    Eigen::Index keep = 0;
    double cumulative = 0.0;
    while (keep < positive) {
        cumulative += out.all_eigenvalues(keep);
        ++keep;
        if (cumulative / total >= pve - 1e-12) break;
    }
    out.explained = cumulative / total;
    out.eigenvalues = out.all_eigenvalues.head(keep);

    out.eigenfunctions.resize(R, keep);
    for (Eigen::Index k = 0; k < keep; ++k) {
        Eigen::VectorXd e = eig.eigenvectors().col(R - 1 - k).array() / root_w.array();
        Eigen::Index at;
        e.cwiseAbs().maxCoeff(&at);
        if (e(at) < 0.0) e = -e;
        out.eigenfunctions.col(k) = e;
    }
    out.scores = out.project(x, grid);
    return out;
}

Eigen::MatrixXd FpcBasis::project(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                  const Grid& grid) const {
    if (x.cols() != eigenfunctions.rows() || grid.size() != eigenfunctions.rows()) {
        throw IncompatibleGridError("curves do not match the fpca grid");
    }
    const Eigen::MatrixXd centered = x.rowwise() - mean_curve.transpose();
    return centered * grid.weights().asDiagonal() * eigenfunctions;
}

Eigen::MatrixXd FpcBasis::penalty(FpcPenalty kind) const {
    if (kind == FpcPenalty::identity) return Eigen::MatrixXd::Identity(size(), size());
    return eigenvalues.cwiseInverse().asDiagonal();
}

}  // namespace lssboost
