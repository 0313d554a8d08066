#include "lssboost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

namespace {

struct Stacked {
    Eigen::MatrixXd design;
    Eigen::MatrixXd penalty;
    std::vector<Eigen::Index> offsets;
    Eigen::Index unpenalized = 0;
};

Stacked stack(const std::vector<DesignBlock>& blocks, Eigen::Index n) {
    Eigen::Index total = 0;
    for (const auto& b : blocks) {
        if (b.design.rows() != n) throw DimensionError("block '" + b.label + "' row mismatch");
        total += b.size();
    }
    Stacked s;
    s.design.resize(n, total);
    s.penalty = Eigen::MatrixXd::Zero(total, total);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        s.offsets.push_back(at);
        s.design.middleCols(at, b.size()) = b.design;
        if (b.lambda > 0.0) {
            s.penalty.block(at, at, b.size(), b.size()) = b.lambda * b.penalty;
        } else {
            s.unpenalized += b.size();
        }
        at += b.size();
    }
    return s;
}

/// The oracle does not regularize: X'X + P is positive definite exactly when
/// X has full column rank on the nullspace of P.
void require_full_rank(const Stacked& s, const std::string& label) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.penalty);
    const Eigen::VectorXd& ev = eig.eigenvalues();
    const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Eigen::Index null_dim = 0;
    while (null_dim < ev.size() && ev(null_dim) <= 1e-10 * top) ++null_dim;
    if (null_dim == 0) return;
    const Eigen::MatrixXd restricted = s.design * eig.eigenvectors().leftCols(null_dim);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(restricted);
    qr.setThreshold(1e-10);
    if (qr.rank() < null_dim) throw RankDeficiencyError(label);
}

struct Objective {
    const Eigen::VectorXd& y;
    const Stacked& mu;
    const Stacked& sigma;
    double mu_offset;
    double sigma_offset;

    double operator()(const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma) const {
        const Eigen::ArrayXd r = y.array() - mu_offset - (mu.design * beta).array();
        const Eigen::ArrayXd eta = sigma_offset + (sigma.design * gamma).array();
        const double ll = (-0.5 * std::log(2.0 * std::numbers::pi) - eta -
                           0.5 * r.square() * (-2.0 * eta).exp()).sum();
        return ll - 0.5 * beta.dot(mu.penalty * beta) - 0.5 * gamma.dot(sigma.penalty * gamma);
    }
};

}  // namespace

OracleResult newton_fit_gaussian_ls(const BlockSet& blocks, const Eigen::VectorXd& y,
                                    const std::vector<double>& offsets,
                                    const OracleOptions& options) {
    if (blocks.size() != 2 || offsets.size() != 2) {
        throw ConfigError("the Gaussian location-scale oracle needs exactly two parameters");
    }
    const Eigen::Index n = y.size();
    const Stacked mu = stack(blocks[0], n);
    const Stacked sigma = stack(blocks[1], n);
    if (n <= mu.unpenalized + sigma.unpenalized) {
        throw DimensionError("too few observations for the unpenalized columns");
    }
    require_full_rank(mu, "mu");
    require_full_rank(sigma, "sigma");
    const Objective objective{y, mu, sigma, offsets[0], offsets[1]};

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(mu.design.cols());
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(sigma.design.cols());
    const Eigen::VectorXd target = y.array() - offsets[0];

    OracleResult out;
    double previous = objective(beta, gamma);
    auto score_norm = [&]() {
        const Eigen::ArrayXd eta = offsets[1] + (sigma.design * gamma).array();
        const Eigen::ArrayXd inv_var = (-2.0 * eta).exp();
        const Eigen::ArrayXd r = target.array() - (mu.design * beta).array();
        const Eigen::VectorXd g_mu =
            mu.design.transpose() * (r * inv_var).matrix() - mu.penalty * beta;
        const Eigen::VectorXd g_sigma =
            sigma.design.transpose() * (r.square() * inv_var - 1.0).matrix() -
            sigma.penalty * gamma;
        return std::max(g_mu.cwiseAbs().maxCoeff(), g_sigma.cwiseAbs().maxCoeff());
    };

    for (int cycle = 1; cycle <= options.max_cycles; ++cycle) {
        out.iterations = cycle;

        // mu given sigma: exact weighted penalized least squares
        {
            const Eigen::VectorXd eta = offsets[1] + (sigma.design * gamma).array();
            const Eigen::VectorXd w = (-2.0 * eta.array()).exp();
            const Eigen::MatrixXd system =
                mu.design.transpose() * w.asDiagonal() * mu.design + mu.penalty;
            const auto llt = factor_penalized(system, "mu");
            beta = llt.solve(mu.design.transpose() * w.cwiseProduct(target));
        }
        const double after_mu = objective(beta, gamma);

        // log sigma given mu: damped Newton on the exact likelihood
        bool improved = false;
        {
            const Eigen::ArrayXd r2 = (target - mu.design * beta).array().square();
            const Eigen::ArrayXd eta = offsets[1] + (sigma.design * gamma).array();
            const Eigen::ArrayXd scaled = r2 * (-2.0 * eta).exp();
            const Eigen::VectorXd grad =
                sigma.design.transpose() * (scaled - 1.0).matrix() - sigma.penalty * gamma;
            const Eigen::MatrixXd hess =
                sigma.design.transpose() * (2.0 * scaled).matrix().asDiagonal() * sigma.design +
                sigma.penalty;
            const auto llt = factor_penalized(hess, "sigma");
            const Eigen::VectorXd step = llt.solve(grad);
            double scale = 1.0;
            for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
                const Eigen::VectorXd candidate = gamma + scale * step;
                const double value = objective(beta, candidate);
                if (std::isfinite(value) && value >= after_mu - 1e-12) {
                    gamma = candidate;
                    improved = true;
                    break;
                }
            }
        }
        const double current = objective(beta, gamma);
        out.penalized_loglik.push_back(current);
        out.score_norm = score_norm();
        const bool small_change = std::abs(current - previous) < options.tolerance;
        previous = current;
        if (out.score_norm < options.score_tolerance && small_change) {
            out.converged = true;
            break;
        }
        if (!improved) break;
    }
    out.converged = out.converged || out.score_norm < options.score_tolerance;

    out.coefficients.resize(2);
    for (std::size_t j = 0; j < blocks[0].size(); ++j) {
        out.coefficients[0].push_back(beta.segment(mu.offsets[j], blocks[0][j].size()));
    }
    for (std::size_t j = 0; j < blocks[1].size(); ++j) {
        out.coefficients[1].push_back(gamma.segment(sigma.offsets[j], blocks[1][j].size()));
    }
    return out;
}

}  // namespace lssboost
