#pragma once

#include <Eigen/Dense>

#include <vector>

#include "lssboost/boost.hpp"

namespace lssboost {

struct OracleResult {
    std::vector<std::vector<Eigen::VectorXd>> coefficients;  ///< [q][block], like FitState
    bool converged = false;
    int iterations = 0;
    double score_norm = 0.0;                 ///< max-norm of the penalized score
    std::vector<double> penalized_loglik;    ///< after every outer cycle
};

struct OracleOptions {
    int max_cycles = 500;
    double tolerance = 1e-10;        ///< change of the penalized log-likelihood
    double score_tolerance = 1e-6;
    int max_halvings = 30;
};

/// Maximizes l(theta) - 1/2 sum_j lambda_j theta_j' P_j theta_j for the
/// Gaussian location-scale family at fixed lambdas by backfitting: an exact
/// weighted penalized least-squares step for mu, then a damped Newton step
/// for log sigma. `offsets` (mu, log sigma) enter both predictors additively.
OracleResult newton_fit_gaussian_ls(const BlockSet& blocks, const Eigen::VectorXd& y,
                                    const std::vector<double>& offsets = {0.0, 0.0},
                                    const OracleOptions& options = {});

}  // namespace lssboost
