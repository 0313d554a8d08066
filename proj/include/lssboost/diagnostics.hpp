#pragma once

#include <Eigen/Dense>

#include <cstdint>

#include "lssboost/family.hpp"
#include "lssboost/grid.hpp"

namespace lssboost {

inline constexpr double kQuantileClamp = 1e-12;

/// Number of probability values clamped to [1e-12, 1 - 1e-12] so far.
std::uint64_t quantile_clamp_activations();

/// Standard normal quantile.
double normal_quantile(double p);

/// Probability integral transform values F(y_i | theta_i).
Eigen::VectorXd pit_values(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                           const ParamVector& params);

/// Phi^-1(F(y_i | theta_i)); the tail nearer to y_i is evaluated directly.
Eigen::VectorXd quantile_residuals(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const ParamVector& params);

/// -2 times the log-likelihood.
double global_deviance(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const ParamVector& params);

/// Quadrature of (truth - estimate)^2 over the grid.
double coef_mse(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                const Eigen::Ref<const Eigen::VectorXd>& truth, const Grid& grid);

/// sum l(theta_hat) / sum l(theta_true) on the same responses.
double likelihood_quotient(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                           const ParamVector& estimated, const ParamVector& truth);

/// Sample autocorrelations at lags 1..max_lag.
Eigen::VectorXd acf(const Eigen::Ref<const Eigen::VectorXd>& x, int max_lag);

/// Half-width 1.96 / sqrt(N) of the pointwise white-noise band.
double acf_band(Eigen::Index n);

/// Sorted sample quantiles against standard normal quantiles at (i - 0.5) / n.
struct QQData {
    Eigen::VectorXd theoretical;
    Eigen::VectorXd sample;
};
QQData qq_normal(const Eigen::Ref<const Eigen::VectorXd>& residuals);

/// Kolmogorov-Smirnov statistic of x against N(0, 1).
double ks_statistic_normal(const Eigen::Ref<const Eigen::VectorXd>& x);

/// Pearson chi-square statistic of values in [0, 1] over equal-width bins.
double chi_square_uniform(const Eigen::Ref<const Eigen::VectorXd>& v, int bins);

}  // namespace lssboost
