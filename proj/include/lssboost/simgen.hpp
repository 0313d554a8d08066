#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "lssboost/family.hpp"
#include "lssboost/grid.hpp"

namespace lssboost {

enum class VarianceRegime { constant, linear, exponential };

VarianceRegime parse_regime(const std::string& name);
std::string regime_name(VarianceRegime regime);

/// Variance of the c-th sine coefficient (c = 1..5).
double regime_variance(VarianceRegime regime, int c);

struct SimScenario {
    Eigen::Index N = 500;
    Eigen::Index R = 100;
    int C = 5;
    VarianceRegime regime = VarianceRegime::constant;
    bool rand_start = false;
    std::uint64_t seed = 1;
};

struct FunctionalSample {
    Grid grid;
    Eigen::MatrixXd values;  ///< N x R, column-centered and globally standardized
};

/// x_i(s) = sum_c a_ic sqrt(2) sin(pi (c - 0.5) s) [+ a_i0], a_ic ~ N(0, zeta_c),
/// on R equally spaced points of [0, 1].
FunctionalSample gen_functional_covariates(const SimScenario& scenario);

/// Same draws before centering and standardization.
Eigen::MatrixXd gen_raw_functional_covariates(const SimScenario& scenario, const Grid& grid);

/// coef0 is zero; coef1..coef3 are cubic B-splines with four basis
/// functions on [0, 1] (clamped knots) and fixed coefficient vectors.
Eigen::VectorXd coef_shape(const std::string& name, const Grid& grid);

/// True coefficient curves of one predictor: one curve per covariate.
struct PredictorTruth {
    double intercept = 0.0;
    std::vector<Eigen::VectorXd> curves;
};

struct NormalLsSample {
    Eigen::VectorXd y;
    ParamVector truth;  ///< (mu, log sigma) predictors and (mu, sigma)
};

/// y_i ~ N(mu_i, sigma_i^2) with mu_i = a0 + sum_j int x_ij alpha_j and
/// log sigma_i = b0 + sum_j int x_ij beta_j by trapezoidal quadrature.
NormalLsSample gen_response_normal_ls(const std::vector<const FunctionalSample*>& covariates,
                                      const PredictorTruth& mu, const PredictorTruth& log_sigma,
                                      std::uint64_t seed);

/// One replication of the functional location-scale study: covariate j
/// draws from seed + 7919 (j + 1), the response from seed itself.
struct StudyDesign {
    SimScenario scenario;                  ///< N and seed are taken from the call
    std::vector<std::string> mu_shapes{"coef1", "coef0"};
    std::vector<std::string> sigma_shapes{"coef1", "coef0"};
    double mu_intercept = 0.0;
    double sigma_intercept = 0.0;
};

struct StudySample {
    std::vector<FunctionalSample> covariates;
    PredictorTruth mu;
    PredictorTruth log_sigma;
    NormalLsSample response;
};

StudySample simulate_study(const StudyDesign& design, Eigen::Index N, std::uint64_t seed);

/// Seed offset separating test data from the training draw of the same replication.
inline constexpr std::uint64_t kTestSeedOffset = 1000003;

enum class ArchLagTransform {
    square,      ///< log variance linear in y_{i-j}^2
    log_square,  ///< log variance linear in log y_{i-j}^2
};

struct ArchSpec {
    Eigen::Index N = 1000;
    std::vector<double> alpha{0.0};  ///< alpha_0, alpha_1..alpha_p1
    std::vector<double> beta{0.0};   ///< beta_0, beta_1..beta_p2
    ArchLagTransform transform = ArchLagTransform::square;
    Eigen::Index burn_in = 500;
    std::uint64_t seed = 1;
};

/// y_i ~ N(alpha_0 + sum alpha_j y_{i-j}, exp[beta_0 + sum beta_j g(y_{i-j})]),
/// started from zeros, with the first burn_in draws discarded.
Eigen::VectorXd gen_arch_series(const ArchSpec& spec);

/// Excess kurtosis m4 / m2^2 - 3.
double excess_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace lssboost
