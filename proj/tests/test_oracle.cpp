#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lssboost/basis.hpp"
#include "lssboost/boost.hpp"
#include "lssboost/error.hpp"
#include "lssboost/oracle.hpp"
#include "support.hpp"

using namespace lssboost;
using lssboost::testing::max_abs_diff;

namespace {

DesignBlock plain_block(std::string label, Eigen::MatrixXd design) {
    const Eigen::Index K = design.cols();
    return DesignBlock{std::move(label), std::move(design), Eigen::MatrixXd::Zero(K, K), 0.0, {}};
}

struct Covariates {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Covariates heteroscedastic(Eigen::Index n, unsigned seed, double slope_sigma = 0.4) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Covariates c{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        c.x(i, 0) = u(rng);
        c.x(i, 1) = u(rng);
        const double mu = 0.5 + 1.0 * c.x(i, 0) - 0.7 * c.x(i, 1);
        const double sigma = std::exp(-0.3 + slope_sigma * c.x(i, 0) - 0.2 * c.x(i, 1));
        c.y(i) = mu + sigma * z(rng);
    }
    return c;
}

std::vector<DesignBlock> linear_blocks(const Eigen::MatrixXd& x) {
    return {plain_block("intercept", Eigen::MatrixXd::Ones(x.rows(), 1)), plain_block("x1", x.col(0)),
            plain_block("x2", x.col(1))};
}

}  // namespace

TEST(Oracle, InterceptOnlyMatchesClosedForm) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z(3.0, 2.0);
    Eigen::VectorXd y(250);
    for (auto& v : y) v = z(rng);
    const std::vector<DesignBlock> icpt{plain_block("intercept", Eigen::MatrixXd::Ones(250, 1))};
    const OracleResult r = newton_fit_gaussian_ls({icpt, icpt}, y);
    ASSERT_TRUE(r.converged);
    const double mean = y.mean();
    const double var = (y.array() - mean).square().mean();
    EXPECT_NEAR(r.coefficients[0][0](0), mean, 1e-10);
    EXPECT_NEAR(std::exp(2.0 * r.coefficients[1][0](0)), var, 1e-10);
}

TEST(Oracle, OffsetsEnterAdditively) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z(3.0, 2.0);
    Eigen::VectorXd y(200);
    for (auto& v : y) v = z(rng);
    const std::vector<DesignBlock> icpt{plain_block("intercept", Eigen::MatrixXd::Ones(200, 1))};
    const OracleResult a = newton_fit_gaussian_ls({icpt, icpt}, y);
    const OracleResult b = newton_fit_gaussian_ls({icpt, icpt}, y, {1.0, -0.5});
    EXPECT_NEAR(b.coefficients[0][0](0) + 1.0, a.coefficients[0][0](0), 1e-10);
    EXPECT_NEAR(b.coefficients[1][0](0) - 0.5, a.coefficients[1][0](0), 1e-10);
}

TEST(Oracle, HomoscedasticMuEqualsOls) {
    const Covariates c = heteroscedastic(300, 3, 0.0);
    const std::vector<DesignBlock> mu = linear_blocks(c.x);
    const std::vector<DesignBlock> sigma{plain_block("intercept", Eigen::MatrixXd::Ones(300, 1))};
    const OracleResult r = newton_fit_gaussian_ls({mu, sigma}, c.y);
    ASSERT_TRUE(r.converged);
    Eigen::MatrixXd X(300, 3);
    X << Eigen::VectorXd::Ones(300), c.x;
    const Eigen::VectorXd ols = X.colPivHouseholderQr().solve(c.y);
    EXPECT_NEAR(r.coefficients[0][0](0), ols(0), 1e-8);
    EXPECT_NEAR(r.coefficients[0][1](0), ols(1), 1e-8);
    EXPECT_NEAR(r.coefficients[0][2](0), ols(2), 1e-8);
    const double rss = (c.y - X * ols).squaredNorm() / 300.0;
    EXPECT_NEAR(std::exp(2.0 * r.coefficients[1][0](0)), rss, 1e-8);
}

TEST(Oracle, ScoreVanishesAndObjectiveIncreases) {
    const Covariates c = heteroscedastic(400, 4);
    const auto blocks = linear_blocks(c.x);
    const OracleResult r = newton_fit_gaussian_ls({blocks, blocks}, c.y);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(r.score_norm, 1e-6);
    for (std::size_t k = 1; k < r.penalized_loglik.size(); ++k) {
        EXPECT_GE(r.penalized_loglik[k] - r.penalized_loglik[k - 1], -1e-12) << "cycle " << k;
    }
    // Independent check of the score from the coefficients alone.
    Eigen::MatrixXd X(400, 3);
    X << Eigen::VectorXd::Ones(400), c.x;
    Eigen::VectorXd beta(3), gamma(3);
    for (int j = 0; j < 3; ++j) {
        beta(j) = r.coefficients[0][j](0);
        gamma(j) = r.coefficients[1][j](0);
    }
    const Eigen::ArrayXd inv_var = (-2.0 * (X * gamma).array()).exp();
    const Eigen::ArrayXd res = (c.y - X * beta).array();
    EXPECT_LT((X.transpose() * (res * inv_var).matrix()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT((X.transpose() * (res.square() * inv_var - 1.0).matrix()).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Oracle, HugePenaltyFlattensSplineBlock) {
    const Covariates c = heteroscedastic(300, 5);
    const BSplineBasis basis(-1.0, 1.0, 12, 3);
    DesignBlock spline{"s(x1)", basis.evaluate(c.x.col(0)), difference_penalty(12, 1), 1e12, {}};
    // The spline basis sums to one, so it carries the intercept itself.
    const std::vector<DesignBlock> sigma{plain_block("intercept", Eigen::MatrixXd::Ones(300, 1))};
    const OracleResult r = newton_fit_gaussian_ls({{spline}, sigma}, c.y);
    const Eigen::VectorXd contribution = spline.design * r.coefficients[0][0];
    EXPECT_LT(contribution.maxCoeff() - contribution.minCoeff(), 1e-6);
    EXPECT_THROW(newton_fit_gaussian_ls({{sigma[0], spline}, sigma}, c.y), RankDeficiencyError);

    spline.lambda = 1e-2;
    const OracleResult loose = newton_fit_gaussian_ls({{spline}, sigma}, c.y);
    const Eigen::VectorXd wiggly = spline.design * loose.coefficients[0][0];
    EXPECT_GT(wiggly.maxCoeff() - wiggly.minCoeff(), 0.5);
}

TEST(Oracle, BoostingConvergesToOracle) {
    const auto normal = make_family("normal-ls");
    const Covariates c = heteroscedastic(500, 6);
    const auto blocks = linear_blocks(c.x);
    const BlockSet set{blocks, blocks};
    const FitState fit = boost_fit(*normal, c.y, set, {{0.1, 0.01}, {50000, 50000}, {}, false});
    const OracleResult r = newton_fit_gaussian_ls(set, c.y, fit.offsets);
    ASSERT_TRUE(r.converged);
    double worst = 0.0;
    for (int q = 0; q < 2; ++q) {
        for (std::size_t j = 0; j < 3; ++j) {
            worst = std::max(worst, max_abs_diff(fit.coefficients[q][j], r.coefficients[q][j]));
        }
    }
    EXPECT_LT(worst, 1e-3);
}

TEST(Oracle, Errors) {
    const Covariates c = heteroscedastic(50, 7);
    const auto blocks = linear_blocks(c.x);
    EXPECT_THROW(newton_fit_gaussian_ls({blocks}, c.y), ConfigError);
    EXPECT_THROW(newton_fit_gaussian_ls({blocks, blocks}, c.y.head(20)), DimensionError);
    const std::vector<DesignBlock> twins{plain_block("a", c.x.col(0)), plain_block("b", c.x.col(0))};
    EXPECT_THROW(newton_fit_gaussian_ls({twins, blocks}, c.y), RankDeficiencyError);
    const std::vector<DesignBlock> wide{plain_block("wide", Eigen::MatrixXd::Random(50, 30))};
    EXPECT_THROW(newton_fit_gaussian_ls({wide, wide}, c.y), DimensionError);
}
