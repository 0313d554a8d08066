#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "lssboost/error.hpp"
#include "lssboost/tuning.hpp"
#include "sim_case.hpp"
#include "support.hpp"

using namespace lssboost;
using lssboost::testing::max_abs_diff;

namespace {

struct Prepared {
    Dataset data;
    BuiltModel model;
};

Prepared prepared(const std::string& shape, std::uint64_t seed, Eigen::Index N) {
    const auto c = lssboost::testing::make_sim_case(VarianceRegime::constant, shape, seed, N, 0);
    Prepared p{c.train, {}};
    p.model = build_model(lssboost::testing::sim_model_spec(), p.data);
    return p;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST(StopGrid, TenLevelsOnFiveHundred) {
    const StopGrid g = make_stop_grid({500, 500}, 10);
    EXPECT_LE(g.size(), 100u);
    EXPECT_EQ(g.size(), 100u);
    for (const auto& p : g) {
        ASSERT_EQ(p.size(), 2u);
        for (int m : p) {
            EXPECT_GE(m, 1);
            EXPECT_LE(m, 500);
        }
    }
    EXPECT_EQ(g.front(), (std::vector<int>{1, 1}));
    EXPECT_EQ(g.back(), (std::vector<int>{500, 500}));
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
}

TEST(StopGrid, SingleLevelIsTheMaximum) {
    const StopGrid g = make_stop_grid({30, 7}, 1);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_EQ(g[0], (std::vector<int>{30, 7}));
}

TEST(StopGrid, CoversOneToFiveThousand) {
    const std::vector<int> v = log_spaced_integers(5000, 8);
    EXPECT_EQ(v.front(), 1);
    EXPECT_EQ(v.back(), 5000);
    EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
    EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
}

TEST(StopGrid, DeduplicatesSmallMaxima) {
    const std::vector<int> v = log_spaced_integers(3, 10);
    EXPECT_EQ(v, (std::vector<int>{1, 2, 3}));
    EXPECT_THROW(log_spaced_integers(0, 3), ConfigError);
    EXPECT_THROW(log_spaced_integers(10, 0), ConfigError);
}

TEST(BlockBootstrap, FullLengthBlockIsTheWholeSeries) {
    const FoldWeights f = block_bootstrap_weights(40, 5, 40, 1);
    EXPECT_EQ(f.counts.minCoeff(), 1.0);
    EXPECT_EQ(f.counts.maxCoeff(), 1.0);
    for (Eigen::Index b = 0; b < 5; ++b) EXPECT_EQ(f.counts.row(b).sum(), 40.0);
}

TEST(BlockBootstrap, UnitBlocksAreIidBootstrap) {
    const FoldWeights f = block_bootstrap_weights(50, 1000, 1, 2);
    const Eigen::VectorXd mean = f.counts.colwise().mean().transpose();
    EXPECT_LT((mean.array() - 1.0).abs().maxCoeff(), 0.1);
    for (Eigen::Index b = 0; b < 1000; ++b) ASSERT_EQ(f.counts.row(b).sum(), 50.0);
}

TEST(BlockBootstrap, BlocksAreContiguousAndTruncated) {
    const Eigen::Index N = 53;
    const int L = 10;
    const FoldWeights f = block_bootstrap_weights(N, 50, L, 3);
    for (Eigen::Index b = 0; b < 50; ++b) {
        EXPECT_EQ(f.counts.row(b).sum(), static_cast<double>(N));
        EXPECT_GE(f.counts.row(b).minCoeff(), 0.0);
    }
    const FoldWeights g = block_bootstrap_weights(N, 50, L, 3, BlockScheme::non_overlapping);
    // Non-overlapping blocks start at multiples of L, so the trailing
    // remainder 50..52 is never drawn; within an aligned block only the one
    // truncated draw can leave a step down.
    EXPECT_EQ(g.counts.rightCols(3).maxCoeff(), 0.0);
    for (Eigen::Index b = 0; b < 50; ++b) {
        int steps = 0;
        for (Eigen::Index k = 0; k + 1 < 50; ++k) {
            if ((k + 1) % L == 0) continue;
            const double d = g.counts(b, k) - g.counts(b, k + 1);
            EXPECT_TRUE(d == 0.0 || d == 1.0);
            steps += d == 1.0;
        }
        EXPECT_LE(steps, 1);
    }
}

TEST(BlockBootstrap, RejectsBadBlockLength) {
    EXPECT_THROW(block_bootstrap_weights(10, 5, 11, 1), ConfigError);
    EXPECT_THROW(block_bootstrap_weights(10, 5, 0, 1), ConfigError);
    EXPECT_THROW(block_bootstrap_weights(10, 0, 2, 1), ConfigError);
}

TEST(BlockBootstrap, SeedDeterminesWeights) {
    const FoldWeights a = block_bootstrap_weights(100, 20, 20, 9);
    const FoldWeights b = block_bootstrap_weights(100, 20, 20, 9);
    const FoldWeights c = block_bootstrap_weights(100, 20, 20, 10);
    EXPECT_TRUE(a.counts == b.counts);
    EXPECT_FALSE(a.counts == c.counts);
}

TEST(CvFolds, EachObservationIsLeftOutOnce) {
    const FoldWeights f = cv_fold_weights(103, 5, 4);
    ASSERT_EQ(f.folds(), 5);
    for (Eigen::Index i = 0; i < 103; ++i) {
        int out = 0;
        for (Eigen::Index b = 0; b < 5; ++b) {
            const double w = f.counts(b, i);
            ASSERT_TRUE(w == 0.0 || w == 1.0);
            out += w == 0.0;
        }
        EXPECT_EQ(out, 1) << "observation " << i;
    }
    for (Eigen::Index b = 0; b < 5; ++b) {
        const double held = 103 - f.counts.row(b).sum();
        EXPECT_GE(held, 20.0);
        EXPECT_LE(held, 21.0);
    }
    EXPECT_THROW(cv_fold_weights(10, 1, 1), ConfigError);
    EXPECT_THROW(cv_fold_weights(10, 11, 1), ConfigError);
}

TEST(FitPath, GridStatesEqualFreshFits) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 31, 150);
    const FoldWeights folds = cv_fold_weights(150, 4, 31);
    const Eigen::VectorXd w = folds.counts.row(2).transpose();
    const Booster booster(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, w);
    StopGrid grid = make_stop_grid({40, 25}, 4);
    grid.push_back({0, 7});
    grid.push_back({13, 0});
    const auto path = fit_path(booster, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const FitState fresh = boost_fit(*normal, p.data.response, p.model.blocks, {{0.1, 0.01}, grid[k], w, false});
        EXPECT_EQ(path[k].updates, grid[k]);
        for (int q = 0; q < 2; ++q) {
            EXPECT_LT(max_abs_diff(path[k].params.predictors[q], fresh.params.predictors[q]), 1e-10);
            for (std::size_t j = 0; j < fresh.coefficients[q].size(); ++j) {
                EXPECT_LT(max_abs_diff(path[k].coefficients[q][j], fresh.coefficients[q][j]), 1e-10)
                    << "grid point " << k;
            }
        }
    }
}

TEST(CvRisk, SinglePointGridReturnsIt) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 32, 120);
    const RiskSurface s = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, {{17, 4}},
                                  cv_fold_weights(120, 3, 1));
    EXPECT_EQ(s.best, (std::vector<int>{17, 4}));
    EXPECT_EQ(s.best_index, 0u);
}

TEST(CvRisk, SelectedPointBeatsGridMaximum) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 33, 200);
    const StopGrid grid = make_stop_grid({300, 300}, 5);
    const RiskSurface s = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, grid,
                                  cv_fold_weights(200, 5, 2));
    EXPECT_LE(s.mean_risk(static_cast<Eigen::Index>(s.best_index)), s.mean_risk(s.mean_risk.size() - 1));
    EXPECT_EQ(s.mean_risk.minCoeff(), s.mean_risk(static_cast<Eigen::Index>(s.best_index)));
    EXPECT_EQ(s.fold_risk.cols(), 5);
    EXPECT_TRUE(s.skipped_folds.empty());
}

TEST(CvRisk, PureNoiseSelectsEarlyStop) {
    const auto normal = make_family("normal-ls");
    const int max = 1000;
    std::vector<double> mu_stop, sigma_stop;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Prepared p = prepared("coef0", 100 + seed, 200);
        const RiskSurface s = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01},
                                      make_stop_grid({max, max}, 8), cv_fold_weights(200, 5, seed), 4);
        mu_stop.push_back(s.best[0]);
        sigma_stop.push_back(s.best[1]);
    }
    EXPECT_LE(median(mu_stop), 0.1 * max);
    EXPECT_LE(median(sigma_stop), 0.1 * max);
}

TEST(CvRisk, SkipsFoldsWithoutHeldOutRows) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 34, 100);
    FoldWeights folds = cv_fold_weights(100, 4, 3);
    folds.counts.row(1).setOnes();
    const RiskSurface s = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01},
                                  make_stop_grid({20, 20}, 3), folds);
    EXPECT_EQ(s.skipped_folds, std::vector<int>{1});
    EXPECT_TRUE(std::isnan(s.fold_risk(0, 1)));
    const Eigen::VectorXd used = (s.fold_risk.col(0) + s.fold_risk.col(2) + s.fold_risk.col(3)) / 3.0;
    EXPECT_LT(max_abs_diff(used, s.mean_risk), 1e-12);
    folds.counts.setOnes();
    EXPECT_THROW(cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, {{5, 5}}, folds), DataError);
}

TEST(CvRisk, ParallelFoldsMatchSequential) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 35, 150);
    const StopGrid grid = make_stop_grid({100, 100}, 4);
    const FoldWeights folds = block_bootstrap_weights(150, 6, 15, 4);
    const RiskSurface a = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, grid, folds, 1);
    const RiskSurface b = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, grid, folds, 4);
    const RiskSurface c = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01}, grid, folds, 4);
    EXPECT_TRUE(a.mean_risk == b.mean_risk);
    EXPECT_TRUE(b.mean_risk == c.mean_risk);
    EXPECT_EQ(a.best, b.best);
}

TEST(CvRisk, TiesPreferFewestIterations) {
    // Identical fold risks everywhere: the intercept-only model never moves
    // because the offsets are already its ML fit.
    const auto normal = make_family("normal-ls");
    const Eigen::Index n = 60;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Eigen::VectorXd y(n);
    for (auto& v : y) v = z(rng);
    const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(n, 1);
    const DesignBlock icpt{"intercept", one, Eigen::MatrixXd::Zero(1, 1), 0.0, {}};
    const BlockSet blocks{{icpt}, {icpt}};
    FoldWeights folds{Eigen::MatrixXd::Ones(1, n)};
    folds.counts(0, 0) = 0.0;
    const StopGrid grid{{3, 1}, {1, 3}, {2, 2}, {1, 2}};
    const RiskSurface s = cv_risk(*normal, y, blocks, {0.1, 0.01}, grid, folds);
    ASSERT_EQ(s.mean_risk.maxCoeff(), s.mean_risk.minCoeff());
    EXPECT_EQ(s.best, (std::vector<int>{1, 2}));
}

TEST(CvRisk, FunctionalLearnersCarrySignalInCoef1) {
    const auto normal = make_family("normal-ls");
    const Prepared p = prepared("coef1", 36, 500);
    const RiskSurface s = cv_risk(*normal, p.data.response, p.model.blocks, {0.1, 0.01},
                                  make_stop_grid({2000, 2000}, 8), cv_fold_weights(500, 5, 36), 4);
    const FitState fit = boost_fit(*normal, p.data.response, p.model.blocks, {{0.1, 0.01}, s.best, {}, false});
    EXPECT_GT(functional_selection_share(p.model, fit, 0), 0.5);
    EXPECT_GT(s.best[0], 1);
}
