#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "lssboost/boost.hpp"

namespace lssboost {

/// Candidate stopping vectors, one entry per parameter each.
using StopGrid = std::vector<std::vector<int>>;

/// length_out log-spaced integers from 1 to max per parameter (deduplicated),
/// combined as a Cartesian product in lexicographic order.
StopGrid make_stop_grid(const std::vector<int>& max_per_parameter, int length_out);

/// Log-spaced integer sequence from 1 to max used by make_stop_grid.
std::vector<int> log_spaced_integers(int max, int length_out);

/// Resampling weights; row b holds the training weights of resample b.
struct FoldWeights {
    Eigen::MatrixXd counts;  ///< B x N, nonnegative integers

    Eigen::Index folds() const noexcept { return counts.rows(); }
    Eigen::Index observations() const noexcept { return counts.cols(); }
};

enum class BlockScheme { moving, non_overlapping };

/// Each resample concatenates ceil(N / L) blocks of length L, truncated to
/// N draws; moving blocks start uniformly at 0..N-L, non-overlapping ones at
/// multiples of L.
FoldWeights block_bootstrap_weights(Eigen::Index N, int B, int block_length, std::uint64_t seed,
                                    BlockScheme scheme = BlockScheme::moving);

/// k-fold cross-validation: each observation is left out of exactly one fold.
FoldWeights cv_fold_weights(Eigen::Index N, int k, std::uint64_t seed);

struct RiskSurface {
    StopGrid grid;
    Eigen::MatrixXd fold_risk;   ///< grid points x folds; NaN for skipped folds
    Eigen::VectorXd mean_risk;   ///< over used folds
    std::vector<int> skipped_folds;
    std::size_t best_index = 0;
    std::vector<int> best;       ///< selected stopping vector
};

/// Out-of-sample risk for every grid point. Each fold is fitted once along a
/// branching schedule; the state at a grid point equals a fresh fit with that
/// stopping vector. `jobs` > 1 evaluates folds concurrently.
RiskSurface cv_risk(const Family& family, const Eigen::VectorXd& y, const BlockSet& blocks,
                    const std::vector<double>& step_lengths, const StopGrid& grid,
                    const FoldWeights& folds, int jobs = 1);

/// States at every grid point for one weight vector, in grid order.
/// Exposed for checking the schedule against fresh fits.
std::vector<FitState> fit_path(const Booster& booster, const StopGrid& grid);

}  // namespace lssboost
