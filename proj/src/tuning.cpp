#include "lssboost/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>

#include "lssboost/error.hpp"
#include "lssboost/rng.hpp"

namespace lssboost {

std::vector<int> log_spaced_integers(int max, int length_out) {
    if (max < 1 || length_out < 1) {
        throw ConfigError("stop grid needs max >= 1 and length_out >= 1");
    }
    if (length_out == 1) return {max};
    std::vector<int> values;
    const double top = std::log(static_cast<double>(max));
    for (int i = 0; i < length_out; ++i) {
        const double v = std::exp(top * i / (length_out - 1));
        values.push_back(std::clamp(static_cast<int>(std::lround(v)), 1, max));
    }
    values.back() = max;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

StopGrid make_stop_grid(const std::vector<int>& max_per_parameter, int length_out) {
    if (max_per_parameter.empty()) throw ConfigError("stop grid needs at least one parameter");
    std::vector<std::vector<int>> axes;
    for (int max : max_per_parameter) axes.push_back(log_spaced_integers(max, length_out));
    StopGrid grid{{}};
    for (const auto& axis : axes) {
        StopGrid next;
        for (const auto& prefix : grid) {
            for (int v : axis) {
                auto point = prefix;
                point.push_back(v);
                next.push_back(std::move(point));
            }
        }
        grid = std::move(next);
    }
    return grid;
}

FoldWeights block_bootstrap_weights(Eigen::Index N, int B, int block_length, std::uint64_t seed,
                                    BlockScheme scheme) {
    if (block_length < 1 || block_length > N) {
        throw ConfigError("block length " + std::to_string(block_length) + " outside [1, " +
                          std::to_string(N) + "]");
    }
    if (B < 1) throw ConfigError("need at least one bootstrap resample");
    Rng rng(seed);
    FoldWeights out{Eigen::MatrixXd::Zero(B, N)};
    const Eigen::Index L = block_length;
    for (int b = 0; b < B; ++b) {
        Eigen::Index drawn = 0;
        while (drawn < N) {
            Eigen::Index start;
            if (scheme == BlockScheme::moving) {
                start = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(N - L + 1)));
            } else {
                start = L * static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(N / L)));
            }
            for (Eigen::Index k = 0; k < L && drawn < N; ++k, ++drawn) {
                out.counts(b, start + k) += 1.0;
            }
        }
    }
    return out;
}

FoldWeights cv_fold_weights(Eigen::Index N, int k, std::uint64_t seed) {
    if (k < 2 || k > N) throw ConfigError("cross-validation needs 2 <= k <= N");
    std::vector<Eigen::Index> order(N);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (Eigen::Index i = N - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(order[i], order[j]);
    }
    FoldWeights out{Eigen::MatrixXd::Ones(k, N)};
    for (Eigen::Index pos = 0; pos < N; ++pos) out.counts(pos % k, order[pos]) = 0.0;
    return out;
}

namespace {

/// Walks the iteration sequence once, copying the state whenever some
/// parameters stop while others continue.
class PathWalker {
public:
    PathWalker(const Booster& booster, const StopGrid& grid,
               std::function<void(std::size_t, const FitState&)> visit)
        : booster_(booster), grid_(grid), visit_(std::move(visit)) {}

    void run() {
        std::vector<std::size_t> all(grid_.size());
        std::iota(all.begin(), all.end(), 0);
        std::vector<bool> active(booster_.num_parameters(), true);
        explore(booster_.initial_state(), active, all);
    }

private:
    void explore(FitState state, const std::vector<bool>& active, std::vector<std::size_t> points) {
        const int Q = static_cast<int>(active.size());
        while (!points.empty()) {
            const int m = state.iteration;
            std::map<std::vector<bool>, std::vector<std::size_t>> frozen;
            std::vector<std::size_t> running;
            for (std::size_t p : points) {
                std::vector<bool> next = active;
                bool changed = false;
                for (int q = 0; q < Q; ++q) {
                    if (active[q] && grid_[p][q] == m) {
                        next[q] = false;
                        changed = true;
                    }
                }
                if (changed) {
                    frozen[next].push_back(p);
                } else {
                    running.push_back(p);
                }
            }
            for (auto& [next, group] : frozen) {
                if (std::none_of(next.begin(), next.end(), [](bool a) { return a; })) {
                    for (std::size_t p : group) visit_(p, state);
                } else {
                    explore(state, next, std::move(group));
                }
            }
            points = std::move(running);
            if (!points.empty()) booster_.advance(state, active);
        }
    }

    const Booster& booster_;
    const StopGrid& grid_;
    std::function<void(std::size_t, const FitState&)> visit_;
};

void check_grid(const StopGrid& grid, int Q) {
    if (grid.empty()) throw ConfigError("stop grid is empty");
    for (const auto& point : grid) {
        if (static_cast<int>(point.size()) != Q) {
            throw ConfigError("stop grid point has the wrong number of parameters");
        }
        for (int m : point) {
            if (m < 0) throw ConfigError("negative stopping iteration in grid");
        }
    }
}

}  // namespace

std::vector<FitState> fit_path(const Booster& booster, const StopGrid& grid) {
    check_grid(grid, booster.num_parameters());
    std::vector<FitState> out(grid.size());
    PathWalker(booster, grid, [&](std::size_t p, const FitState& s) { out[p] = s; }).run();
    return out;
}

RiskSurface cv_risk(const Family& family, const Eigen::VectorXd& y, const BlockSet& blocks,
                    const std::vector<double>& step_lengths, const StopGrid& grid,
                    const FoldWeights& folds, int jobs) {
    validate_boost_inputs(family, blocks, step_lengths);
    check_grid(grid, family.num_parameters());
    if (folds.observations() != y.size()) {
        throw DimensionError("fold weights do not match the number of observations");
    }
    const Eigen::Index B = folds.folds();
    RiskSurface out;
    out.grid = grid;
    out.fold_risk = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(grid.size()), B,
                                              std::numeric_limits<double>::quiet_NaN());

    auto run_fold = [&](Eigen::Index b) {
        const Eigen::VectorXd w = folds.counts.row(b).transpose();
        if (!(w.array() == 0.0).any()) return false;
        Booster booster(family, y, blocks, step_lengths, w);
        PathWalker(booster, grid, [&](std::size_t p, const FitState& s) {
            out.fold_risk(static_cast<Eigen::Index>(p), b) = booster.out_of_sample_risk(s);
        }).run();
        return true;
    };

    std::vector<char> used(B, 0);
    if (jobs <= 1) {
        for (Eigen::Index b = 0; b < B; ++b) used[b] = run_fold(b);
    } else {
        for (Eigen::Index start = 0; start < B; start += jobs) {
            std::vector<std::future<bool>> batch;
            const Eigen::Index stop = std::min<Eigen::Index>(B, start + jobs);
            for (Eigen::Index b = start; b < stop; ++b) {
                batch.push_back(std::async(std::launch::async, run_fold, b));
            }
            for (Eigen::Index b = start; b < stop; ++b) used[b] = batch[b - start].get();
        }
    }

    out.mean_risk = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
    int count = 0;
    for (Eigen::Index b = 0; b < B; ++b) {
        if (!used[b]) {
            std::cerr << "warning: fold " << b << " has no out-of-fold observations; skipped\n";
            out.skipped_folds.push_back(static_cast<int>(b));
            continue;
        }
        out.mean_risk += out.fold_risk.col(b);
        ++count;
    }
    if (count == 0) throw DataError("every fold lacks out-of-fold observations");
    out.mean_risk /= static_cast<double>(count);

    auto total = [](const std::vector<int>& p) { return std::accumulate(p.begin(), p.end(), 0L); };
    for (std::size_t p = 1; p < grid.size(); ++p) {
        const double a = out.mean_risk(static_cast<Eigen::Index>(p));
        const double b = out.mean_risk(static_cast<Eigen::Index>(out.best_index));
        const auto& cand = grid[p];
        const auto& best = grid[out.best_index];
        if (a < b || (a == b && (total(cand) < total(best) ||
                                 (total(cand) == total(best) && cand < best)))) {
            out.best_index = p;
        }
    }
    out.best = grid[out.best_index];
    return out;
}

}  // namespace lssboost
