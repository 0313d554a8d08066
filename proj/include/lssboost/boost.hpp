#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

#include "lssboost/family.hpp"
#include "lssboost/learner.hpp"
#include "lssboost/terms.hpp"

namespace lssboost {

/// Base-learners per distribution parameter.
using BlockSet = std::vector<std::vector<DesignBlock>>;

struct BoostConfig {
    std::vector<double> step_lengths;  ///< one per parameter, each in (0, 1)
    std::vector<int> mstop;            ///< updates per parameter
    Eigen::VectorXd weights;           ///< empty means unit weights
    bool track_risk = false;           ///< record the training risk after every update
};

struct Selection {
    int iteration;
    int parameter;
    int block;
    double rss;
};

/// Boosting state: offsets, accumulated coefficients and current predictors.
struct FitState {
    std::vector<double> offsets;
    std::vector<std::vector<Eigen::VectorXd>> coefficients;  ///< [q][block]
    ParamVector params;                                       ///< at the training rows
    int iteration = 0;
    std::vector<int> updates;                                 ///< per parameter
    std::vector<Selection> selections;
    std::vector<double> risk_trace;                           ///< initial risk then one per update
};

/// Runs component-wise boosting on fixed data. Prepared learners depend on
/// the weights; a Booster can advance many independent FitStates.
class Booster {
public:
    Booster(const Family& family, Eigen::VectorXd y, const BlockSet& blocks,
            std::vector<double> step_lengths, Eigen::VectorXd weights);

    FitState initial_state(bool track_risk = false) const;

    /// One update of parameter q: gradient at the current state, fit every
    /// block, add nu * best fit.
    void update(FitState& state, int q, bool track_risk = false) const;

    /// Iteration state.iteration + 1 over the parameters flagged in `active`, in order.
    void advance(FitState& state, const std::vector<bool>& active, bool track_risk = false) const;

    /// Weighted negative log-likelihood at the training rows.
    double risk(const FitState& state) const;
    /// Mean negative log-likelihood over rows with zero weight.
    double out_of_sample_risk(const FitState& state) const;

    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    const Family& family() const noexcept { return *family_; }
    int num_parameters() const noexcept { return static_cast<int>(learners_.size()); }

private:
    const Family* family_;
    Eigen::VectorXd y_;
    const BlockSet* blocks_;
    std::vector<double> steps_;
    Eigen::VectorXd weights_;
    std::vector<std::vector<PreparedLearner>> learners_;
};

void validate_boost_inputs(const Family& family, const BlockSet& blocks,
                           const std::vector<double>& steps);

/// Component-wise gradient boosting; parameter q receives mstop[q] updates,
/// iteration m updating every q with m <= mstop[q] in order q = 1..Q.
FitState boost_fit(const Family& family, const Eigen::VectorXd& y, const BlockSet& blocks,
                   const BoostConfig& config);

/// Predictors and parameters for designs laid out like the training blocks.
ParamVector predict(const Family& family, const FitState& fit,
                    const std::vector<std::vector<Eigen::MatrixXd>>& designs);

ParamVector predict(const Family& family, const FitState& fit, const BuiltModel& model,
                    const Dataset& data);

/// beta(s) on `grid` for a signal or FPC block of parameter q.
Eigen::VectorXd extract_coefficient_function(const BuiltModel& model, const FitState& fit, int q,
                                             const std::string& label, const Grid& grid);

/// Share of parameter-q updates that went to functional blocks.
double functional_selection_share(const BuiltModel& model, const FitState& fit, int q);

}  // namespace lssboost
