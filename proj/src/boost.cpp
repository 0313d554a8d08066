#include "lssboost/boost.hpp"

#include <cmath>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

void validate_boost_inputs(const Family& family, const BlockSet& blocks,
                           const std::vector<double>& steps) {
    const int Q = family.num_parameters();
    if (static_cast<int>(blocks.size()) != Q) {
        throw ConfigError("family " + family.name() + " has " + std::to_string(Q) +
                          " parameters, model specifies " + std::to_string(blocks.size()));
    }
    if (static_cast<int>(steps.size()) != Q) {
        throw ConfigError("need one step length per parameter");
    }
    for (int q = 0; q < Q; ++q) {
        if (blocks[q].empty()) {
            throw ConfigError("parameter " + family.parameter_name(q) + " has no base-learner");
        }
        if (!(steps[q] > 0.0 && steps[q] < 1.0)) {
            throw ConfigError("step length for " + family.parameter_name(q) + " outside (0, 1)");
        }
    }
}

Booster::Booster(const Family& family, Eigen::VectorXd y, const BlockSet& blocks,
                 std::vector<double> step_lengths, Eigen::VectorXd weights)
    : family_(&family), y_(std::move(y)), blocks_(&blocks), steps_(std::move(step_lengths)),
      weights_(std::move(weights)) {
    validate_boost_inputs(family, blocks, steps_);
    if (weights_.size() == 0) weights_ = Eigen::VectorXd::Ones(y_.size());
    if (weights_.size() != y_.size()) throw DimensionError("weights length != response length");
    if ((weights_.array() < 0.0).any()) throw DataError("negative observation weight");
    if (!(weights_.sum() > 0.0)) throw DataError("all observation weights are zero");
    learners_.resize(blocks.size());
    for (std::size_t q = 0; q < blocks.size(); ++q) {
        for (const auto& block : blocks[q]) {
            if (block.design.rows() != y_.size()) {
                throw DimensionError("block '" + block.label + "' has " +
                                     std::to_string(block.design.rows()) + " rows, response " +
                                     std::to_string(y_.size()));
            }
            learners_[q].emplace_back(block, weights_);
        }
    }
}

FitState Booster::initial_state(bool track_risk) const {
    const int Q = num_parameters();
    FitState state;
    state.offsets = initialize_offsets(*family_, y_, weights_);
    state.coefficients.resize(Q);
    std::vector<Eigen::VectorXd> predictors(Q);
    for (int q = 0; q < Q; ++q) {
        for (const auto& block : (*blocks_)[q]) {
            state.coefficients[q].push_back(Eigen::VectorXd::Zero(block.size()));
        }
        predictors[q] = Eigen::VectorXd::Constant(y_.size(), state.offsets[q]);
    }
    state.params = make_params(*family_, std::move(predictors));
    state.updates.assign(Q, 0);
    if (track_risk) state.risk_trace.push_back(risk(state));
    return state;
}

void Booster::update(FitState& state, int q, bool track_risk) const {
    const Eigen::VectorXd u = negative_gradient(*family_, y_, state.params, q);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u(i))) {
            throw NumericalError("non-finite gradient for " + family_->parameter_name(q) +
                                 " at observation " + std::to_string(i));
        }
    }
    const Eigen::VectorXd wu = weights_.cwiseProduct(u);
    const double total = wu.dot(u);

    int best = -1;
    double best_rss = 0.0;
    Eigen::VectorXd best_gamma;
    for (std::size_t j = 0; j < learners_[q].size(); ++j) {
        auto fit = learners_[q][j].fit(wu);
        const double rss = total - fit.rss_reduction;
        if (best < 0 || rss < best_rss) {
            best = static_cast<int>(j);
            best_rss = rss;
            best_gamma = std::move(fit.coefficients);
        }
    }
    const double nu = steps_[q];
    state.coefficients[q][best] += nu * best_gamma;
    Eigen::VectorXd& h = state.params.predictors[q];
    h.noalias() += nu * ((*blocks_)[q][best].design * best_gamma);
    state.params.parameters[q] = h.unaryExpr([&](double v) { return family_->inverse_link(q, v); });
    state.updates[q] += 1;
    state.selections.push_back({state.iteration, q, best, best_rss});
    if (track_risk) state.risk_trace.push_back(risk(state));
}

void Booster::advance(FitState& state, const std::vector<bool>& active, bool track_risk) const {
    state.iteration += 1;
    for (int q = 0; q < num_parameters(); ++q) {
        if (active[q]) update(state, q, track_risk);
    }
}

double Booster::risk(const FitState& state) const {
    return -weights_.dot(loglik_terms(*family_, y_, state.params));
}

double Booster::out_of_sample_risk(const FitState& state) const {
    const Eigen::VectorXd terms = loglik_terms(*family_, y_, state.params);
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < terms.size(); ++i) {
        if (weights_(i) == 0.0) {
            sum -= terms(i);
            ++count;
        }
    }
    if (count == 0) throw DataError("no out-of-sample observations");
    return sum / static_cast<double>(count);
}

FitState boost_fit(const Family& family, const Eigen::VectorXd& y, const BlockSet& blocks,
                   const BoostConfig& config) {
    const int Q = family.num_parameters();
    if (static_cast<int>(config.mstop.size()) != Q) {
        throw ConfigError("need one stopping iteration per parameter");
    }
    for (int m : config.mstop) {
        if (m < 0) throw ConfigError("negative stopping iteration");
    }
    Booster booster(family, y, blocks, config.step_lengths, config.weights);
    FitState state = booster.initial_state(config.track_risk);
    int last = 0;
    for (int m : config.mstop) last = std::max(last, m);
    std::vector<bool> active(Q);
    for (int m = 1; m <= last; ++m) {
        for (int q = 0; q < Q; ++q) active[q] = m <= config.mstop[q];
        booster.advance(state, active, config.track_risk);
    }
    return state;
}

ParamVector predict(const Family& family, const FitState& fit,
                    const std::vector<std::vector<Eigen::MatrixXd>>& designs) {
    const int Q = family.num_parameters();
    if (static_cast<int>(designs.size()) != Q || static_cast<int>(fit.coefficients.size()) != Q) {
        throw ConfigError("prediction designs do not match the family");
    }
    Eigen::Index n = -1;
    std::vector<Eigen::VectorXd> predictors(Q);
    for (int q = 0; q < Q; ++q) {
        if (designs[q].size() != fit.coefficients[q].size()) {
            throw ConfigError("prediction designs do not match the fitted blocks");
        }
        for (std::size_t j = 0; j < designs[q].size(); ++j) {
            const auto& B = designs[q][j];
            if (n < 0) n = B.rows();
            if (B.rows() != n || B.cols() != fit.coefficients[q][j].size()) {
                throw DimensionError("prediction design " + std::to_string(j) + " of parameter " +
                                     std::to_string(q) + " has the wrong shape");
            }
        }
    }
    for (int q = 0; q < Q; ++q) {
        predictors[q] = Eigen::VectorXd::Constant(n, fit.offsets[q]);
        for (std::size_t j = 0; j < designs[q].size(); ++j) {
            predictors[q].noalias() += designs[q][j] * fit.coefficients[q][j];
        }
    }
    return make_params(family, std::move(predictors));
}

ParamVector predict(const Family& family, const FitState& fit, const BuiltModel& model,
                    const Dataset& data) {
    return predict(family, fit, model.designs(data));
}

Eigen::VectorXd extract_coefficient_function(const BuiltModel& model, const FitState& fit, int q,
                                             const std::string& label, const Grid& grid) {
    const int j = model.find(q, label);
    const auto& term = model.terms[q][j];
    if (!term->has_coefficient_function()) {
        throw ConfigError("block '" + label + "' is not a signal or fpc block");
    }
    return term->coefficient_basis(grid) * fit.coefficients[q][j];
}

double functional_selection_share(const BuiltModel& model, const FitState& fit, int q) {
    int total = 0, functional = 0;
    for (const auto& s : fit.selections) {
        if (s.parameter != q) continue;
        ++total;
        if (model.terms[q][s.block]->is_functional()) ++functional;
    }
    return total == 0 ? 0.0 : static_cast<double>(functional) / total;
}

}  // namespace lssboost
