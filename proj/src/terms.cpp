#include "lssboost/terms.hpp"

#include <set>

#include "lssboost/basis.hpp"
#include "lssboost/error.hpp"

namespace lssboost {

Eigen::MatrixXd Term::coefficient_basis(const Grid&) const {
    throw ConfigError("term '" + label() + "' has no coefficient function");
}

const Grid& Term::grid() const {
    throw ConfigError("term '" + label() + "' has no functional covariate");
}

namespace {

class InterceptTerm final : public Term {
public:
    explicit InterceptTerm(std::string label) : label_(std::move(label)) {}
    std::string label() const override { return label_; }
    Eigen::MatrixXd design(const Dataset& data) const override {
        return Eigen::MatrixXd::Ones(data.size(), 1);
    }
    Eigen::MatrixXd penalty() const override { return Eigen::MatrixXd::Zero(1, 1); }

private:
    std::string label_;
};

class LinearTerm final : public Term {
public:
    LinearTerm(std::string variable, std::string label)
        : variable_(std::move(variable)), label_(std::move(label)) {}
    std::string label() const override { return label_; }
    Eigen::MatrixXd design(const Dataset& data) const override { return data.scalar(variable_); }
    Eigen::MatrixXd penalty() const override { return Eigen::MatrixXd::Zero(1, 1); }

private:
    std::string variable_;
    std::string label_;
};

const FunctionalCovariate& matching_functional(const Dataset& data, const std::string& variable,
                                               const Grid& grid) {
    const auto& f = data.functional(variable);
    if (!f.grid.same_points(grid)) {
        throw IncompatibleGridError("functional '" + variable + "' is not on the training grid");
    }
    return f;
}

class SplineSignalTerm final : public Term {
public:
    SplineSignalTerm(const TermSpec& spec, const Grid& grid)
        : variable_(spec.variable), label_(spec.label), grid_(grid),
          basis_(grid.lower(), grid.upper(), spec.K, spec.degree),
          values_(basis_.evaluate(grid.points())),
          penalty_(difference_penalty(spec.K, spec.penalty_order)) {}
    std::string label() const override { return label_; }
    Eigen::MatrixXd design(const Dataset& data) const override {
        const auto& f = matching_functional(data, variable_, grid_);
        return signal_design(f.values, grid_, values_);
    }
    Eigen::MatrixXd penalty() const override { return penalty_; }
    Eigen::MatrixXd coefficient_basis(const Grid& grid) const override {
        return basis_.evaluate(grid.points());
    }
    bool has_coefficient_function() const override { return true; }
    bool is_functional() const override { return true; }
    const Grid& grid() const override { return grid_; }

private:
    std::string variable_;
    std::string label_;
    Grid grid_;
    BSplineBasis basis_;
    Eigen::MatrixXd values_;
    Eigen::MatrixXd penalty_;
};

class FpcSignalTerm final : public Term {
public:
    FpcSignalTerm(const TermSpec& spec, const FunctionalCovariate& training)
        : variable_(spec.variable), label_(spec.label), grid_(training.grid),
          fpc_(fpca(training.values, training.grid, spec.pve)), penalty_kind_(spec.fpc_penalty) {}
    std::string label() const override { return label_; }
    Eigen::MatrixXd design(const Dataset& data) const override {
        const auto& f = matching_functional(data, variable_, grid_);
        return fpc_.project(f.values, grid_);
    }
    Eigen::MatrixXd penalty() const override { return fpc_.penalty(penalty_kind_); }
    Eigen::MatrixXd coefficient_basis(const Grid& grid) const override {
        if (!grid.same_points(grid_)) {
            throw IncompatibleGridError("fpc coefficient functions live on the training grid");
        }
        return fpc_.eigenfunctions;
    }
    bool has_coefficient_function() const override { return true; }
    bool is_functional() const override { return true; }
    const Grid& grid() const override { return grid_; }

private:
    std::string variable_;
    std::string label_;
    Grid grid_;
    FpcBasis fpc_;
    FpcPenalty penalty_kind_;
};

/// Smooth interaction int x(s) beta(z, s) ds: signal basis row-tensor a spline in z.
class InteractionTerm final : public Term {
public:
    InteractionTerm(const TermSpec& spec, const Dataset& training)
        : variable_(spec.variable), by_(spec.by), label_(spec.label),
          grid_(training.functional(spec.variable).grid),
          signal_basis_(grid_.lower(), grid_.upper(), spec.K, spec.degree),
          signal_values_(signal_basis_.evaluate(grid_.points())),
          by_basis_(training.scalar(spec.by).minCoeff(), training.scalar(spec.by).maxCoeff(),
                    spec.by_K, spec.degree) {
        penalty_ = kronecker_sum_penalty(difference_penalty(spec.K, spec.penalty_order),
                                         difference_penalty(spec.by_K, spec.penalty_order), 1.0,
                                         spec.by_lambda_ratio);
    }
    std::string label() const override { return label_; }
    Eigen::MatrixXd design(const Dataset& data) const override {
        const auto& f = matching_functional(data, variable_, grid_);
        return row_tensor(signal_design(f.values, grid_, signal_values_),
                          by_basis_.evaluate(data.scalar(by_)));
    }
    Eigen::MatrixXd penalty() const override { return penalty_; }
    bool is_functional() const override { return true; }
    const Grid& grid() const override { return grid_; }

private:
    std::string variable_;
    std::string by_;
    std::string label_;
    Grid grid_;
    BSplineBasis signal_basis_;
    Eigen::MatrixXd signal_values_;
    BSplineBasis by_basis_;
    Eigen::MatrixXd penalty_;
};

}  // namespace

std::string default_label(const TermSpec& spec) {
    switch (spec.kind) {
        case TermKind::intercept: return "intercept";
        case TermKind::linear: return "linear(" + spec.variable + ")";
        case TermKind::signal:
            return std::string(spec.basis == SignalBasis::fpc ? "fpc(" : "signal(") +
                   spec.variable + ")";
        case TermKind::interaction: return "interaction(" + spec.variable + "," + spec.by + ")";
    }
    return "term";
}

std::unique_ptr<Term> build_term(const TermSpec& raw, const Dataset& training) {
    TermSpec spec = raw;
    if (spec.label.empty()) spec.label = default_label(spec);
    switch (spec.kind) {
        case TermKind::intercept: return std::make_unique<InterceptTerm>(spec.label);
        case TermKind::linear:
            training.scalar(spec.variable);
            return std::make_unique<LinearTerm>(spec.variable, spec.label);
        case TermKind::signal: {
            const auto& f = training.functional(spec.variable);
            if (spec.basis == SignalBasis::fpc) return std::make_unique<FpcSignalTerm>(spec, f);
            return std::make_unique<SplineSignalTerm>(spec, f.grid);
        }
        case TermKind::interaction: return std::make_unique<InteractionTerm>(spec, training);
    }
    throw ConfigError("unsupported term kind");
}

std::vector<std::vector<Eigen::MatrixXd>> BuiltModel::designs(const Dataset& data) const {
    std::vector<std::vector<Eigen::MatrixXd>> out(terms.size());
    for (std::size_t q = 0; q < terms.size(); ++q) {
        for (const auto& term : terms[q]) out[q].push_back(term->design(data));
    }
    return out;
}

int BuiltModel::find(int q, const std::string& label) const {
    if (q < 0 || q >= num_parameters()) throw UnknownLabelError(label);
    for (std::size_t j = 0; j < blocks[q].size(); ++j) {
        if (blocks[q][j].label == label) return static_cast<int>(j);
    }
    throw UnknownLabelError(label);
}

BuiltModel build_model(const ModelSpec& spec, const Dataset& training) {
    training.validate();
    BuiltModel model;
    const Eigen::VectorXd unit = Eigen::VectorXd::Ones(training.size());
    for (const auto& parameter : spec.parameters) {
        if (parameter.empty()) throw ConfigError("every parameter needs at least one term");
        std::vector<std::shared_ptr<const Term>> terms;
        std::vector<DesignBlock> blocks;
        std::set<std::string> seen;
        for (const auto& term_spec : parameter) {
            std::shared_ptr<const Term> term = build_term(term_spec, training);
            if (!seen.insert(term->label()).second) {
                throw ConfigError("duplicate term label '" + term->label() + "'");
            }
            DesignBlock block;
            block.label = term->label();
            block.design = term->design(training);
            block.penalty = term->penalty();
            if (!block.design.allFinite()) {
                throw DataError("design of '" + block.label + "' has non-finite entries");
            }
            const bool penalized = block.penalty.cwiseAbs().maxCoeff() > 0.0;
            if (penalized && term_spec.df) {
                HatSpec hat{block.design, block.penalty, 0.0, unit, block.label};
                block.lambda = df_to_lambda(hat, *term_spec.df);
                block.target_df = term_spec.df;
            } else if (penalized && term_spec.lambda) {
                if (*term_spec.lambda < 0.0) throw ConfigError("negative lambda for " + block.label);
                block.lambda = *term_spec.lambda;
            }
            terms.push_back(std::move(term));
            blocks.push_back(std::move(block));
        }
        model.terms.push_back(std::move(terms));
        model.blocks.push_back(std::move(blocks));
    }
    return model;
}

}  // namespace lssboost
