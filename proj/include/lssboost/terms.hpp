#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lssboost/dataset.hpp"
#include "lssboost/fpca.hpp"
#include "lssboost/learner.hpp"

namespace lssboost {

enum class TermKind { intercept, linear, signal, interaction };
enum class SignalBasis { pspline, fpc };

/// Declarative description of one additive term of a predictor.
struct TermSpec {
    TermKind kind = TermKind::intercept;
    std::string variable;  ///< covariate (functional for signal/interaction)
    std::string by;        ///< scalar covariate of an interaction
    SignalBasis basis = SignalBasis::pspline;
    int K = 20;
    int degree = 3;
    int penalty_order = 1;
    int by_K = 5;          ///< marginal spline size of the interaction's scalar
    double by_lambda_ratio = 1.0;
    double pve = 0.99;
    FpcPenalty fpc_penalty = FpcPenalty::identity;
    std::optional<double> df;      ///< calibrate lambda to this df
    std::optional<double> lambda;  ///< fixed lambda, used when df is absent
    std::string label;             ///< defaults to a description of the term
};

/// A term whose data-dependent pieces (FPC basis, spline domains) are fixed.
class Term {
public:
    virtual ~Term() = default;
    virtual std::string label() const = 0;
    /// N x K design for any dataset with compatible covariates.
    virtual Eigen::MatrixXd design(const Dataset& data) const = 0;
    /// Unscaled penalty; zero matrix for unpenalized terms.
    virtual Eigen::MatrixXd penalty() const = 0;
    /// Maps coefficients to the coefficient function on `grid` (R x K);
    /// ConfigError for terms without one.
    virtual Eigen::MatrixXd coefficient_basis(const Grid& grid) const;
    virtual bool has_coefficient_function() const { return false; }
    /// Training grid of the functional covariate; ConfigError for scalar terms.
    virtual const Grid& grid() const;
    virtual bool is_functional() const { return false; }
};

std::unique_ptr<Term> build_term(const TermSpec& spec, const Dataset& training);

std::string default_label(const TermSpec& spec);

/// Terms per distribution parameter.
struct ModelSpec {
    std::vector<std::vector<TermSpec>> parameters;
};

/// Terms bound to training data, with calibrated design blocks.
struct BuiltModel {
    std::vector<std::vector<std::shared_ptr<const Term>>> terms;
    std::vector<std::vector<DesignBlock>> blocks;

    int num_parameters() const { return static_cast<int>(terms.size()); }
    /// Design matrices of new data, laid out like `blocks`.
    std::vector<std::vector<Eigen::MatrixXd>> designs(const Dataset& data) const;
    /// Index of the block with this label for parameter q; UnknownLabelError otherwise.
    int find(int q, const std::string& label) const;
};

/// Builds every term and calibrates lambda from df under unit weights.
BuiltModel build_model(const ModelSpec& spec, const Dataset& training);

}  // namespace lssboost
