#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace lssboost {

/// One base-learner: design, unscaled penalty and smoothing parameter.
/// The penalized system uses lambda * penalty.
struct DesignBlock {
    std::string label;
    Eigen::MatrixXd design;
    Eigen::MatrixXd penalty;
    double lambda = 0.0;
    std::optional<double> target_df;  ///< empty for unpenalized blocks

    Eigen::Index size() const noexcept { return design.cols(); }
};

/// Inputs of a penalized weighted least-squares smoother.
struct HatSpec {
    const Eigen::MatrixXd& design;
    const Eigen::MatrixXd& penalty;
    double lambda;
    const Eigen::VectorXd& weights;
    std::string label;
};

/// (B'WB + lambda P)^-1 B'Wu.
Eigen::VectorXd fit_base_learner(const HatSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u);

/// trace(B (B'WB + lambda P)^-1 B'W).
double effective_df(const HatSpec& spec);

/// Smallest and largest effective df attainable over lambda in [0, inf).
struct DfRange {
    double lower;
    double upper;
};
DfRange attainable_df(const HatSpec& spec);

/// Bisection on log10(lambda) in [-12, 12]; spec.lambda is ignored.
/// Returns 0 when the target equals the rank of the weighted design.
double df_to_lambda(const HatSpec& spec, double target_df);

/// Times a ridge jitter was needed to factor a penalized system.
std::uint64_t ridge_jitter_activations();

/// Cholesky factor of a symmetric positive-definite system. On failure a
/// ridge of 1e-10 * trace / K is added once; a second failure raises
/// RankDeficiencyError naming `label`.
Eigen::LLT<Eigen::MatrixXd> factor_penalized(const Eigen::MatrixXd& system, const std::string& label);

/// A base-learner prepared for repeated fits under fixed weights.
class PreparedLearner {
public:
    PreparedLearner(const DesignBlock& block, const Eigen::VectorXd& weights);

    struct Fit {
        Eigen::VectorXd coefficients;
        double rss_reduction;  ///< sum w u^2 minus the weighted RSS of the fit
    };

    /// Fits to u given weighted_u = w .* u.
    Fit fit(const Eigen::VectorXd& weighted_u) const;

    const DesignBlock& block() const noexcept { return *block_; }

private:
    const DesignBlock* block_;
    Eigen::MatrixXd gram_;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

}  // namespace lssboost
