#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lssboost {

/// Lower bound applied to scale and degrees of freedom after the inverse log link.
inline constexpr double kPositiveFloor = 1e-10;

/// Number of times kPositiveFloor was applied since process start.
std::uint64_t positive_floor_activations();

/// Response distribution with Q parameters, each linked to an additive predictor.
///
/// Per-observation methods receive the response-scale parameters `theta`
/// (length Q). Derivatives are taken with respect to the link-scale
/// predictor h^(q), so `score(y, theta, q)` is the negative gradient of the
/// loss -log f used by boosting.
class Family {
public:
    virtual ~Family() = default;

    virtual std::string name() const = 0;
    virtual int num_parameters() const = 0;
    virtual std::string parameter_name(int q) const = 0;

    virtual double link(int q, double value) const = 0;
    virtual double inverse_link(int q, double predictor) const = 0;

    virtual double logpdf(double y, std::span<const double> theta) const = 0;
    virtual double score(double y, std::span<const double> theta, int q) const = 0;
    virtual double cdf(double y, std::span<const double> theta) const = 0;
    /// Upper tail 1 - cdf, computed without cancellation.
    virtual double sf(double y, std::span<const double> theta) const = 0;

    /// Link-scale starting values of the constant model.
    virtual std::vector<double> initial_predictors(const Eigen::Ref<const Eigen::VectorXd>& y,
                                                   const Eigen::Ref<const Eigen::VectorXd>& w) const = 0;
    virtual std::vector<double> default_step_lengths() const = 0;

protected:
    void check_parameter(int q) const;
};

/// Gaussian with identity link for the mean and log link for the standard deviation.
class NormalLocationScale final : public Family {
public:
    std::string name() const override { return "normal-ls"; }
    int num_parameters() const override { return 2; }
    std::string parameter_name(int q) const override;
    double link(int q, double value) const override;
    double inverse_link(int q, double predictor) const override;
    double logpdf(double y, std::span<const double> theta) const override;
    double score(double y, std::span<const double> theta, int q) const override;
    double cdf(double y, std::span<const double> theta) const override;
    double sf(double y, std::span<const double> theta) const override;
    std::vector<double> initial_predictors(const Eigen::Ref<const Eigen::VectorXd>& y,
                                           const Eigen::Ref<const Eigen::VectorXd>& w) const override;
    std::vector<double> default_step_lengths() const override { return {0.1, 0.01}; }
};

/// Location-scale Student t with log links for scale and degrees of freedom.
class StudentTLocationScale final : public Family {
public:
    std::string name() const override { return "t-ls"; }
    int num_parameters() const override { return 3; }
    std::string parameter_name(int q) const override;
    double link(int q, double value) const override;
    double inverse_link(int q, double predictor) const override;
    double logpdf(double y, std::span<const double> theta) const override;
    double score(double y, std::span<const double> theta, int q) const override;
    double cdf(double y, std::span<const double> theta) const override;
    double sf(double y, std::span<const double> theta) const override;
    std::vector<double> initial_predictors(const Eigen::Ref<const Eigen::VectorXd>& y,
                                           const Eigen::Ref<const Eigen::VectorXd>& w) const override;
    std::vector<double> default_step_lengths() const override { return {0.1, 0.01, 0.1}; }
};

/// "normal-ls" or "t-ls"; anything else is a ConfigError.
std::unique_ptr<Family> make_family(std::string_view name);

/// Per-observation predictors on the link scale and the matching
/// response-scale parameters.
struct ParamVector {
    std::vector<Eigen::VectorXd> predictors;
    std::vector<Eigen::VectorXd> parameters;

    Eigen::Index size() const { return predictors.empty() ? 0 : predictors.front().size(); }
    int num_parameters() const { return static_cast<int>(predictors.size()); }
    /// Response-scale parameters of observation i.
    std::vector<double> at(Eigen::Index i) const;
};

ParamVector make_params(const Family& family, std::vector<Eigen::VectorXd> predictors);

/// Per-observation log-likelihood contributions.
Eigen::VectorXd loglik_terms(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                             const ParamVector& params);

double loglik(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
              const ParamVector& params);

/// u^(q): derivative of the log-likelihood with respect to h^(q), per observation.
Eigen::VectorXd negative_gradient(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const ParamVector& params, int q);

/// Constant-model ML start on the link scale for weighted data.
std::vector<double> initialize_offsets(const Family& family,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const Eigen::Ref<const Eigen::VectorXd>& w);

}  // namespace lssboost
