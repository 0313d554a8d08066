#include "lssboost/family.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <atomic>
#include <cmath>
#include <numbers>
#include <string>

#include "lssboost/error.hpp"

namespace lssboost {

namespace {

std::atomic<std::uint64_t> floor_count{0};

double floored_exp(double predictor) {
    const double v = std::exp(predictor);
    if (v < kPositiveFloor) {
        floor_count.fetch_add(1, std::memory_order_relaxed);
        return kPositiveFloor;
    }
    return v;
}

const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

struct WeightedMoments {
    double mean;
    double sd;
};

WeightedMoments weighted_moments(const Eigen::Ref<const Eigen::VectorXd>& y,
                                 const Eigen::Ref<const Eigen::VectorXd>& w) {
    if (y.size() != w.size()) throw DimensionError("response and weights differ in length");
    if ((w.array() < 0.0).any()) throw DataError("negative observation weight");
    const double total = w.sum();
    if (!(total > 0.0)) throw DataError("weighted sample is empty");
    const double mean = w.dot(y) / total;
    const double var = w.dot((y.array() - mean).square().matrix()) / total;
    if (!std::isfinite(mean) || !std::isfinite(var)) {
        throw NumericalError("weighted mean or variance of y overflows");
    }
    const double sd = std::sqrt(var);
    if (!(sd > 0.0) || !(sd > 1e-12 * std::abs(mean))) {
        throw DegenerateResponseError("weighted variance of y is zero");
    }
    return {mean, sd};
}

}  // namespace

std::uint64_t positive_floor_activations() { return floor_count.load(); }

void Family::check_parameter(int q) const {
    if (q < 0 || q >= num_parameters()) {
        throw ConfigError("parameter index " + std::to_string(q) + " invalid for family " +
                          name());
    }
}

// --- Normal --------------------------------------------------------------

std::string NormalLocationScale::parameter_name(int q) const {
    check_parameter(q);
    return q == 0 ? "mu" : "sigma";
}

double NormalLocationScale::link(int q, double value) const {
    check_parameter(q);
    return q == 0 ? value : std::log(value);
}

double NormalLocationScale::inverse_link(int q, double predictor) const {
    check_parameter(q);
    return q == 0 ? predictor : floored_exp(predictor);
}

double NormalLocationScale::logpdf(double y, std::span<const double> theta) const {
    const double z = (y - theta[0]) / theta[1];
    return -kHalfLog2Pi - std::log(theta[1]) - 0.5 * z * z;
}

double NormalLocationScale::score(double y, std::span<const double> theta, int q) const {
    const double r = y - theta[0];
    const double var = theta[1] * theta[1];
    switch (q) {
        case 0: return r / var;
        case 1: return -1.0 + r * r / var;
        default: check_parameter(q); return 0.0;
    }
}

double NormalLocationScale::cdf(double y, std::span<const double> theta) const {
    return 0.5 * std::erfc(-(y - theta[0]) / (theta[1] * std::numbers::sqrt2));
}

double NormalLocationScale::sf(double y, std::span<const double> theta) const {
    return 0.5 * std::erfc((y - theta[0]) / (theta[1] * std::numbers::sqrt2));
}

std::vector<double> NormalLocationScale::initial_predictors(
    const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& w) const {
    const auto m = weighted_moments(y, w);
    return {m.mean, std::log(m.sd)};
}

// --- Student t -----------------------------------------------------------

std::string StudentTLocationScale::parameter_name(int q) const {
    check_parameter(q);
    static const char* names[] = {"mu", "sigma", "df"};
    return names[q];
}

double StudentTLocationScale::link(int q, double value) const {
    check_parameter(q);
    return q == 0 ? value : std::log(value);
}

double StudentTLocationScale::inverse_link(int q, double predictor) const {
    check_parameter(q);
    return q == 0 ? predictor : floored_exp(predictor);
}

double StudentTLocationScale::logpdf(double y, std::span<const double> theta) const {
    const double sigma = theta[1];
    const double nu = theta[2];
    const double z = (y - theta[0]) / sigma;
    // log Gamma((nu + 1) / 2) - log Gamma(nu / 2) without cancellation for large nu
    const double log_gamma_ratio = -std::log(boost::math::tgamma_delta_ratio(0.5 * nu, 0.5));
    return log_gamma_ratio - 0.5 * std::log(nu * std::numbers::pi) - std::log(sigma) -
           0.5 * (nu + 1.0) * std::log1p(z * z / nu);
}

double StudentTLocationScale::score(double y, std::span<const double> theta, int q) const {
    const double sigma = theta[1];
    const double nu = theta[2];
    const double z = (y - theta[0]) / sigma;
    const double z2 = z * z;
    switch (q) {
        case 0: return (nu + 1.0) * z / (sigma * (nu + z2));
        case 1: return -1.0 + (nu + 1.0) * z2 / (nu + z2);
        case 2: {
            using boost::math::digamma;
            const double dnu = 0.5 * digamma(0.5 * (nu + 1.0)) - 0.5 * digamma(0.5 * nu) -
                               0.5 / nu - 0.5 * std::log1p(z2 / nu) +
                               0.5 * (nu + 1.0) * z2 / (nu * (nu + z2));
            return nu * dnu;
        }
        default: check_parameter(q); return 0.0;
    }
}

namespace {

/// P(T > |t|) for a standard t variate with nu degrees of freedom.
double t_tail(double t, double nu) {
    const double t2 = t * t;
    if (t2 < nu) {
        // 1 - I_{t2/(nu+t2)}(1/2, nu/2) avoids cancellation near the center
        return 0.5 * boost::math::ibetac(0.5, 0.5 * nu, t2 / (nu + t2));
    }
    return 0.5 * boost::math::ibeta(0.5 * nu, 0.5, nu / (nu + t2));
}

}  // namespace

double StudentTLocationScale::cdf(double y, std::span<const double> theta) const {
    const double t = (y - theta[0]) / theta[1];
    const double tail = t_tail(t, theta[2]);
    return t < 0.0 ? tail : 1.0 - tail;
}

double StudentTLocationScale::sf(double y, std::span<const double> theta) const {
    const double t = (y - theta[0]) / theta[1];
    const double tail = t_tail(t, theta[2]);
    return t > 0.0 ? tail : 1.0 - tail;
}

std::vector<double> StudentTLocationScale::initial_predictors(
    const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& w) const {
    const auto m = weighted_moments(y, w);
    return {m.mean, std::log(m.sd), std::log(10.0)};
}

// --- free functions ------------------------------------------------------

std::unique_ptr<Family> make_family(std::string_view name) {
    if (name == "normal-ls") return std::make_unique<NormalLocationScale>();
    if (name == "t-ls") return std::make_unique<StudentTLocationScale>();
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

std::vector<double> ParamVector::at(Eigen::Index i) const {
    std::vector<double> theta(parameters.size());
    for (std::size_t q = 0; q < parameters.size(); ++q) theta[q] = parameters[q](i);
    return theta;
}

ParamVector make_params(const Family& family, std::vector<Eigen::VectorXd> predictors) {
    const int Q = family.num_parameters();
    if (static_cast<int>(predictors.size()) != Q) {
        throw ConfigError("family " + family.name() + " expects " + std::to_string(Q) +
                          " predictors, got " + std::to_string(predictors.size()));
    }
    ParamVector out;
    out.parameters.resize(Q);
    for (int q = 0; q < Q; ++q) {
        if (predictors[q].size() != predictors[0].size()) {
            throw DimensionError("predictors differ in length");
        }
        out.parameters[q] = predictors[q].unaryExpr(
            [&](double h) { return family.inverse_link(q, h); });
    }
    out.predictors = std::move(predictors);
    return out;
}

namespace {

void check_lengths(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                   const ParamVector& params) {
    if (params.num_parameters() != family.num_parameters()) {
        throw ConfigError("parameter count does not match family " + family.name());
    }
    if (params.size() != y.size()) {
        throw DimensionError("response has " + std::to_string(y.size()) +
                             " observations, parameters " + std::to_string(params.size()));
    }
}

template <class F>
void for_each_observation(const ParamVector& params, F&& f) {
    const int Q = params.num_parameters();
    double theta[3];
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        for (int q = 0; q < Q; ++q) theta[q] = params.parameters[q](i);
        f(i, std::span<const double>(theta, static_cast<std::size_t>(Q)));
    }
}

}  // namespace

Eigen::VectorXd loglik_terms(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                             const ParamVector& params) {
    check_lengths(family, y, params);
    Eigen::VectorXd out(y.size());
    for_each_observation(params, [&](Eigen::Index i, std::span<const double> theta) {
        for (double t : theta) {
            if (!std::isfinite(t)) {
                throw EvaluationError("non-finite parameter at observation " + std::to_string(i));
            }
        }
        out(i) = family.logpdf(y(i), theta);
    });
    return out;
}

double loglik(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
              const ParamVector& params) {
    return loglik_terms(family, y, params).sum();
}

Eigen::VectorXd negative_gradient(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  const ParamVector& params, int q) {
    check_lengths(family, y, params);
    if (q < 0 || q >= family.num_parameters()) {
        throw ConfigError("parameter index " + std::to_string(q) + " invalid for family " +
                          family.name());
    }
    Eigen::VectorXd out(y.size());
    for_each_observation(params, [&](Eigen::Index i, std::span<const double> theta) {
        out(i) = family.score(y(i), theta, q);
    });
    return out;
}

std::vector<double> initialize_offsets(const Family& family,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const Eigen::Ref<const Eigen::VectorXd>& w) {
    return family.initial_predictors(y, w);
}

}  // namespace lssboost
