#include "lssboost/diagnostics.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "lssboost/error.hpp"

namespace lssboost {

namespace {

std::atomic<std::uint64_t> clamp_count{0};

double clamp_probability(double v) {
    if (v < kQuantileClamp) {
        clamp_count.fetch_add(1, std::memory_order_relaxed);
        return kQuantileClamp;
    }
    if (v > 1.0 - kQuantileClamp) {
        clamp_count.fetch_add(1, std::memory_order_relaxed);
        return 1.0 - kQuantileClamp;
    }
    return v;
}

template <class F>
void each_observation(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                      const ParamVector& params, F&& f) {
    if (params.num_parameters() != family.num_parameters() || params.size() != y.size()) {
        throw DimensionError("parameters do not match responses");
    }
    double theta[3];
    const int Q = params.num_parameters();
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        for (int q = 0; q < Q; ++q) theta[q] = params.parameters[q](i);
        f(i, std::span<const double>(theta, static_cast<std::size_t>(Q)));
    }
}

}  // namespace

std::uint64_t quantile_clamp_activations() { return clamp_count.load(); }

double normal_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Eigen::VectorXd pit_values(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                           const ParamVector& params) {
    Eigen::VectorXd out(y.size());
    each_observation(family, y, params, [&](Eigen::Index i, std::span<const double> theta) {
        out(i) = family.cdf(y(i), theta);
        if (!std::isfinite(out(i))) {
            throw EvaluationError("non-finite cdf at observation " + std::to_string(i));
        }
    });
    return out;
}

Eigen::VectorXd quantile_residuals(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                                   const ParamVector& params) {
    Eigen::VectorXd out(y.size());
    each_observation(family, y, params, [&](Eigen::Index i, std::span<const double> theta) {
        const double lower = family.cdf(y(i), theta);
        if (!std::isfinite(lower)) {
            throw EvaluationError("non-finite cdf at observation " + std::to_string(i));
        }
        if (lower <= 0.5) {
            out(i) = normal_quantile(clamp_probability(lower));
        } else {
            const double upper = family.sf(y(i), theta);
            if (!std::isfinite(upper)) {
                throw EvaluationError("non-finite cdf at observation " + std::to_string(i));
            }
            out(i) = -normal_quantile(clamp_probability(upper));
        }
    });
    return out;
}

double global_deviance(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                       const ParamVector& params) {
    return -2.0 * loglik(family, y, params);
}

double coef_mse(const Eigen::Ref<const Eigen::VectorXd>& estimate,
                const Eigen::Ref<const Eigen::VectorXd>& truth, const Grid& grid) {
    if (estimate.size() != grid.size() || truth.size() != grid.size()) {
        throw IncompatibleGridError("coefficient curves are not on the evaluation grid");
    }
    return grid.integrate((truth - estimate).array().square().matrix());
}

double likelihood_quotient(const Family& family, const Eigen::Ref<const Eigen::VectorXd>& y,
                           const ParamVector& estimated, const ParamVector& truth) {
    const double denominator = loglik(family, y, truth);
    if (denominator == 0.0) throw NumericalError("true log-likelihood is zero");
    return loglik(family, y, estimated) / denominator;
}

Eigen::VectorXd acf(const Eigen::Ref<const Eigen::VectorXd>& x, int max_lag) {
    const Eigen::Index n = x.size();
    if (max_lag < 1 || max_lag >= n) {
        throw ConfigError("max_lag must lie in [1, " + std::to_string(n - 1) + "]");
    }
    const Eigen::VectorXd c = x.array() - x.mean();
    const double denom = c.squaredNorm();
    if (!(denom > 1e-300) || !(denom > 1e-28 * n * x.mean() * x.mean())) {
        throw DataError("autocorrelation undefined for a constant series");
    }
    Eigen::VectorXd out(max_lag);
    for (int k = 1; k <= max_lag; ++k) {
        out(k - 1) = c.head(n - k).dot(c.tail(n - k)) / denom;
    }
    return out;
}

double acf_band(Eigen::Index n) { return 1.96 / std::sqrt(static_cast<double>(n)); }

QQData qq_normal(const Eigen::Ref<const Eigen::VectorXd>& residuals) {
    QQData out;
    const Eigen::Index n = residuals.size();
    out.sample = residuals;
    std::sort(out.sample.data(), out.sample.data() + n);
    out.theoretical.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.theoretical(i) = normal_quantile((static_cast<double>(i) + 0.5) / n);
    }
    return out;
}

double ks_statistic_normal(const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::VectorXd s = x;
    const Eigen::Index n = s.size();
    std::sort(s.data(), s.data() + n);
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = 0.5 * std::erfc(-s(i) / std::numbers::sqrt2);
        d = std::max({d, (i + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

double chi_square_uniform(const Eigen::Ref<const Eigen::VectorXd>& v, int bins) {
    if (bins < 2) throw ConfigError("need at least two bins");
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const int b = std::clamp(static_cast<int>(v(i) * bins), 0, bins - 1);
        counts(b) += 1.0;
    }
    const double expected = static_cast<double>(v.size()) / bins;
    return (counts.array() - expected).square().sum() / expected;
}

}  // namespace lssboost
