#include "lssboost/simgen.hpp"

#include <cmath>
#include <numbers>

#include "lssboost/basis.hpp"
#include "lssboost/error.hpp"
#include "lssboost/rng.hpp"

namespace lssboost {

VarianceRegime parse_regime(const std::string& name) {
    if (name == "const") return VarianceRegime::constant;
    if (name == "lin") return VarianceRegime::linear;
    if (name == "exp") return VarianceRegime::exponential;
    throw ConfigError("unknown variance regime '" + name + "' (const, lin, exp)");
}

std::string regime_name(VarianceRegime regime) {
    switch (regime) {
        case VarianceRegime::constant: return "const";
        case VarianceRegime::linear: return "lin";
        case VarianceRegime::exponential: return "exp";
    }
    return "?";
}

double regime_variance(VarianceRegime regime, int c) {
    switch (regime) {
        case VarianceRegime::constant: return 1.0;
        case VarianceRegime::linear: return 0.1 * c;
        case VarianceRegime::exponential: {
            const double f = std::numbers::pi * (c - 0.5);
            return 1.0 / (f * f);
        }
    }
    return 0.0;
}

Eigen::MatrixXd gen_raw_functional_covariates(const SimScenario& scenario, const Grid& grid) {
    Rng rng(scenario.seed);
    const Eigen::Index R = grid.size();
    Eigen::MatrixXd phi(R, scenario.C);
    for (int c = 1; c <= scenario.C; ++c) {
        phi.col(c - 1) = (std::numbers::pi * (c - 0.5) * grid.points().array()).sin() *
                         std::numbers::sqrt2;
    }
    Eigen::MatrixXd x(scenario.N, R);
    const double start_sd = std::sqrt(regime_variance(scenario.regime, 1));
    for (Eigen::Index i = 0; i < scenario.N; ++i) {
        Eigen::VectorXd a(scenario.C);
        for (int c = 1; c <= scenario.C; ++c) {
            a(c - 1) = rng.normal(0.0, std::sqrt(regime_variance(scenario.regime, c)));
        }
        x.row(i) = (phi * a).transpose();
        if (scenario.rand_start) x.row(i).array() += rng.normal(0.0, start_sd);
    }
    return x;
}

FunctionalSample gen_functional_covariates(const SimScenario& scenario) {
    Grid grid = uniform_grid(0.0, 1.0, scenario.R);
    Eigen::MatrixXd raw = gen_raw_functional_covariates(scenario, grid);
    return {std::move(grid), center_covariate(raw, true)};
}

Eigen::VectorXd coef_shape(const std::string& name, const Grid& grid) {
    Eigen::Vector4d coefs;
    if (name == "coef0") return Eigen::VectorXd::Zero(grid.size());
    if (name == "coef1") {
        coefs << 2.0, 1.5, -0.5, -0.5;
    } else if (name == "coef2") {
        coefs << 0.5, -1.0, -1.0, 1.5;
    } else if (name == "coef3") {
        coefs << 3.0, 0.0, 0.0, 0.0;
    } else {
        throw ConfigError("unknown coefficient shape '" + name + "'");
    }
    return BSplineBasis(0.0, 1.0, 4, 3, KnotPlacement::clamped).evaluate(grid.points()) * coefs;
}

NormalLsSample gen_response_normal_ls(const std::vector<const FunctionalSample*>& covariates,
                                      const PredictorTruth& mu, const PredictorTruth& log_sigma,
                                      std::uint64_t seed) {
    if (covariates.empty()) throw ConfigError("need at least one functional covariate");
    if (mu.curves.size() != covariates.size() || log_sigma.curves.size() != covariates.size()) {
        throw ConfigError("need one coefficient curve per covariate and parameter");
    }
    const Eigen::Index N = covariates.front()->values.rows();
    Eigen::VectorXd h_mu = Eigen::VectorXd::Constant(N, mu.intercept);
    Eigen::VectorXd h_sigma = Eigen::VectorXd::Constant(N, log_sigma.intercept);
    for (std::size_t j = 0; j < covariates.size(); ++j) {
        const auto& x = *covariates[j];
        if (x.values.rows() != N) throw DimensionError("covariates differ in sample size");
        const Eigen::MatrixXd weighted = x.values * x.grid.weights().asDiagonal();
        h_mu += weighted * mu.curves[j];
        h_sigma += weighted * log_sigma.curves[j];
    }
    NormalLsSample out;
    NormalLocationScale family;
    out.truth = make_params(family, {h_mu, h_sigma});
    Rng rng(seed);
    out.y.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        out.y(i) = rng.normal(out.truth.parameters[0](i), out.truth.parameters[1](i));
    }
    return out;
}

StudySample simulate_study(const StudyDesign& design, Eigen::Index N, std::uint64_t seed) {
    const std::size_t J = design.mu_shapes.size();
    if (J == 0 || design.sigma_shapes.size() != J) {
        throw ConfigError("mu and sigma need one coefficient shape per covariate");
    }
    StudySample out;
    out.mu.intercept = design.mu_intercept;
    out.log_sigma.intercept = design.sigma_intercept;
    for (std::size_t j = 0; j < J; ++j) {
        SimScenario sc = design.scenario;
        sc.N = N;
        sc.seed = seed + 7919 * (j + 1);
        out.covariates.push_back(gen_functional_covariates(sc));
        out.mu.curves.push_back(coef_shape(design.mu_shapes[j], out.covariates.back().grid));
        out.log_sigma.curves.push_back(coef_shape(design.sigma_shapes[j], out.covariates.back().grid));
    }
    std::vector<const FunctionalSample*> ptrs;
    for (const auto& x : out.covariates) ptrs.push_back(&x);
    out.response = gen_response_normal_ls(ptrs, out.mu, out.log_sigma, seed);
    return out;
}

Eigen::VectorXd gen_arch_series(const ArchSpec& spec) {
    if (spec.alpha.empty() || spec.beta.empty()) {
        throw ConfigError("ARCH spec needs alpha_0 and beta_0");
    }
    const Eigen::Index p1 = static_cast<Eigen::Index>(spec.alpha.size()) - 1;
    const Eigen::Index p2 = static_cast<Eigen::Index>(spec.beta.size()) - 1;
    const Eigen::Index total = spec.N + spec.burn_in;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(total);
    Rng rng(spec.seed);
    auto lagged = [&](Eigen::Index i, Eigen::Index j) { return i - j >= 0 ? y(i - j) : 0.0; };
    for (Eigen::Index i = 0; i < total; ++i) {
        double mean = spec.alpha[0];
        for (Eigen::Index j = 1; j <= p1; ++j) mean += spec.alpha[j] * lagged(i, j);
        double log_var = spec.beta[0];
        for (Eigen::Index j = 1; j <= p2; ++j) {
            const double v = lagged(i, j);
            if (spec.transform == ArchLagTransform::square) {
                log_var += spec.beta[j] * v * v;
            } else if (i - j >= 0) {
                log_var += spec.beta[j] * std::log(v * v);
            }
        }
        const double sd = std::exp(0.5 * log_var);
        y(i) = mean + sd * rng.normal();
        if (!std::isfinite(y(i)) || !std::isfinite(log_var)) {
            throw OverflowError("ARCH recursion diverged", static_cast<long>(i));
        }
    }
    return y.tail(spec.N);
}

double excess_kurtosis(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::ArrayXd c = x.array() - x.mean();
    const double m2 = c.square().mean();
    const double m4 = c.square().square().mean();
    return m4 / (m2 * m2) - 3.0;
}

}  // namespace lssboost
