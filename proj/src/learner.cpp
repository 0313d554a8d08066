#include "lssboost/learner.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

#include "lssboost/error.hpp"

namespace lssboost {

namespace {

std::atomic<std::uint64_t> jitter_count{0};

bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& system) {
    if (llt.info() != Eigen::Success) return false;
    const Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
    const double scale = system.diagonal().cwiseAbs().maxCoeff();
    return diag.allFinite() && (diag.array().square() > 1e-13 * scale).all();
}

void check_spec(const HatSpec& spec) {
    const auto& B = spec.design;
    if (spec.weights.size() != B.rows()) {
        throw DimensionError("block '" + spec.label + "': weights length " +
                             std::to_string(spec.weights.size()) + " != design rows " +
                             std::to_string(B.rows()));
    }
    if (spec.penalty.rows() != B.cols() || spec.penalty.cols() != B.cols()) {
        throw DimensionError("block '" + spec.label + "': penalty does not match design");
    }
    if (spec.lambda < 0.0) throw ConfigError("block '" + spec.label + "': negative lambda");
}

Eigen::MatrixXd weighted_gram(const HatSpec& spec) {
    return spec.design.transpose() * spec.weights.asDiagonal() * spec.design;
}

}  // namespace

std::uint64_t ridge_jitter_activations() { return jitter_count.load(); }

Eigen::LLT<Eigen::MatrixXd> factor_penalized(const Eigen::MatrixXd& system,
                                             const std::string& label) {
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (factor_ok(llt, system)) return llt;
    const Eigen::Index K = system.rows();
    const double ridge = 1e-10 * system.trace() / static_cast<double>(K);
    if (ridge > 0.0 && std::isfinite(ridge)) {
        jitter_count.fetch_add(1, std::memory_order_relaxed);
        std::cerr << "warning: ridge jitter " << ridge << " added to block '" << label << "'\n";
        Eigen::MatrixXd jittered = system;
        jittered.diagonal().array() += ridge;
        llt.compute(jittered);
        if (llt.info() == Eigen::Success && Eigen::MatrixXd(llt.matrixL()).diagonal().allFinite() &&
            (Eigen::MatrixXd(llt.matrixL()).diagonal().array() > 0.0).all()) {
            return llt;
        }
    }
    throw RankDeficiencyError(label);
}

Eigen::VectorXd fit_base_learner(const HatSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& u) {
    check_spec(spec);
    if (u.size() != spec.design.rows()) {
        throw DimensionError("block '" + spec.label + "': response length mismatch");
    }
    const Eigen::MatrixXd system = weighted_gram(spec) + spec.lambda * spec.penalty;
    const auto llt = factor_penalized(system, spec.label);
    return llt.solve(spec.design.transpose() * spec.weights.cwiseProduct(u));
}

namespace {

/// Penalty split into its nullspace and a rescaled range. With X0 the
/// weighted design on the nullspace and X1 the range part residualized on X0,
/// df(lambda) = rank(X0) + sum s^2 / (s^2 + lambda) over singular values s of X1.
struct DfSpectrum {
    double null_rank = 0.0;
    Eigen::VectorXd s2;

    double df(double lambda) const {
        double total = null_rank;
        for (Eigen::Index k = 0; k < s2.size(); ++k) total += s2(k) / (s2(k) + lambda);
        return total;
    }
};

DfSpectrum df_spectrum(const HatSpec& spec) {
    check_spec(spec);
    const Eigen::MatrixXd weighted = spec.weights.cwiseSqrt().asDiagonal() * spec.design;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (spec.penalty + spec.penalty.transpose()));
    const Eigen::VectorXd& d = eig.eigenvalues();
    const double top = d.cwiseAbs().maxCoeff();
    Eigen::Index null_dim = 0;
    while (null_dim < d.size() && d(null_dim) <= 1e-10 * top) ++null_dim;
    if (top == 0.0) null_dim = d.size();

    DfSpectrum out;
    Eigen::MatrixXd range_part = weighted * eig.eigenvectors().rightCols(d.size() - null_dim) *
                                 d.tail(d.size() - null_dim).cwiseSqrt().cwiseInverse().asDiagonal();
    if (null_dim > 0) {
        const Eigen::MatrixXd null_part = weighted * eig.eigenvectors().leftCols(null_dim);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(null_part);
        qr.setThreshold(1e-10);
        const Eigen::Index r0 = qr.rank();
        out.null_rank = static_cast<double>(r0);
        const Eigen::MatrixXd Q =
            Eigen::MatrixXd(qr.householderQ()).leftCols(r0);
        range_part -= Q * (Q.transpose() * range_part);
    }
    if (range_part.cols() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(range_part);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        std::vector<double> kept;
        for (Eigen::Index k = 0; k < sv.size(); ++k) {
            if (sv(k) > 1e-10 * smax && sv(k) > 0.0) kept.push_back(sv(k) * sv(k));
        }
        out.s2 = Eigen::Map<const Eigen::VectorXd>(kept.data(), static_cast<Eigen::Index>(kept.size()));
    }
    if (out.null_rank + static_cast<double>(out.s2.size()) == 0.0) {
        throw RankDeficiencyError(spec.label);
    }
    return out;
}

}  // namespace

double effective_df(const HatSpec& spec) { return df_spectrum(spec).df(spec.lambda); }

DfRange attainable_df(const HatSpec& spec) {
    check_spec(spec);
    const Eigen::MatrixXd weighted = spec.weights.cwiseSqrt().asDiagonal() * spec.design;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
    qr.setThreshold(1e-10);
    const double upper = static_cast<double>(qr.rank());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.penalty);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Index null_dim = 0;
    while (null_dim < eig.eigenvalues().size() &&
           eig.eigenvalues()(null_dim) <= 1e-10 * std::max(top, 1e-300)) {
        ++null_dim;
    }
    double lower = 0.0;
    if (null_dim > 0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> nqr(
            weighted * eig.eigenvectors().leftCols(null_dim));
        nqr.setThreshold(1e-10);
        lower = static_cast<double>(nqr.rank());
    }
    if (top == 0.0) lower = upper;
    return {lower, upper};
}

double df_to_lambda(const HatSpec& spec, double target_df) {
    const DfRange range = attainable_df(spec);
    constexpr double tol = 1e-9;
    if (std::abs(target_df - range.upper) < 1e-6) return 0.0;
    if (!(target_df >= range.lower - 1e-6 && target_df <= range.upper)) {
        throw InfeasibleDfError("block '" + spec.label + "' target " + std::to_string(target_df),
                                range.lower, range.upper);
    }
    const DfSpectrum spectrum = df_spectrum(spec);
    auto df_at = [&](double log_lambda) { return spectrum.df(std::pow(10.0, log_lambda)); };
    double lo = -12.0, hi = 12.0;
    if (df_at(hi) >= target_df) return std::pow(10.0, hi);
    if (df_at(lo) <= target_df) return std::pow(10.0, lo);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double df = df_at(mid);
        if (std::abs(df - target_df) < tol) break;
        if (df > target_df) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return std::pow(10.0, mid);
}

PreparedLearner::PreparedLearner(const DesignBlock& block, const Eigen::VectorXd& weights)
    : block_(&block) {
    if (weights.size() != block.design.rows()) {
        throw DimensionError("block '" + block.label + "': weights length mismatch");
    }
    gram_ = block.design.transpose() * weights.asDiagonal() * block.design;
    Eigen::MatrixXd system = gram_;
    if (block.lambda > 0.0) system += block.lambda * block.penalty;
    factor_ = factor_penalized(system, block.label);
}

PreparedLearner::Fit PreparedLearner::fit(const Eigen::VectorXd& weighted_u) const {
    const Eigen::VectorXd c = block_->design.transpose() * weighted_u;
    Eigen::VectorXd gamma = factor_.solve(c);
    const double reduction = 2.0 * gamma.dot(c) - gamma.dot(gram_ * gamma);
    return {std::move(gamma), reduction};
}

}  // namespace lssboost
