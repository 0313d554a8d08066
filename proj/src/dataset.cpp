#include "lssboost/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "lssboost/error.hpp"

namespace lssboost {

const Eigen::VectorXd& Dataset::scalar(const std::string& name) const {
    if (auto it = scalars.find(name); it != scalars.end()) return it->second;
    if (name == response_name) return response;
    throw ConfigError("unknown scalar variable '" + name + "'");
}

const FunctionalCovariate& Dataset::functional(const std::string& name) const {
    if (auto it = functionals.find(name); it != functionals.end()) return it->second;
    throw ConfigError("unknown functional variable '" + name + "'");
}

void Dataset::validate() const {
    const Eigen::Index n = size();
    for (const auto& [name, col] : scalars) {
        if (col.size() != n) {
            throw DimensionError("scalar '" + name + "' has " + std::to_string(col.size()) +
                                 " rows, response " + std::to_string(n));
        }
        if (!col.allFinite()) throw DataError("scalar '" + name + "' has non-finite values");
    }
    for (const auto& [name, f] : functionals) {
        if (f.values.rows() != n) {
            throw DimensionError("functional '" + name + "' has " +
                                 std::to_string(f.values.rows()) + " curves, response " +
                                 std::to_string(n));
        }
        if (f.values.cols() != f.grid.size()) {
            throw DimensionError("functional '" + name + "' does not match its grid");
        }
        if (!f.values.allFinite()) {
            throw DataError("functional '" + name + "' has non-finite values");
        }
    }
    if (!response.allFinite()) throw DataError("response has non-finite values");
}

Dataset Dataset::slice(Eigen::Index begin, Eigen::Index end) const {
    if (begin < 0 || end > size() || begin > end) throw DimensionError("invalid row slice");
    const Eigen::Index n = end - begin;
    Dataset out;
    out.response_name = response_name;
    out.response = response.segment(begin, n);
    for (const auto& [name, col] : scalars) out.scalars.emplace(name, col.segment(begin, n));
    for (const auto& [name, f] : functionals) {
        out.functionals.emplace(name, FunctionalCovariate{f.grid, f.values.middleRows(begin, n)});
    }
    return out;
}

std::string lag_column_name(const std::string& variable, int lag, LagTransform transform) {
    const std::string base = transform == LagTransform::log_square ? "logsq_" + variable : variable;
    return base + "_lag" + std::to_string(lag);
}

Dataset with_lags(const Dataset& data, const std::vector<LagRequest>& lags) {
    int drop = 0;
    for (const auto& lag : lags) {
        if (lag.order < 1) throw ConfigError("lag order must be positive for '" + lag.variable + "'");
        drop = std::max(drop, lag.order);
    }
    if (drop >= data.size()) throw DimensionError("series too short for requested lags");

    Dataset extended = data;
    for (const auto& lag : lags) {
        const Eigen::VectorXd& source = data.scalar(lag.variable);
        for (int j = 1; j <= lag.order; ++j) {
            Eigen::VectorXd col = Eigen::VectorXd::Zero(data.size());
            for (Eigen::Index i = j; i < data.size(); ++i) {
                const double v = source(i - j);
                col(i) = lag.transform == LagTransform::log_square ? std::log(v * v) : v;
            }
            extended.scalars[lag_column_name(lag.variable, j, lag.transform)] = std::move(col);
        }
    }
    Dataset out = extended.slice(drop, data.size());
    for (const auto& [name, col] : out.scalars) {
        if (!col.allFinite()) {
            throw DataError("lag column '" + name + "' is non-finite (zero value under log_square?)");
        }
    }
    return out;
}

}  // namespace lssboost
