#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "lssboost/grid.hpp"

namespace lssboost {

struct FunctionalCovariate {
    Grid grid;
    Eigen::MatrixXd values;  ///< N x R
};

/// Response, named scalar covariates and named functional covariates
/// sharing the same observations.
class Dataset {
public:
    Eigen::VectorXd response;
    std::string response_name = "y";
    std::map<std::string, Eigen::VectorXd> scalars;
    std::map<std::string, FunctionalCovariate> functionals;

    Eigen::Index size() const noexcept { return response.size(); }

    /// Scalar column by name; the response is reachable under response_name.
    const Eigen::VectorXd& scalar(const std::string& name) const;
    const FunctionalCovariate& functional(const std::string& name) const;

    /// Throws DimensionError if any covariate disagrees with the response length.
    void validate() const;

    /// Rows [begin, end).
    Dataset slice(Eigen::Index begin, Eigen::Index end) const;
};

enum class LagTransform { identity, log_square };

struct LagRequest {
    std::string variable;
    int order = 1;
    LagTransform transform = LagTransform::identity;
};

/// Column name of lag j of `variable` under `transform`.
std::string lag_column_name(const std::string& variable, int lag, LagTransform transform);

/// Adds lag columns y_{i-j} (or log y_{i-j}^2) for j = 1..order of every
/// request, then drops the first max(order) rows.
Dataset with_lags(const Dataset& data, const std::vector<LagRequest>& lags);

}  // namespace lssboost
