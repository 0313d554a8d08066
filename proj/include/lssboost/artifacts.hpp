#pragma once

#include <filesystem>

#include "lssboost/boost.hpp"
#include "lssboost/terms.hpp"
#include "lssboost/tuning.hpp"

namespace lssboost {

/// parameter,label,index,value with one "offset" row per parameter.
void write_coefficients(const std::filesystem::path& path, const Family& family,
                        const BuiltModel& model, const FitState& fit);

/// Rebuilds offsets and coefficients for `model`; labels and sizes must match.
FitState read_coefficients(const std::filesystem::path& path, const Family& family,
                           const BuiltModel& model);

/// s,value,lower,upper; the bounds stay empty without bootstrap bands.
void write_coefficient_curve(const std::filesystem::path& path, const Grid& grid,
                             const Eigen::VectorXd& value);

void write_selection_log(const std::filesystem::path& path, const Family& family,
                         const BuiltModel& model, const FitState& fit);

/// m_stop_1..m_stop_Q, mean_risk, fold_1..fold_B.
void write_risk_surface(const std::filesystem::path& path, const Family& family,
                        const RiskSurface& surface);

}  // namespace lssboost
