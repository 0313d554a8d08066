#include "lssboost/artifacts.hpp"

#include <cmath>

#include "lssboost/csv.hpp"
#include "lssboost/error.hpp"

namespace lssboost {

namespace {
constexpr const char* kOffsetLabel = "offset";
}

void write_coefficients(const std::filesystem::path& path, const Family& family,
                        const BuiltModel& model, const FitState& fit) {
    std::vector<std::vector<std::string>> rows;
    for (int q = 0; q < model.num_parameters(); ++q) {
        const auto param = family.parameter_name(q);
        rows.push_back({param, kOffsetLabel, "0", format_double(fit.offsets[q])});
        for (std::size_t j = 0; j < model.blocks[q].size(); ++j) {
            const auto& coef = fit.coefficients[q][j];
            for (Eigen::Index k = 0; k < coef.size(); ++k) {
                rows.push_back({param, model.blocks[q][j].label, std::to_string(k),
                                format_double(coef(k))});
            }
        }
    }
    write_rows_csv(path, {"parameter", "label", "index", "value"}, rows);
}

FitState read_coefficients(const std::filesystem::path& path, const Family& family,
                           const BuiltModel& model) {
    const int Q = model.num_parameters();
    FitState fit;
    fit.offsets.assign(Q, std::nan(""));
    fit.coefficients.resize(Q);
    fit.updates.assign(Q, 0);
    std::vector<std::vector<std::vector<bool>>> seen(Q);
    for (int q = 0; q < Q; ++q) {
        for (const auto& b : model.blocks[q]) {
            fit.coefficients[q].push_back(Eigen::VectorXd::Zero(b.size()));
            seen[q].emplace_back(static_cast<std::size_t>(b.size()), false);
        }
    }
    const auto rows = read_rows_csv(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 4) throw DataError(path.string() + ": expected 4 cells per row");
        int q = -1;
        for (int k = 0; k < Q; ++k) {
            if (family.parameter_name(k) == row[0]) q = k;
        }
        if (q < 0) throw DataError(path.string() + ": unknown parameter '" + row[0] + "'");
        const double value = parse_number(row[3], path, r + 2, 3);
        if (row[1] == kOffsetLabel) {
            fit.offsets[q] = value;
            continue;
        }
        const int j = model.find(q, row[1]);
        const double index = parse_number(row[2], path, r + 2, 2);
        const long k = static_cast<long>(index);
        if (static_cast<double>(k) != index) {
            throw DataError(path.string() + ": index " + row[2] + " is not an integer");
        }
        if (k < 0 || k >= fit.coefficients[q][j].size()) {
            throw DataError(path.string() + ": index " + row[2] + " out of range for " + row[1]);
        }
        fit.coefficients[q][j](k) = value;
        seen[q][j][static_cast<std::size_t>(k)] = true;
    }
    for (int q = 0; q < Q; ++q) {
        if (std::isnan(fit.offsets[q])) {
            throw DataError(path.string() + ": missing offset of " + family.parameter_name(q));
        }
        for (std::size_t j = 0; j < seen[q].size(); ++j) {
            for (bool s : seen[q][j]) {
                if (!s) throw DataError(path.string() + ": incomplete coefficients of " +
                                        model.blocks[q][j].label);
            }
        }
    }
    return fit;
}

void write_coefficient_curve(const std::filesystem::path& path, const Grid& grid,
                             const Eigen::VectorXd& value) {
    std::vector<std::vector<std::string>> rows;
    for (Eigen::Index r = 0; r < grid.size(); ++r) {
        rows.push_back({format_double(grid.points()(r)), format_double(value(r)), "", ""});
    }
    write_rows_csv(path, {"s", "value", "lower", "upper"}, rows);
}

void write_selection_log(const std::filesystem::path& path, const Family& family,
                         const BuiltModel& model, const FitState& fit) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : fit.selections) {
        rows.push_back({std::to_string(s.iteration), family.parameter_name(s.parameter),
                        model.blocks[s.parameter][s.block].label, format_double(s.rss)});
    }
    write_rows_csv(path, {"iteration", "parameter", "label", "rss"}, rows);
}

void write_risk_surface(const std::filesystem::path& path, const Family& family,
                        const RiskSurface& surface) {
    std::vector<std::string> header;
    const int Q = family.num_parameters();
    for (int q = 0; q < Q; ++q) header.push_back("m_stop_" + std::to_string(q + 1));
    header.push_back("mean_risk");
    for (Eigen::Index b = 0; b < surface.fold_risk.cols(); ++b) {
        header.push_back("fold_" + std::to_string(b + 1));
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t g = 0; g < surface.grid.size(); ++g) {
        std::vector<std::string> row;
        for (int m : surface.grid[g]) row.push_back(std::to_string(m));
        row.push_back(format_double(surface.mean_risk(static_cast<Eigen::Index>(g))));
        for (Eigen::Index b = 0; b < surface.fold_risk.cols(); ++b) {
            const double r = surface.fold_risk(static_cast<Eigen::Index>(g), b);
            row.push_back(std::isnan(r) ? "" : format_double(r));
        }
        rows.push_back(std::move(row));
    }
    write_rows_csv(path, header, rows);
}

}  // namespace lssboost
