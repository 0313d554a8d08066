#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "lssboost/dataset.hpp"

namespace lssboost {

/// Named numeric columns of equal length.
struct Table {
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> columns;

    Eigen::Index rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const Eigen::VectorXd& column(const std::string& name) const;
    void add(std::string name, Eigen::VectorXd values);
};

/// Shortest decimal text that reads back to the identical double (17 significant digits).
std::string format_double(double v);

/// Whole cell as a finite double; DataError naming the row and 1-based column otherwise.
double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                    std::size_t col);

/// Numeric CSV with one header row; empty or unparsable cells raise DataError.
Table read_table_csv(const std::filesystem::path& path);
void write_table_csv(const std::filesystem::path& path, const Table& table);

/// Header holds the grid points; each further row is one curve.
FunctionalCovariate read_functional_csv(const std::filesystem::path& path);
void write_functional_csv(const std::filesystem::path& path, const FunctionalCovariate& x);

/// Rows of strings for mixed-content outputs (labels plus numbers).
void write_rows_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_rows_csv(const std::filesystem::path& path,
                                                    std::vector<std::string>* header = nullptr);

}  // namespace lssboost
