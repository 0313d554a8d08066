#include "lssboost/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lssboost/error.hpp"

namespace lssboost {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

}  // namespace

double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                    std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw DataError("missing or invalid value '" + cell + "' in " + path.string() + " row " +
                        std::to_string(row) + " column " + std::to_string(col + 1));
    }
    return v;
}

const Eigen::VectorXd& Table::column(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return columns[k];
    }
    throw ConfigError("table has no column '" + name + "'");
}

void Table::add(std::string name, Eigen::VectorXd values) {
    names.push_back(std::move(name));
    columns.push_back(std::move(values));
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, ptr);
}

std::vector<std::vector<std::string>> read_rows_csv(const std::filesystem::path& path,
                                                    std::vector<std::string>* header) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file " + path.string());
    if (header) *header = split_line(line);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

Table read_table_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_rows_csv(path, &header);
    Table t;
    t.names = header;
    t.columns.assign(header.size(), Eigen::VectorXd(static_cast<Eigen::Index>(rows.size())));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw DataError(path.string() + " row " + std::to_string(r + 2) + " has " +
                            std::to_string(rows[r].size()) + " cells, header " +
                            std::to_string(header.size()));
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            t.columns[c](static_cast<Eigen::Index>(r)) = parse_number(rows[r][c], path, r + 2, c);
        }
    }
    return t;
}

void write_table_csv(const std::filesystem::path& path, const Table& table) {
    auto out = open_output(path);
    for (std::size_t c = 0; c < table.names.size(); ++c) out << (c ? "," : "") << table.names[c];
    out << '\n';
    for (Eigen::Index r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << (c ? "," : "") << format_double(table.columns[c](r));
        }
        out << '\n';
    }
}

FunctionalCovariate read_functional_csv(const std::filesystem::path& path) {
    std::vector<std::string> header;
    const auto rows = read_rows_csv(path, &header);
    Eigen::VectorXd points(static_cast<Eigen::Index>(header.size()));
    for (std::size_t c = 0; c < header.size(); ++c) points(c) = parse_number(header[c], path, 1, c);
    Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), points.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) {
            throw DataError(path.string() + " row " + std::to_string(r + 2) +
                            " does not match the grid length");
        }
        for (std::size_t c = 0; c < header.size(); ++c) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_number(rows[r][c], path, r + 2, c);
        }
    }
    return {Grid(points), std::move(values)};
}

void write_functional_csv(const std::filesystem::path& path, const FunctionalCovariate& x) {
    auto out = open_output(path);
    const auto& s = x.grid.points();
    for (Eigen::Index r = 0; r < s.size(); ++r) out << (r ? "," : "") << format_double(s(r));
    out << '\n';
    for (Eigen::Index i = 0; i < x.values.rows(); ++i) {
        for (Eigen::Index r = 0; r < x.values.cols(); ++r) {
            out << (r ? "," : "") << format_double(x.values(i, r));
        }
        out << '\n';
    }
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    auto out = open_output(path);
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << '\n';
    }
}

}  // namespace lssboost
