#include "flspde_cli/result_table.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace flspde::cli {

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
}

ResultTable::ResultTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::invalid_argument("ResultTable: no columns");
}

void ResultTable::add_meta(std::string key, std::string value) {
    // Keep every metadata entry on its own comment line.
    std::replace(value.begin(), value.end(), '\n', ' ');
    meta_.emplace_back(std::move(key), std::move(value));
}

void ResultTable::add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::invalid_argument("ResultTable: row width mismatch");
    rows_.push_back(std::move(row));
}

std::size_t ResultTable::column_index(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw std::invalid_argument("ResultTable: no column '" + name + "'");
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> ResultTable::numeric_column(const std::string& name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) {
        if (const auto* d = std::get_if<double>(&row[c])) out.push_back(*d);
        else if (const auto* i = std::get_if<std::int64_t>(&row[c])) out.push_back(static_cast<double>(*i));
        else throw std::invalid_argument("ResultTable: column '" + name + "' is not numeric");
    }
    return out;
}

void ResultTable::write_meta(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << '\n';
}

void ResultTable::write_body(std::ostream& os) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

void ResultTable::write(std::ostream& os) const {
    write_meta(os);
    write_body(os);
}

std::string ResultTable::str() const {
    std::ostringstream os;
    write(os);
    return os.str();
}

} // namespace flspde::cli
