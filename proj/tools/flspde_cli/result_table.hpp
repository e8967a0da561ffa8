#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace flspde::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

/// %.17g, so values round-trip through text.
std::string format_number(double v);
std::string format_cell(const Cell& c);

/// CSV with a '#'-prefixed metadata block ahead of the header row.
class ResultTable {
public:
    explicit ResultTable(std::vector<std::string> columns);

    void add_meta(std::string key, std::string value);
    void add_row(std::vector<Cell> row);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    const std::vector<std::pair<std::string, std::string>>& meta() const { return meta_; }

    /// Numeric column by name; integer cells are widened.
    std::vector<double> numeric_column(const std::string& name) const;

    void write_meta(std::ostream& os) const;
    void write_body(std::ostream& os) const;
    void write(std::ostream& os) const;
    std::string str() const;

private:
    std::size_t column_index(const std::string& name) const;

    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
    std::vector<std::pair<std::string, std::string>> meta_;
};

} // namespace flspde::cli
