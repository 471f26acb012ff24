#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace heatshift::csv {

/// Header-addressed view of a comma-separated file. No quoting: fields never
/// contain commas in any schema this project reads.
class Table {
public:
    static Table parse(std::istream &in, std::string source);
    static Table read(const std::filesystem::path &path);

    const std::string &source() const noexcept { return source_; }
    const std::vector<std::string> &header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    bool has_column(std::string_view name) const;

    /// Columns listed in `required` that the header lacks.
    std::vector<std::string> missing_columns(const std::vector<std::string> &required) const;

    const std::string &field(std::size_t row, std::string_view column) const;
    /// 1-based line number in the source file for diagnostics.
    std::size_t line(std::size_t row) const { return lines_.at(row); }
    std::string where(std::size_t row) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

/// Parses a decimal number; a decimal comma is accepted and normalised.
std::optional<double> parse_number(std::string_view text);
std::optional<int> parse_int(std::string_view text);
std::optional<bool> parse_bool(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

void write_row(std::ostream &out, const std::vector<std::string> &fields);

} // namespace heatshift::csv
