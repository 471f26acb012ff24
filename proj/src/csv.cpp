#include "heatshift/csv.hpp"

#include "heatshift/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace heatshift::csv {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string{s.substr(first, last - first + 1)};
}

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view{line}.substr(start, comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

Table Table::parse(std::istream &in, std::string source) {
    Table t;
    t.source_ = std::move(source);
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split(line);
        if (!have_header) {
            t.header_ = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header_.size()) {
            throw ValidationError(t.source_ + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header_.size()) + " fields, found " +
                                  std::to_string(fields.size()));
        }
        t.rows_.push_back(std::move(fields));
        t.lines_.push_back(line_no);
    }
    if (!have_header) {
        throw ValidationError(t.source_ + ": empty file");
    }
    return t;
}

Table Table::read(const std::filesystem::path &path) {
    std::ifstream in{path};
    if (!in) {
        throw ValidationError(path.string() + ": cannot open");
    }
    return parse(in, path.filename().string());
}

bool Table::has_column(std::string_view name) const {
    return std::find(header_.begin(), header_.end(), name) != header_.end();
}

std::vector<std::string> Table::missing_columns(const std::vector<std::string> &required) const {
    std::vector<std::string> out;
    for (const auto &c : required) {
        if (!has_column(c)) {
            out.push_back(c);
        }
    }
    return out;
}

const std::string &Table::field(std::size_t row, std::string_view column) const {
    const auto it = std::find(header_.begin(), header_.end(), column);
    if (it == header_.end()) {
        throw ValidationError(source_ + ": missing column '" + std::string{column} + "'");
    }
    return rows_.at(row)[static_cast<std::size_t>(it - header_.begin())];
}

std::string Table::where(std::size_t row) const {
    return source_ + ":" + std::to_string(line(row));
}

std::optional<double> parse_number(std::string_view text) {
    std::string s{text};
    if (s.find('.') == std::string::npos) {
        std::replace(s.begin(), s.end(), ',', '.');
    }
    if (s.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto *begin = s.data();
    const auto *end = s.data() + s.size();
    if (*begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_int(std::string_view text) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<bool> parse_bool(std::string_view text) {
    if (text == "1" || text == "true" || text == "yes") {
        return true;
    }
    if (text == "0" || text == "false" || text == "no") {
        return false;
    }
    return std::nullopt;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

void write_row(std::ostream &out, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << fields[i];
    }
    out << '\n';
}

} // namespace heatshift::csv
