#pragma once

#include <vector>

namespace heatshift {

/// Annual series on a contiguous year grid starting at `first_year`.
struct YearSeries {
    int first_year = 0;
    std::vector<double> values;

    YearSeries() = default;
    YearSeries(int first, std::vector<double> v) : first_year{first}, values{std::move(v)} {}

    bool empty() const noexcept { return values.empty(); }
    int last_year() const noexcept { return first_year + static_cast<int>(values.size()) - 1; }
    bool covers(int year) const noexcept { return !empty() && year >= first_year && year <= last_year(); }

    /// Throws GridError when `year` is off the grid.
    double at(int year) const;

    /// Policy-style lookup: `before` ahead of the grid, the last value held after it.
    double held(int year, double before = 0.0) const noexcept;

    std::vector<int> years() const;

    bool operator==(const YearSeries &) const = default;
};

} // namespace heatshift
