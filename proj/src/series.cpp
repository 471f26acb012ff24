#include "heatshift/series.hpp"

#include "heatshift/errors.hpp"

#include <string>

namespace heatshift {

double YearSeries::at(int year) const {
    if (!covers(year)) {
        throw GridError("year " + std::to_string(year) + " is off the series grid [" +
                        std::to_string(first_year) + ", " + std::to_string(last_year()) + "]");
    }
    return values[static_cast<std::size_t>(year - first_year)];
}

double YearSeries::held(int year, double before) const noexcept {
    if (empty() || year < first_year) {
        return before;
    }
    if (year > last_year()) {
        return values.back();
    }
    return values[static_cast<std::size_t>(year - first_year)];
}

std::vector<int> YearSeries::years() const {
    std::vector<int> out(values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = first_year + static_cast<int>(i);
    }
    return out;
}

} // namespace heatshift
