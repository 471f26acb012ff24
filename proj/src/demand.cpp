#include "heatshift/demand.hpp"

#include "heatshift/errors.hpp"
#include "heatshift/units.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace heatshift::demand {
namespace {

void check_positive(const YearSeries &s, const char *name, std::vector<std::string> &errors) {
    if (s.empty()) {
        errors.push_back(std::string{name} + ": series is empty");
        return;
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!(s.values[i] > 0.0) || !std::isfinite(s.values[i])) {
            errors.push_back(std::string{name} + ": non-positive value in year " +
                             std::to_string(s.first_year + static_cast<int>(i)));
        }
    }
}

bool same_grid(const YearSeries &a, const YearSeries &b) {
    return a.first_year == b.first_year && a.values.size() == b.values.size();
}

} // namespace

void validate(const DemandDrivers &d) {
    std::vector<std::string> errors;
    check_positive(d.population, "population", errors);
    check_positive(d.floor_per_capita, "floor_per_capita", errors);
    check_positive(d.hdd, "hdd", errors);
    check_positive(d.heating_intensity, "heating_intensity", errors);
    check_positive(d.income_per_capita, "income_per_capita", errors);
    for (const auto *s : {&d.floor_per_capita, &d.hdd, &d.heating_intensity,
                          &d.income_per_capita, &d.new_build_fraction}) {
        if (!same_grid(d.population, *s)) {
            errors.emplace_back("driver series do not share one year grid");
            break;
        }
    }
    for (std::size_t i = 0; i < d.heating_intensity.values.size(); ++i) {
        const double v = d.heating_intensity.values[i];
        if (v < 10.0 || v > 300.0) {
            errors.push_back("heating_intensity outside [10, 300] kJ/m2/HDD in year " +
                             std::to_string(d.heating_intensity.first_year + static_cast<int>(i)));
        }
    }
    for (double v : d.new_build_fraction.values) {
        if (v < 0.0 || v > 1.0) {
            errors.emplace_back("new_build_fraction outside [0, 1]");
            break;
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

std::string_view to_string(VariantKind kind) noexcept {
    switch (kind) {
    case VariantKind::Baseline90by2100: return "Baseline90by2100";
    case VariantKind::Insulation19: return "Insulation19";
    case VariantKind::Retrofit45by2050: return "Retrofit45by2050";
    }
    return "Unknown";
}

VariantKind parse_variant_kind(std::string_view name) {
    for (auto k : {VariantKind::Baseline90by2100, VariantKind::Insulation19,
                   VariantKind::Retrofit45by2050}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ValidationError("unknown demand variant '" + std::string{name} + "'");
}

DemandVariant DemandVariant::baseline() {
    return {VariantKind::Baseline90by2100, 0.0, 90.0, 2100};
}

DemandVariant DemandVariant::insulation(double new_build_reduction) {
    return {VariantKind::Insulation19, new_build_reduction, 90.0, 2100};
}

DemandVariant DemandVariant::retrofit(double new_build_reduction) {
    return {VariantKind::Retrofit45by2050, new_build_reduction, 45.0, 2050};
}

void validate(const DemandVariant &v) {
    std::vector<std::string> errors;
    if (v.new_build_reduction < 0.0 || v.new_build_reduction > 1.0) {
        errors.emplace_back("new_build_reduction outside [0, 1]");
    }
    if (v.kind != VariantKind::Retrofit45by2050 && (v.target_intensity != 90.0 || v.target_year != 2100)) {
        errors.emplace_back("baseline and insulation variants converge to 90 kJ/m2/HDD by 2100");
    }
    if (v.kind == VariantKind::Retrofit45by2050 && (v.target_intensity != 45.0 || v.target_year != 2050)) {
        errors.emplace_back("retrofit variant converges to 45 kJ/m2/HDD by 2050");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

double space_heat_demand(const DemandDrivers &d, int year) {
    const double pop = d.population.at(year);
    const double floor = d.floor_per_capita.at(year);
    const double hdd = d.hdd.at(year);
    const double intensity = d.heating_intensity.at(year);
    if (!(pop > 0.0 && floor > 0.0 && hdd > 0.0 && intensity > 0.0)) {
        throw ValidationError("space heat drivers must be strictly positive in year " +
                              std::to_string(year));
    }
    return units::kj_to_kwh(pop * floor * hdd * intensity);
}

double water_heat_demand(const WaterDemandParams &params, double income, double population) {
    if (income < 0.0) {
        throw ValidationError("income must be >= 0");
    }
    if (params.saturation_level < 0.0 || !(params.half_saturation_income > 0.0)) {
        throw ValidationError("water demand needs saturation >= 0 and half-saturation income > 0");
    }
    if (std::isinf(income)) {
        return params.saturation_level * population;
    }
    return params.saturation_level * income / (income + params.half_saturation_income) * population;
}

YearSeries intensity_path(const DemandVariant &variant, double start_intensity, int start_year,
                          int end_year) {
    if (start_year >= end_year) {
        throw ValidationError("intensity path needs start_year < end_year");
    }
    validate(variant);
    YearSeries out{start_year, std::vector<double>(static_cast<std::size_t>(end_year - start_year + 1))};
    const double target = variant.target_intensity;
    const double span = static_cast<double>(variant.target_year - start_year);
    for (int y = start_year; y <= end_year; ++y) {
        double value = start_intensity;
        if (start_intensity > target) {
            const double progress = span > 0.0 ? std::min(1.0, (y - start_year) / span) : 1.0;
            value = start_intensity + (target - start_intensity) * progress;
        }
        out.values[static_cast<std::size_t>(y - start_year)] = value;
    }
    return out;
}

DemandTrajectory demand_trajectory(const DemandDrivers &drivers, const WaterDemandParams &water,
                                   const DemandVariant &variant, int base_year) {
    validate(drivers);
    const int first = drivers.population.first_year;
    const int last = drivers.population.last_year();
    if (base_year < first || base_year > last) {
        throw GridError("demand base year " + std::to_string(base_year) + " is off the driver grid");
    }

    YearSeries baseline_path;
    YearSeries variant_path;
    if (base_year < last) {
        const double start = drivers.heating_intensity.at(base_year);
        baseline_path = intensity_path(DemandVariant::baseline(), start, base_year, last);
        variant_path = intensity_path(variant, start, base_year, last);
    }

    const bool reduces_new_build = variant.kind != VariantKind::Baseline90by2100;
    DemandTrajectory out;
    out.ue_total.first_year = first;
    out.water_fraction.first_year = first;
    for (int y = first; y <= last; ++y) {
        double space = space_heat_demand(drivers, y);
        if (y > base_year) {
            const double intensity =
                std::min(variant_path.at(y), baseline_path.at(y));
            space *= intensity / drivers.heating_intensity.at(y);
            if (reduces_new_build) {
                space *= 1.0 - variant.new_build_reduction * drivers.new_build_fraction.at(y);
            }
        }
        const double water_ue =
            water_heat_demand(water, drivers.income_per_capita.at(y), drivers.population.at(y));
        const double total = space + water_ue;
        out.ue_total.values.push_back(total);
        out.water_fraction.values.push_back(total > 0.0 ? water_ue / total : 0.0);
    }
    return out;
}

} // namespace heatshift::demand
