#pragma once

#include "heatshift/series.hpp"

#include <string>
#include <string_view>

// Residential heat demand: space heating from the four-factor driver
// decomposition, water heating from an income-saturation curve, and the three
// heating-intensity convergence variants.

namespace heatshift::demand {

struct DemandDrivers {
    YearSeries population;        // persons
    YearSeries floor_per_capita;  // m2 per person
    YearSeries hdd;               // heating degree days per year
    YearSeries heating_intensity; // kJ_UE per m2 per HDD
    YearSeries income_per_capita; // currency per person per year
    YearSeries new_build_fraction; // share of stock built after the base year
};

void validate(const DemandDrivers &drivers);

enum class VariantKind { Baseline90by2100, Insulation19, Retrofit45by2050 };

std::string_view to_string(VariantKind kind) noexcept;
VariantKind parse_variant_kind(std::string_view name);

struct DemandVariant {
    VariantKind kind = VariantKind::Baseline90by2100;
    double new_build_reduction = 0.35;
    double target_intensity = 90.0;
    int target_year = 2100;

    static DemandVariant baseline();
    static DemandVariant insulation(double new_build_reduction = 0.35);
    static DemandVariant retrofit(double new_build_reduction = 0.35);

    bool operator==(const DemandVariant &) const = default;
};

void validate(const DemandVariant &variant);

struct WaterDemandParams {
    double saturation_level = 0.0;       // kWh_UE per person per year
    double half_saturation_income = 1.0; // currency per person per year
};

/// Population x floor area x HDD x intensity, in kWh_UE per year.
double space_heat_demand(const DemandDrivers &drivers, int year);

/// Michaelis-Menten saturation in income, times population (kWh_UE per year).
double water_heat_demand(const WaterDemandParams &params, double income, double population);

/// Linear path from `start_intensity` at `start_year` toward the variant's target,
/// never rising above the starting value. Covers start_year..end_year.
YearSeries intensity_path(const DemandVariant &variant, double start_intensity, int start_year,
                          int end_year);

struct DemandTrajectory {
    YearSeries ue_total;       // kWh_UE per year
    YearSeries water_fraction; // water share of ue_total
};

/// Space + water demand for one region. Years up to and including `base_year`
/// use the ingested intensity; later years follow the variant's path.
DemandTrajectory demand_trajectory(const DemandDrivers &drivers, const WaterDemandParams &water,
                                   const DemandVariant &variant, int base_year);

} // namespace heatshift::demand
