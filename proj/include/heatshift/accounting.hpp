#pragma once

#include "heatshift/results.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/series.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace heatshift::accounting {

/// Final energy (fuel or electricity) needed for a useful-energy output.
double useful_to_final(double ue, double efficiency);

/// On-site CO2 in kg. Throws ValidationError on a fuel without a carbon factor.
double direct_emissions(const std::map<std::string, double> &fuel_use_kwh,
                        const std::map<std::string, double> &carbon_by_fuel);

/// Power-sector CO2 in kg attributable to `electricity_kwh` in `year`.
double indirect_emissions(double electricity_kwh, const YearSeries &grid_intensity, int year);

/// Installed thermal capacity (kW_th) required to deliver `ue` at capacity factor `cf`.
double capacity(double ue, double cf);
std::vector<double> capacity_stock(std::span<const double> ue, std::span<const double> cf);

struct MoneyAccount {
    std::vector<int> years;
    std::vector<double> invest_expenses;
    std::vector<double> energy_expenses;
    std::vector<double> tax_revenue;
    std::vector<double> subsidy_outlay;

    double total_invest() const;
    double total_energy() const;
    double total_tax() const;
    double total_subsidy() const;
    /// Net household policy burden: tax revenue minus subsidy outlay.
    double net_policy_revenue() const { return total_tax() - total_subsidy(); }
};

/// Constant-currency, undiscounted accounts per region plus a "global" entry.
std::map<std::string, MoneyAccount> expenditure_accounts(const RunResult &run, int from_year,
                                                         int to_year);

inline constexpr const char *kGlobal = "global";

/// Cumulative CO2 (Gt) between two years, both grid variants.
struct EmissionTotals {
    double heating_gt = 0.0;
    double elec_decarb_gt = 0.0;
    double elec_baseline_gt = 0.0;
    double total_decarb_gt() const { return heating_gt + elec_decarb_gt; }
    double total_baseline_gt() const { return heating_gt + elec_baseline_gt; }
};

EmissionTotals cumulative_emissions(const RunResult &run, int from_year, int to_year);

/// Scenario-minus-reference differences in emissions and expenditure.
struct ExpenditureComparison {
    std::string scenario;
    std::string reference;
    double reference_invest = 0.0;
    double reference_energy = 0.0;
    double invest_delta = 0.0;
    double energy_delta = 0.0;
    double total_delta = 0.0;
    double policy_revenue = 0.0;       // tax minus subsidy in the scenario run
    double net_reduction_tco2 = 0.0;   // direct + indirect (decarbonised grid)
    double invest_per_tco2() const;    // NaN when there is no net reduction
};

/// Throws ValidationError when the runs cover different regions.
ExpenditureComparison compare_expenditures(const RunResult &scenario, const RunResult &reference,
                                           int from_year, int to_year);

struct EmissionComparison {
    std::string scenario;
    EmissionTotals scenario_totals;
    EmissionTotals reference_totals;
};

EmissionComparison compare_emissions(const RunResult &scenario, const RunResult &reference,
                                     int from_year, int to_year);

/// Required generation capacity (kW_el) for an annual electricity demand.
double generation_capacity(double electricity_kwh, double grid_cf = 0.45);

} // namespace heatshift::accounting
