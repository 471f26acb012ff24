#include "heatshift/accounting.hpp"

#include "heatshift/errors.hpp"
#include "heatshift/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace heatshift::accounting {
namespace {

double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_region_sets(const RunResult &a, const RunResult &b) {
    std::vector<std::string> ra;
    std::vector<std::string> rb;
    for (const auto &r : a.regions) {
        ra.push_back(r.region);
    }
    for (const auto &r : b.regions) {
        rb.push_back(r.region);
    }
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    if (ra != rb) {
        throw ValidationError("runs '" + a.metadata.scenario_id + "' and '" +
                              b.metadata.scenario_id + "' cover different regions");
    }
}

void check_window(int from_year, int to_year) {
    if (from_year > to_year) {
        throw ValidationError("accounting window starts after it ends");
    }
}

} // namespace

double useful_to_final(double ue, double efficiency) {
    if (!(efficiency > 0.0)) {
        throw ValidationError("conversion efficiency must be > 0");
    }
    return ue / efficiency;
}

double direct_emissions(const std::map<std::string, double> &fuel_use_kwh,
                        const std::map<std::string, double> &carbon_by_fuel) {
    double total = 0.0;
    std::vector<std::string> unknown;
    for (const auto &[fuel, kwh] : fuel_use_kwh) {
        const auto it = carbon_by_fuel.find(fuel);
        if (it == carbon_by_fuel.end()) {
            unknown.push_back("unknown fuel '" + fuel + "'");
            continue;
        }
        total += kwh * it->second;
    }
    if (!unknown.empty()) {
        throw ValidationError(std::move(unknown));
    }
    return total;
}

double indirect_emissions(double electricity_kwh, const YearSeries &grid_intensity, int year) {
    if (!grid_intensity.covers(year)) {
        throw ValidationError("grid intensity has no value for year " + std::to_string(year));
    }
    return electricity_kwh * grid_intensity.at(year);
}

double capacity(double ue, double cf) {
    if (!(cf > 0.0 && cf <= 1.0)) {
        throw ValidationError("capacity factor must lie in (0, 1]");
    }
    return ue / (units::kHoursPerYear * cf);
}

std::vector<double> capacity_stock(std::span<const double> ue, std::span<const double> cf) {
    if (ue.size() != cf.size()) {
        throw ValidationError("demand and capacity-factor vectors differ in length");
    }
    std::vector<double> out(ue.size());
    for (std::size_t k = 0; k < ue.size(); ++k) {
        out[k] = capacity(ue[k], cf[k]);
    }
    return out;
}

double MoneyAccount::total_invest() const { return sum(invest_expenses); }
double MoneyAccount::total_energy() const { return sum(energy_expenses); }
double MoneyAccount::total_tax() const { return sum(tax_revenue); }
double MoneyAccount::total_subsidy() const { return sum(subsidy_outlay); }

std::map<std::string, MoneyAccount> expenditure_accounts(const RunResult &run, int from_year,
                                                         int to_year) {
    check_window(from_year, to_year);
    std::map<std::string, MoneyAccount> out;
    MoneyAccount global;
    for (const auto &r : run.regions) {
        MoneyAccount acc;
        for (std::size_t y = 0; y < r.years.size(); ++y) {
            if (r.years[y] < from_year || r.years[y] > to_year) {
                continue;
            }
            acc.years.push_back(r.years[y]);
            acc.invest_expenses.push_back(r.invest_eur[y]);
            acc.energy_expenses.push_back(r.energy_eur[y]);
            acc.tax_revenue.push_back(r.tax_eur[y]);
            acc.subsidy_outlay.push_back(r.subsidy_eur[y]);
        }
        if (global.years.empty()) {
            global.years = acc.years;
            global.invest_expenses.assign(acc.years.size(), 0.0);
            global.energy_expenses.assign(acc.years.size(), 0.0);
            global.tax_revenue.assign(acc.years.size(), 0.0);
            global.subsidy_outlay.assign(acc.years.size(), 0.0);
        }
        for (std::size_t k = 0; k < acc.years.size() && k < global.years.size(); ++k) {
            global.invest_expenses[k] += acc.invest_expenses[k];
            global.energy_expenses[k] += acc.energy_expenses[k];
            global.tax_revenue[k] += acc.tax_revenue[k];
            global.subsidy_outlay[k] += acc.subsidy_outlay[k];
        }
        out[r.region] = std::move(acc);
    }
    out[kGlobal] = std::move(global);
    return out;
}

EmissionTotals cumulative_emissions(const RunResult &run, int from_year, int to_year) {
    check_window(from_year, to_year);
    EmissionTotals t;
    for (const auto &r : run.regions) {
        for (std::size_t y = 0; y < r.years.size(); ++y) {
            if (r.years[y] < from_year || r.years[y] > to_year) {
                continue;
            }
            t.heating_gt += r.direct_kg[y];
            t.elec_decarb_gt += r.indirect_decarb_kg[y];
            t.elec_baseline_gt += r.indirect_baseline_kg[y];
        }
    }
    t.heating_gt /= units::kKgPerGigatonne;
    t.elec_decarb_gt /= units::kKgPerGigatonne;
    t.elec_baseline_gt /= units::kKgPerGigatonne;
    return t;
}

double ExpenditureComparison::invest_per_tco2() const {
    if (!(net_reduction_tco2 > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return invest_delta / net_reduction_tco2;
}

ExpenditureComparison compare_expenditures(const RunResult &scenario, const RunResult &reference,
                                           int from_year, int to_year) {
    check_region_sets(scenario, reference);
    const auto s = expenditure_accounts(scenario, from_year, to_year).at(kGlobal);
    const auto r = expenditure_accounts(reference, from_year, to_year).at(kGlobal);
    const auto es = cumulative_emissions(scenario, from_year, to_year);
    const auto er = cumulative_emissions(reference, from_year, to_year);

    ExpenditureComparison c;
    c.scenario = scenario.metadata.scenario_id;
    c.reference = reference.metadata.scenario_id;
    c.reference_invest = r.total_invest();
    c.reference_energy = r.total_energy();
    c.invest_delta = s.total_invest() - r.total_invest();
    c.energy_delta = s.total_energy() - r.total_energy();
    c.total_delta = c.invest_delta + c.energy_delta;
    c.policy_revenue = s.net_policy_revenue();
    c.net_reduction_tco2 = (er.total_decarb_gt() - es.total_decarb_gt()) *
                           units::kKgPerGigatonne / units::kKgPerTonne;
    return c;
}

EmissionComparison compare_emissions(const RunResult &scenario, const RunResult &reference,
                                     int from_year, int to_year) {
    check_region_sets(scenario, reference);
    return {scenario.metadata.scenario_id, cumulative_emissions(scenario, from_year, to_year),
            cumulative_emissions(reference, from_year, to_year)};
}

double generation_capacity(double electricity_kwh, double grid_cf) {
    if (!(grid_cf > 0.0 && grid_cf <= 1.0)) {
        throw ValidationError("grid capacity factor must lie in (0, 1]");
    }
    return electricity_kwh / (units::kHoursPerYear * grid_cf);
}

} // namespace heatshift::accounting
