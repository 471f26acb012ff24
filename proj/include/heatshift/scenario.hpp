#pragma once

#include "heatshift/costs.hpp"
#include "heatshift/demand.hpp"
#include "heatshift/series.hpp"
#include "heatshift/technology.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace heatshift::scenario {

enum class PowerVariant { Decarbonisation15C, PowerBaseline };

std::string_view to_string(PowerVariant v) noexcept;
PowerVariant parse_power_variant(std::string_view name);

struct SubsidyEntry {
    std::vector<TechClass> classes;
    std::vector<std::string> regions; // empty = every region
    YearSeries rate;                  // fraction of mean IC

    bool operator==(const SubsidyEntry &) const = default;
};

/// Region placeholder in kick-start entries, expanded to the dataset's
/// kick-start-eligible regions on resolution.
inline constexpr std::string_view kFlaggedRegions = "@flagged";

struct KickStartEntry {
    std::string region;
    int start_year = 2020;
    int duration_years = 10;
    std::vector<TechClass> classes{TechClass::ModernBiomass, TechClass::HeatPump,
                                   TechClass::SolarThermal};

    bool active(int year) const noexcept {
        return year >= start_year && year < start_year + duration_years;
    }
    bool operator==(const KickStartEntry &) const = default;
};

/// Time-resolved policy levers. Series read 0 before their first year and hold
/// their last value afterwards.
struct PolicySchedule {
    YearSeries carbon_tax;                            // EUR/tCO2, all regions
    std::map<std::string, YearSeries> regional_tax;   // per-region override
    std::vector<SubsidyEntry> subsidies;
    YearSeries electricity_subsidy;                   // EUR/kWh_el
    std::vector<KickStartEntry> kick_start;

    bool empty() const noexcept;
    double tax(const std::string &region, int year) const;
    costs::PolicyAtTime at(const std::string &region, int year) const;
    const KickStartEntry *kick_start_for(const std::string &region, int year) const;

    bool operator==(const PolicySchedule &) const = default;
};

void validate(const PolicySchedule &schedule);

/// Component-wise union: taxes add, subsidy and kick-start lists concatenate.
PolicySchedule merge(const PolicySchedule &a, const PolicySchedule &b);

struct ScenarioSpec {
    std::string id;
    demand::DemandVariant demand_variant;
    PolicySchedule schedule;
    PowerVariant power_variant = PowerVariant::Decarbonisation15C;
    std::string notes;

    bool operator==(const ScenarioSpec &) const = default;
};

/// tax(y) = start * (1 + 0.10 (y - start_year)) on [start_year, end_year].
YearSeries build_tax_series(double start_value, int start_year = 2020, int end_year = 2050);

/// Constant rate until `hold_until`, linear to zero at `zero_at`.
YearSeries build_subsidy_series(double rate, int start_year = 2020, int hold_until = 2030,
                                int zero_at = 2050);

inline constexpr std::string_view kPresetIds = "abcdefghij";

ScenarioSpec preset_scenario(std::string_view id);

/// Expands placeholder regions against the dataset's flagged regions.
ScenarioSpec resolve(const ScenarioSpec &spec, const std::vector<std::string> &flagged_regions);

nlohmann::json to_json(const ScenarioSpec &spec);
/// Throws ValidationError with one "path: message" entry per offending field.
ScenarioSpec scenario_from_json(const nlohmann::json &j);

nlohmann::json series_to_json(const YearSeries &s);
YearSeries series_from_json(const nlohmann::json &j, const std::string &path,
                            std::vector<std::string> &errors);

} // namespace heatshift::scenario
