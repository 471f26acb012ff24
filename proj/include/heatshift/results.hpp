#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace heatshift {

inline constexpr int kResultSchemaVersion = 1;
inline constexpr const char *kCodeVersion = "heatshift 1.0.0";

using Matrix2D = std::vector<std::vector<double>>; // [year][item]

/// Annual series for one region. Stocks (shares, capacity) are start-of-year
/// values; flows (energy, emissions, money, built, scrapped) are sums over the
/// year's time steps.
struct RegionResult {
    std::string region;
    std::vector<int> years;
    Matrix2D shares;
    Matrix2D ue;           // kWh_UE per year, per technology
    std::vector<double> ue_total;
    std::vector<double> water_fraction;
    Matrix2D final_energy; // kWh per fuel
    Matrix2D capacity_kw;
    Matrix2D built_kw;
    Matrix2D scrapped_kw;
    std::vector<double> direct_kg;
    std::vector<double> indirect_decarb_kg;
    std::vector<double> indirect_baseline_kg;
    std::vector<double> invest_eur;  // pre-subsidy purchase cost of capacity built
    std::vector<double> energy_eur;  // pre-tax, pre-subsidy fuel cost
    std::vector<double> tax_eur;
    std::vector<double> subsidy_eur; // capital plus electricity subsidy outlays

    bool operator==(const RegionResult &) const = default;
};

struct RunMetadata {
    int schema_version = kResultSchemaVersion;
    std::string scenario_id;
    std::string dataset_name;
    std::string dataset_hash;
    std::string code_version = kCodeVersion;
    nlohmann::json config;   // SimConfig and behavioural parameters
    nlohmann::json scenario; // full ScenarioSpec as run

    bool operator==(const RunMetadata &) const = default;
};

struct RunResult {
    RunMetadata metadata;
    std::vector<std::string> tech_ids;
    std::vector<std::string> fuel_ids;
    std::vector<int> years;
    Matrix2D investment_cost; // global EUR/kW at the start of each year
    std::vector<RegionResult> regions;
    int step_halvings = 0;

    const RegionResult &region(const std::string &id) const;
    bool operator==(const RunResult &) const = default;
};

nlohmann::json to_json(const RunResult &run);
RunResult run_from_json(const nlohmann::json &j);

/// Canonical serialisation used for files and service payloads alike.
std::string serialize(const RunResult &run);
RunResult read_result(const std::filesystem::path &path);
void write_result(const RunResult &run, const std::filesystem::path &path);

/// One CSV per report (shares, energy, capacity, emissions, money) in `dir`.
void export_csv(const RunResult &run, const std::filesystem::path &dir);

/// Region-year report payloads used by the service: "shares", "emissions", "money".
nlohmann::json report_json(const RunResult &run, const std::string &report);

} // namespace heatshift
