#pragma once

#include "heatshift/choice.hpp"
#include "heatshift/costs.hpp"
#include "heatshift/demand.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/series.hpp"
#include "heatshift/technology.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace heatshift::io {

struct FuelSeries {
    YearSeries price; // EUR per kWh_fuel
    YearSeries sd;
};

struct RegionData {
    std::string id;
    bool kick_start_eligible = false;
    std::vector<double> capacity_factor; // per technology
    std::vector<double> efficiency;      // per technology, regional override of CE
    std::map<std::string, FuelSeries> fuel_prices;
    std::vector<YearSeries> history; // historical shares per technology
    std::optional<demand::DemandDrivers> drivers;
    demand::WaterDemandParams water;
    std::optional<demand::DemandTrajectory> trajectory; // ingested pass-through
    std::map<scenario::PowerVariant, YearSeries> grid_intensity; // kgCO2 per kWh_el

    int history_first_year() const;
    int history_last_year() const;
    double historical_share(std::size_t tech, int year) const;
    bool historically_present(std::size_t tech) const;
    /// District heat exists in the region (any historical district share).
    bool district_present(const std::vector<Technology> &techs) const;
};

struct Dataset {
    std::string name;
    std::string content_hash; // SHA-256 over the dataset files
    std::vector<Technology> techs;
    std::vector<costs::CostDistribution> ic; // EUR per kW_th
    std::vector<costs::CostDistribution> mr; // EUR per kW_th per year
    std::vector<double> reference_capacity;  // kW_th; empty entries derived
    choice::SubstitutionMask mask = choice::SubstitutionMask::comfort_default();
    std::vector<RegionData> regions;
    std::optional<costs::GammaTable> gammas;

    std::size_t tech_index(const std::string &id) const;
    std::size_t region_index(const std::string &id) const;
    std::vector<std::string> region_ids() const;
    std::vector<std::string> flagged_regions() const;
    std::vector<std::string> fuels() const;
    /// Per-fuel on-site carbon content, derived from the technology table.
    std::map<std::string, double> carbon_by_fuel() const;

    /// Technology copy carrying the region's efficiency override.
    Technology regional_tech(std::size_t region, std::size_t tech) const;
};

/// Reads and validates a dataset directory. Collects every violation before
/// throwing a single ValidationError.
Dataset load_dataset(const std::filesystem::path &dir);

/// Writes every file of the dataset layout (used by the synthetic generator).
void write_dataset(const Dataset &data, const std::filesystem::path &dir);

costs::GammaTable read_gamma_csv(const std::filesystem::path &path,
                                 const std::vector<Technology> &techs,
                                 const std::vector<std::string> &regions);
void write_gamma_csv(const costs::GammaTable &gammas, const std::vector<Technology> &techs,
                     const std::filesystem::path &path);

std::string sha256_hex(std::string_view bytes);

} // namespace heatshift::io
