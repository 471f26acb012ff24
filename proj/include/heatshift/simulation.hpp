#pragma once

#include "heatshift/choice.hpp"
#include "heatshift/costs.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/dynamics.hpp"
#include "heatshift/results.hpp"
#include "heatshift/scenario.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace heatshift {

/// Parameter perturbations used by the sensitivity harness. Defaults are identity.
struct ModelAdjustments {
    double fuel_price_trend = 0.0; // linear fraction per year, e.g. +0.01
    int fuel_trend_start_year = 2018;
    double learning_rate_factor = 1.0;
    double discount_rate_factor = 1.0;
    double gamma_factor = 1.0;

    bool operator==(const ModelAdjustments &) const = default;
};

struct RunOptions {
    dynamics::SimConfig sim;
    costs::BehaviourParams behaviour;
    ModelAdjustments adjustments;
    double learning_floor = 0.1;
};

nlohmann::json to_json(const RunOptions &options);

/// Cost picture of one region at one instant.
struct RegionCosts {
    std::vector<costs::CostInputs> inputs; // after policies
    std::vector<costs::CostDistribution> lcoh;
    std::vector<costs::CostDistribution> gcoh;
    std::vector<costs::CostDistribution> running;
    std::vector<costs::CostDistribution> payback;
};

/// Fuel price with the sensitivity trend applied.
costs::CostDistribution fuel_price(const io::Dataset &data, std::size_t region,
                                   const std::string &fuel, int year,
                                   const ModelAdjustments &adjustments);

RegionCosts region_costs(const io::Dataset &data, std::size_t region, int year,
                         std::span<const double> ic_mean, const costs::PolicyAtTime &policy,
                         std::span<const double> gamma, const RunOptions &options);

/// Technologies that can be chosen: present now, present historically, or seeded.
std::vector<char> availability(const io::Dataset &data, std::size_t region,
                               std::span<const double> shares,
                               const dynamics::KickStartOrder *kick);

/// Scrap decision rate per incumbent, 1 / (factor * lifetime).
std::vector<double> scrap_rates(const io::Dataset &data, const dynamics::SimConfig &config);

/// Demand trajectory of a region under a variant (ingested trajectories pass through).
demand::DemandTrajectory region_demand(const io::Dataset &data, std::size_t region,
                                       const demand::DemandVariant &variant, int base_year);

costs::LearningState initial_learning(const io::Dataset &data, const RunOptions &options);

/// Checks that demand, prices, grid intensities and history cover a run over
/// [start_year, end_year]. Throws ValidationError listing every gap.
void check_horizon(const io::Dataset &data, int start_year, int end_year);

/// The dataset's gammas, throwing ValidationError when it has none.
const costs::GammaTable &require_gammas(const io::Dataset &data);

using ProgressFn = std::function<void(const std::string &region, int year)>;

/// Runs the scenario over [start_year, end_year] and reports annual series.
RunResult simulate_run(const io::Dataset &data, const scenario::ScenarioSpec &spec,
                       const RunOptions &options, const costs::GammaTable &gammas,
                       const ProgressFn &progress = {});

} // namespace heatshift
