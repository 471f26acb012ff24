#pragma once

#include "heatshift/choice.hpp"
#include "heatshift/matrix.hpp"
#include "heatshift/technology.hpp"

#include <optional>
#include <span>
#include <vector>

namespace heatshift::dynamics {

/// Market shares of one region on the simplex, plus the demand they split.
struct RegionState {
    std::vector<double> shares;
    double ue_total = 0.0;       // kWh_UE per year
    double water_fraction = 0.0; // solar-thermal ceiling
    double year = 0.0;
};

inline constexpr double kSimplexTolerance = 1e-9;

struct SimConfig {
    double dt = 0.25;
    int start_year = 2015;
    int end_year = 2050;
    bool scrapping_enabled = true;
    /// Scrap decision rate multiplier: kappa = 1 / (factor * lifetime).
    double scrap_lifetime_factor = 1.0;
    int threads = 1;
};

void validate(const SimConfig &config);

/// Gross flows of one step. flows(from, to) is share moved from `from` to `to`.
struct FlowReport {
    SquareMatrix regular;
    SquareMatrix scrap;
    std::vector<double> kick_start; // signed per-technology share delta
    double solar_overflow = 0.0;    // share moved out of solar by the water cap
    int halvings = 0;
    std::vector<double> built_kw;
    std::vector<double> scrapped_kw;

    explicit FlowReport(std::size_t n = 0)
        : regular(n), scrap(n), kick_start(n, 0.0), built_kw(n, 0.0), scrapped_kw(n, 0.0) {}

    std::vector<double> net_regular() const;
    void accumulate(const FlowReport &other);
};

/// Kick-start seeding: a yearly slice of the dominant fossil share moved to
/// renewables of the listed classes.
struct KickStartOrder {
    double rate_per_year = 0.01;
    std::vector<TechClass> classes{TechClass::ModernBiomass, TechClass::HeatPump,
                                   TechClass::SolarThermal};
};

struct RegionConstraints {
    bool district_present = true;
};

struct StepInputs {
    const choice::PreferenceMatrix &preferences;
    const choice::ScrapMatrix &scrapping;
    std::span<const double> lifetimes;
    std::span<const double> scrap_rates; // kappa per incumbent, 1/years
    std::span<const Technology> techs;
    const KickStartOrder *kick_start = nullptr;
    RegionConstraints constraints{};
};

struct StepResult {
    RegionState state;
    FlowReport flows;
};

/// Gross share substitution from j to i over one step.
double share_flow(double s_i, double s_j, double f_ij, double lifetime_j, double dt);

/// Instantaneous dS/dt from regular replacement and scrapping, before any
/// constraint projection.
std::vector<double> share_rates(std::span<const double> shares, const StepInputs &inputs);

/// Technology indices selected by a kick-start order and their share deltas.
std::vector<double> kick_start(std::span<const double> shares, std::span<const Technology> techs,
                               const KickStartOrder &order, double dt,
                               const RegionConstraints &constraints);

/// Solar cap at the water-heating fraction with proportional redistribution of
/// the overflow, then district heat removed where no network exists. Returns
/// the overflow moved.
double enforce_constraints(std::vector<double> &shares, std::span<const Technology> techs,
                           double water_fraction, const RegionConstraints &constraints);

/// One step: flows, kick-start, constraints, renormalisation. The step is split
/// in halves whenever a share would fall below -1e-9.
StepResult step_shares(const RegionState &state, const StepInputs &inputs, double dt);

/// Throws if shares leave the simplex (sum off by > 1e-9 or any negative entry).
void check_simplex(std::span<const double> shares);

} // namespace heatshift::dynamics
