#pragma once

#include "heatshift/technology.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace heatshift::costs {

/// Mean and standard deviation of a cost component; the unit of household
/// heterogeneity. Normal family throughout.
struct CostDistribution {
    double mean = 0.0;
    double sd = 0.0;

    bool operator==(const CostDistribution &) const = default;
};

struct CostInputs {
    CostDistribution ic;         // EUR per kW_th, upfront incl. installation
    CostDistribution mr;         // EUR per kW_th per year
    CostDistribution fuel_price; // EUR per kWh_fuel
    double cf = 1.0;             // capacity factor in (0, 1]
};

void validate(const CostInputs &inputs);

struct BehaviourParams {
    double discount_rate = 0.09;
    CostDistribution payback_years{3.0, 1.0};
};

/// Policy levers in force at one instant, already resolved for a region.
struct PolicyAtTime {
    double carbon_tax = 0.0;                     // EUR per tCO2
    std::array<double, kTechClassCount> subsidy{}; // fractional IC reduction per class
    double electricity_subsidy = 0.0;            // EUR per kWh_el

    double subsidy_for(TechClass c) const noexcept { return subsidy[index_of(c)]; }
};

/// Annual full-load hours implied by a capacity factor.
double full_load_hours(double cf);

/// Σ_{t=0..τ} (1+r)^-t, the discount-factor sum shared by every levelised term.
double discount_factor_sum(double r, double lifetime);

/// Levelised cost of heating, EUR per kWh_th. Capital is paid at t=0; maintenance
/// and fuel accrue every year of the lifetime.
double levelised_cost(const Technology &tech, const CostInputs &costs, double r);

/// Quadrature of the component spreads, each normalised like its LCOH term.
double cost_spread(const Technology &tech, const CostInputs &costs, double r);

/// LCOH shifted by the intangible term; gamma moves the location only.
CostDistribution generalised_cost(const CostDistribution &lcoh, double gamma);

CostInputs apply_policies(const CostInputs &costs, const Technology &tech,
                          const PolicyAtTime &policy);

/// Running cost per kWh_th without capital: MR/hours + FC/CE.
double marginal_running_cost(const Technology &tech, const CostInputs &costs);
CostDistribution marginal_running_cost_distribution(const Technology &tech,
                                                    const CostInputs &costs);

/// MC_j plus the upfront cost per annual kWh_th recovered over `payback_years`.
double payback_cost(const Technology &tech, const CostInputs &costs, double payback_years);

/// Payback cost with the payback-threshold spread folded in to first order.
CostDistribution payback_cost_distribution(const Technology &tech, const CostInputs &costs,
                                           const CostDistribution &payback_years);

enum class GammaProvenance { Calibrated, Manual, Zero };

std::string_view to_string(GammaProvenance p) noexcept;
GammaProvenance parse_gamma_provenance(std::string_view name);

/// Intangible cost terms per region and technology, EUR per kWh_th internally.
struct GammaEntry {
    double value = 0.0;
    GammaProvenance provenance = GammaProvenance::Zero;

    bool operator==(const GammaEntry &) const = default;
};

class GammaVector {
public:
    GammaVector() = default;
    explicit GammaVector(std::size_t tech_count) : entries_(tech_count) {}

    std::size_t size() const noexcept { return entries_.size(); }
    const GammaEntry &operator[](std::size_t i) const { return entries_.at(i); }
    GammaEntry &operator[](std::size_t i) { return entries_.at(i); }
    std::vector<double> values() const;

    bool operator==(const GammaVector &) const = default;

private:
    std::vector<GammaEntry> entries_;
};

using GammaTable = std::map<std::string, GammaVector>;

/// Global learning-by-doing pool. IC(W) = IC0 (W/W0)^-b with b = log2(1/(1-LR)),
/// floored at a fraction of IC0.
class LearningState {
public:
    LearningState() = default;
    LearningState(std::vector<double> reference_capacity, std::vector<double> reference_cost,
                  std::vector<double> learning_rates, double floor_fraction = 0.1);

    std::size_t size() const noexcept { return capacity_.size(); }
    double cumulative_capacity(std::size_t tech) const { return capacity_.at(tech); }
    double reference_capacity(std::size_t tech) const { return reference_capacity_.at(tech); }
    double reference_cost(std::size_t tech) const { return reference_cost_.at(tech); }
    double learning_rate(std::size_t tech) const { return learning_rates_.at(tech); }
    double investment_cost(std::size_t tech) const;

    /// Adds new capacity (negative additions rejected) and returns the updated IC.
    double add_capacity(std::size_t tech, double added_kw);

private:
    std::vector<double> capacity_;
    std::vector<double> reference_capacity_;
    std::vector<double> reference_cost_;
    std::vector<double> learning_rates_;
    double floor_fraction_ = 0.1;
};

double learning_exponent(double learning_rate);

double learning_update(LearningState &state, std::size_t tech, double new_capacity_kw);

} // namespace heatshift::costs
