#include "heatshift/costs.hpp"

#include "heatshift/errors.hpp"
#include "heatshift/units.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heatshift::costs {
namespace {

void check_distribution(const CostDistribution &d, const char *name,
                        std::vector<std::string> &errors) {
    if (!(d.mean >= 0.0) || !std::isfinite(d.mean)) {
        errors.push_back(std::string{name} + " mean must be finite and >= 0");
    }
    if (!(d.sd >= 0.0) || !std::isfinite(d.sd)) {
        errors.push_back(std::string{name} + " sd must be finite and >= 0");
    }
}

void require_valid(const Technology &tech, const CostInputs &costs) {
    validate(tech);
    validate(costs);
}

double capital_factor(const Technology &tech, const CostInputs &costs, double r) {
    return 1.0 / (full_load_hours(costs.cf) * discount_factor_sum(r, tech.lifetime));
}

} // namespace

void validate(const CostInputs &inputs) {
    std::vector<std::string> errors;
    check_distribution(inputs.ic, "investment cost", errors);
    check_distribution(inputs.mr, "maintenance cost", errors);
    check_distribution(inputs.fuel_price, "fuel price", errors);
    if (!(inputs.cf > 0.0 && inputs.cf <= 1.0)) {
        errors.emplace_back("capacity factor must lie in (0, 1]");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

double full_load_hours(double cf) {
    if (!(cf > 0.0)) {
        throw ValidationError("capacity factor must be > 0");
    }
    return units::kHoursPerYear * cf;
}

double discount_factor_sum(double r, double lifetime) {
    if (!(lifetime > 0.0)) {
        throw ValidationError("lifetime must be > 0");
    }
    if (!(r > -1.0)) {
        throw ValidationError("discount rate must be > -1");
    }
    const int years = static_cast<int>(std::floor(lifetime));
    double sum = 0.0;
    double factor = 1.0;
    for (int t = 0; t <= years; ++t) {
        sum += factor;
        factor /= 1.0 + r;
    }
    return sum;
}

double levelised_cost(const Technology &tech, const CostInputs &costs, double r) {
    require_valid(tech, costs);
    return costs.ic.mean * capital_factor(tech, costs, r) + costs.mr.mean / full_load_hours(costs.cf) +
           costs.fuel_price.mean / tech.efficiency;
}

double cost_spread(const Technology &tech, const CostInputs &costs, double r) {
    require_valid(tech, costs);
    const double ic = costs.ic.sd * capital_factor(tech, costs, r);
    const double mr = costs.mr.sd / full_load_hours(costs.cf);
    const double fc = costs.fuel_price.sd / tech.efficiency;
    return std::sqrt(ic * ic + mr * mr + fc * fc);
}

CostDistribution generalised_cost(const CostDistribution &lcoh, double gamma) {
    return {lcoh.mean + gamma, lcoh.sd};
}

CostInputs apply_policies(const CostInputs &costs, const Technology &tech,
                          const PolicyAtTime &policy) {
    std::vector<std::string> errors;
    for (double s : policy.subsidy) {
        if (!(s >= 0.0 && s <= 1.0)) {
            errors.emplace_back("subsidy rate outside [0, 1]");
            break;
        }
    }
    if (!(policy.carbon_tax >= 0.0)) {
        errors.emplace_back("carbon tax must be >= 0");
    }
    if (!(policy.electricity_subsidy >= 0.0)) {
        errors.emplace_back("electricity subsidy must be >= 0");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }

    CostInputs out = costs;
    out.fuel_price.mean += policy.carbon_tax * tech.carbon_content / units::kKgPerTonne;
    if (tech.fuel == kElectricityFuel) {
        out.fuel_price.mean = std::max(0.0, out.fuel_price.mean - policy.electricity_subsidy);
    }
    if (tech.subsidy_eligible) {
        const double keep = 1.0 - policy.subsidy_for(tech.tech_class);
        out.ic.mean *= keep;
        out.ic.sd *= keep;
    }
    return out;
}

double marginal_running_cost(const Technology &tech, const CostInputs &costs) {
    require_valid(tech, costs);
    return costs.mr.mean / full_load_hours(costs.cf) + costs.fuel_price.mean / tech.efficiency;
}

CostDistribution marginal_running_cost_distribution(const Technology &tech,
                                                    const CostInputs &costs) {
    const double mean = marginal_running_cost(tech, costs);
    const double mr = costs.mr.sd / full_load_hours(costs.cf);
    const double fc = costs.fuel_price.sd / tech.efficiency;
    return {mean, std::sqrt(mr * mr + fc * fc)};
}

double payback_cost(const Technology &tech, const CostInputs &costs, double payback_years) {
    if (!(payback_years > 0.0)) {
        throw ValidationError("payback threshold must be > 0");
    }
    return marginal_running_cost(tech, costs) +
           costs.ic.mean / full_load_hours(costs.cf) / payback_years;
}

CostDistribution payback_cost_distribution(const Technology &tech, const CostInputs &costs,
                                           const CostDistribution &payback_years) {
    const double b = payback_years.mean;
    if (!(b > 0.0)) {
        throw ValidationError("payback threshold must be > 0");
    }
    const auto mc = marginal_running_cost_distribution(tech, costs);
    const double hours = full_load_hours(costs.cf);
    const double capital = costs.ic.mean / hours;
    const double capital_sd = costs.ic.sd / hours / b;
    const double threshold_sd = capital * payback_years.sd / (b * b);
    return {mc.mean + capital / b,
            std::sqrt(mc.sd * mc.sd + capital_sd * capital_sd + threshold_sd * threshold_sd)};
}

std::string_view to_string(GammaProvenance p) noexcept {
    switch (p) {
    case GammaProvenance::Calibrated: return "calibrated";
    case GammaProvenance::Manual: return "manual";
    case GammaProvenance::Zero: return "zero";
    }
    return "zero";
}

GammaProvenance parse_gamma_provenance(std::string_view name) {
    for (auto p : {GammaProvenance::Calibrated, GammaProvenance::Manual, GammaProvenance::Zero}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    throw ValidationError("unknown gamma provenance '" + std::string{name} + "'");
}

std::vector<double> GammaVector::values() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_) {
        out.push_back(e.value);
    }
    return out;
}

double learning_exponent(double learning_rate) {
    if (!(learning_rate >= 0.0 && learning_rate < 1.0)) {
        throw ValidationError("learning rate must lie in [0, 1)");
    }
    return std::log2(1.0 / (1.0 - learning_rate));
}

LearningState::LearningState(std::vector<double> reference_capacity,
                             std::vector<double> reference_cost,
                             std::vector<double> learning_rates, double floor_fraction)
    : capacity_(reference_capacity), reference_capacity_(std::move(reference_capacity)),
      reference_cost_(std::move(reference_cost)), learning_rates_(std::move(learning_rates)),
      floor_fraction_(floor_fraction) {
    std::vector<std::string> errors;
    if (reference_cost_.size() != capacity_.size() || learning_rates_.size() != capacity_.size()) {
        errors.emplace_back("learning state vectors differ in length");
    }
    for (double w : capacity_) {
        if (!(w > 0.0)) {
            errors.emplace_back("reference cumulative capacity must be > 0");
            break;
        }
    }
    if (!(floor_fraction_ >= 0.0 && floor_fraction_ <= 1.0)) {
        errors.emplace_back("learning floor must lie in [0, 1]");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

double LearningState::investment_cost(std::size_t tech) const {
    const double ic0 = reference_cost_.at(tech);
    const double beta = learning_exponent(learning_rates_.at(tech));
    if (beta == 0.0) {
        return ic0;
    }
    const double ic = ic0 * std::pow(capacity_.at(tech) / reference_capacity_.at(tech), -beta);
    return std::max(ic, floor_fraction_ * ic0);
}

double LearningState::add_capacity(std::size_t tech, double added_kw) {
    if (!(added_kw >= 0.0)) {
        throw ValidationError("capacity additions must be >= 0");
    }
    capacity_.at(tech) += added_kw;
    return investment_cost(tech);
}

double learning_update(LearningState &state, std::size_t tech, double new_capacity_kw) {
    return state.add_capacity(tech, new_capacity_kw);
}

} // namespace heatshift::costs
