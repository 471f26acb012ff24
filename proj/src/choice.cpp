#include "heatshift/choice.hpp"

#include "heatshift/errors.hpp"

#include <spdlog/spdlog.h>

#include <cmath>

namespace heatshift::choice {
namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double exceedance(double lower_mean, double lower_sd, double upper_mean, double upper_sd) {
    if (!(lower_sd >= 0.0 && upper_sd >= 0.0)) {
        throw ValidationError("cost spreads must be >= 0");
    }
    const double spread = std::hypot(lower_sd, upper_sd);
    const double gap = upper_mean - lower_mean;
    if (spread == 0.0) {
        if (gap == 0.0) {
            spdlog::debug("exact cost tie with zero spread, preference set to 0.5");
            return 0.5;
        }
        return gap > 0.0 ? 1.0 : 0.0;
    }
    return normal_cdf(gap / spread);
}

void check_sizes(std::size_t n, std::size_t techs, std::size_t available) {
    if (techs != n || available != n) {
        throw ValidationError("cost, technology and availability vectors differ in length");
    }
}

} // namespace

SubstitutionMask SubstitutionMask::permissive() { return {}; }

SubstitutionMask SubstitutionMask::comfort_default() {
    SubstitutionMask mask;
    for (auto from : kAllTechClasses) {
        if (from == TechClass::FossilCoal || from == TechClass::TraditionalBiomass) {
            continue;
        }
        mask.set(from, TechClass::FossilCoal, false);
        mask.set(from, TechClass::TraditionalBiomass, false);
    }
    return mask;
}

bool SubstitutionMask::allowed(TechClass from, TechClass to) const noexcept {
    return allowed_[index_of(from) * kTechClassCount + index_of(to)] != 0;
}

void SubstitutionMask::set(TechClass from, TechClass to, bool allowed) noexcept {
    allowed_[index_of(from) * kTechClassCount + index_of(to)] = allowed ? 1 : 0;
}

double pairwise_preference(const CostDistribution &gcoh_i, const CostDistribution &gcoh_j) {
    return exceedance(gcoh_i.mean, gcoh_i.sd, gcoh_j.mean, gcoh_j.sd);
}

PreferenceMatrix preference_matrix(std::span<const CostDistribution> gcoh,
                                   std::span<const Technology> techs,
                                   const SubstitutionMask &mask,
                                   std::span<const char> available) {
    const std::size_t n = gcoh.size();
    check_sizes(n, techs.size(), available.size());
    PreferenceMatrix out{SquareMatrix(n), std::vector<char>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        if (!available[i]) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!available[j] || !mask.allowed(techs[j].tech_class, techs[i].tech_class)) {
                continue;
            }
            out.mask[i * n + j] = 1;
            out.F(i, j) = i == j ? 0.5 : pairwise_preference(gcoh[i], gcoh[j]);
        }
    }
    return out;
}

double scrap_preference(const CostDistribution &mc_i, const CostDistribution &payback_j) {
    return exceedance(payback_j.mean, payback_j.sd, mc_i.mean, mc_i.sd);
}

ScrapMatrix scrap_matrix(std::span<const CostDistribution> running_costs,
                         std::span<const CostDistribution> payback_costs,
                         std::span<const Technology> techs, const SubstitutionMask &mask,
                         std::span<const char> available) {
    const std::size_t n = running_costs.size();
    check_sizes(n, techs.size(), available.size());
    if (payback_costs.size() != n) {
        throw ValidationError("running and payback cost vectors differ in length");
    }
    ScrapMatrix out{SquareMatrix(n), std::vector<char>(n * n, 0)};
    for (std::size_t i = 0; i < n; ++i) {
        if (!available[i] || !is_scrap_incumbent(techs[i].tech_class)) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!available[j] || techs[j].tech_class == techs[i].tech_class ||
                !mask.allowed(techs[i].tech_class, techs[j].tech_class)) {
                continue;
            }
            out.mask[i * n + j] = 1;
            out.G(i, j) = scrap_preference(running_costs[i], payback_costs[j]);
        }
    }
    return out;
}

ScrapMatrix no_scrapping(std::size_t n) {
    return {SquareMatrix(n), std::vector<char>(n * n, 0)};
}

} // namespace heatshift::choice
