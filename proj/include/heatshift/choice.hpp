#pragma once

#include "heatshift/costs.hpp"
#include "heatshift/matrix.hpp"
#include "heatshift/technology.hpp"

#include <span>
#include <string>
#include <vector>

namespace heatshift::choice {

using costs::CostDistribution;

/// Which substitutions households consider: allowed(from, to) is false when an
/// owner of `from` would never move to `to` (comfort regressions).
class SubstitutionMask {
public:
    SubstitutionMask() = default;

    /// Every class pair allowed.
    static SubstitutionMask permissive();
    /// Modern classes never move back to coal or traditional biomass.
    static SubstitutionMask comfort_default();

    bool allowed(TechClass from, TechClass to) const noexcept;
    void set(TechClass from, TechClass to, bool allowed) noexcept;

    bool operator==(const SubstitutionMask &) const = default;

private:
    std::vector<char> allowed_ = std::vector<char>(kTechClassCount * kTechClassCount, 1);
};

/// F(i, j): share of households preferring i over j, i.e. the share of owners
/// of j who would pick i. mask(i, j) is false when j -> i is blocked or either
/// technology is unavailable.
struct PreferenceMatrix {
    SquareMatrix F;
    std::vector<char> mask; // row-major, same layout as F

    bool permitted(std::size_t i, std::size_t j) const { return mask[i * F.size() + j] != 0; }
};

/// G(i, j): share of owners of incumbent i who would scrap it for candidate j.
struct ScrapMatrix {
    SquareMatrix G;
    std::vector<char> mask;

    bool permitted(std::size_t i, std::size_t j) const { return mask[i * G.size() + j] != 0; }
};

/// P(C_i < C_j) for independent Normal costs. Exact ties with zero spread give 0.5.
double pairwise_preference(const CostDistribution &gcoh_i, const CostDistribution &gcoh_j);

/// Pairwise preferences over available technologies, with the comfort mask applied.
PreferenceMatrix preference_matrix(std::span<const CostDistribution> gcoh,
                                   std::span<const Technology> techs,
                                   const SubstitutionMask &mask,
                                   std::span<const char> available);

/// P(MC_i > payback_j): share of incumbents of i for whom scrapping pays back in time.
double scrap_preference(const CostDistribution &mc_i, const CostDistribution &payback_j);

ScrapMatrix scrap_matrix(std::span<const CostDistribution> running_costs,
                         std::span<const CostDistribution> payback_costs,
                         std::span<const Technology> techs, const SubstitutionMask &mask,
                         std::span<const char> available);

/// Empty scrap matrix (scrapping disabled).
ScrapMatrix no_scrapping(std::size_t n);

} // namespace heatshift::choice
