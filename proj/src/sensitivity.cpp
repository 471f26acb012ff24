#include "heatshift/sensitivity.hpp"

#include "heatshift/accounting.hpp"

namespace heatshift::scenario {

std::vector<Perturbation> default_perturbations() {
    std::vector<Perturbation> out;
    ModelAdjustments a;
    a.fuel_price_trend = 0.01;
    out.push_back({"fuel_prices_plus_1pct", a});
    a = {};
    a.fuel_price_trend = -0.01;
    out.push_back({"fuel_prices_minus_1pct", a});
    a = {};
    a.learning_rate_factor = 0.5;
    out.push_back({"learning_rates_x0.5", a});
    a = {};
    a.discount_rate_factor = 1.5;
    out.push_back({"discount_rate_x1.5", a});
    a = {};
    a.gamma_factor = 0.5;
    out.push_back({"intangibles_x0.5", a});
    return out;
}

std::vector<SensitivityRow> sensitivity_suite(const io::Dataset &data,
                                              std::span<const ScenarioSpec> scenarios,
                                              const RunOptions &options,
                                              const costs::GammaTable &gammas, int from_year,
                                              int to_year) {
    const auto perturbations = default_perturbations();
    std::vector<SensitivityRow> rows;
    for (const auto &spec : scenarios) {
        SensitivityRow row;
        row.scenario = spec.id;
        const auto reference = simulate_run(data, spec, options, gammas);
        row.reference_gt = accounting::cumulative_emissions(reference, from_year, to_year).heating_gt;
        for (const auto &p : perturbations) {
            RunOptions perturbed = options;
            perturbed.adjustments = p.adjustments;
            const auto run = simulate_run(data, spec, perturbed, gammas);
            const double gt = accounting::cumulative_emissions(run, from_year, to_year).heating_gt;
            row.perturbations.push_back(p.name);
            row.deviation_pct.push_back(row.reference_gt > 0.0
                                            ? 100.0 * (gt - row.reference_gt) / row.reference_gt
                                            : 0.0);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace heatshift::scenario
