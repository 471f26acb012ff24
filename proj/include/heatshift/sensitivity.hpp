#pragma once

#include "heatshift/dataset.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/simulation.hpp"

#include <span>
#include <string>
#include <vector>

namespace heatshift::scenario {

struct Perturbation {
    std::string name;
    ModelAdjustments adjustments;
};

/// Reference row plus the five parameter perturbations.
std::vector<Perturbation> default_perturbations();

struct SensitivityRow {
    std::string scenario;
    double reference_gt = 0.0; // cumulative direct CO2 of the unperturbed run
    std::vector<std::string> perturbations;
    std::vector<double> deviation_pct;
};

/// % deviation of cumulative direct CO2 over [from_year, to_year] per scenario.
std::vector<SensitivityRow> sensitivity_suite(const io::Dataset &data,
                                              std::span<const ScenarioSpec> scenarios,
                                              const RunOptions &options,
                                              const costs::GammaTable &gammas,
                                              int from_year = 2015, int to_year = 2050);

} // namespace heatshift::scenario
