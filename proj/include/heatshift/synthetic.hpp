#pragma once

#include "heatshift/costs.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/simulation.hpp"

// Desk-scale dataset: three stylised regions and the thirteen technology
// types, with histories generated from the model itself.

namespace heatshift::synthetic {

inline constexpr int kHistoryFirstYear = 2008;
inline constexpr int kBaseYear = 2015;
inline constexpr int kLastYear = 2050;

/// Technologies, regions, prices, demand and grid data. Histories are flat at
/// the base-year shares until `generate_history` replaces them.
io::Dataset base_dataset();

/// Intangible terms (EUR/kWh) the histories are generated with, zero for each
/// region's largest-share technology.
costs::GammaTable reference_gammas(const io::Dataset &data);

/// Replaces every history with the straight line through the base-year shares
/// whose slope is the model's handover rate under `gammas`.
void generate_history(io::Dataset &data, const costs::GammaTable &gammas,
                      const RunOptions &options, int first_year = kHistoryFirstYear);

} // namespace heatshift::synthetic
