#pragma once

namespace heatshift::units {

/// Full-load hours basis used to turn €/kW into €/kWh_th: 8766 h = 365.25 days.
inline constexpr double kHoursPerYear = 8766.0;
inline constexpr double kKilojoulePerKwh = 3600.0;
inline constexpr double kKgPerTonne = 1000.0;
inline constexpr double kKgPerGigatonne = 1.0e12;
inline constexpr double kCentPerEuro = 100.0;

constexpr double kj_to_kwh(double kj) { return kj / kKilojoulePerKwh; }

} // namespace heatshift::units
