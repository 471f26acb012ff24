#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace heatshift {

enum class TechClass {
    FossilCoal,
    FossilOil,
    FossilGas,
    TraditionalBiomass,
    ModernBiomass,
    DistrictHeat,
    DirectElectric,
    HeatPump,
    SolarThermal,
};

inline constexpr std::size_t kTechClassCount = 9;

inline constexpr std::array<TechClass, kTechClassCount> kAllTechClasses{
    TechClass::FossilCoal,     TechClass::FossilOil,    TechClass::FossilGas,
    TechClass::TraditionalBiomass, TechClass::ModernBiomass, TechClass::DistrictHeat,
    TechClass::DirectElectric, TechClass::HeatPump,     TechClass::SolarThermal,
};

std::string_view to_string(TechClass c) noexcept;
std::optional<TechClass> parse_tech_class(std::string_view name) noexcept;

constexpr std::size_t index_of(TechClass c) noexcept { return static_cast<std::size_t>(c); }

constexpr bool is_fossil(TechClass c) noexcept {
    return c == TechClass::FossilCoal || c == TechClass::FossilOil || c == TechClass::FossilGas;
}

/// Incumbent classes whose functioning systems can be scrapped prematurely.
constexpr bool is_scrap_incumbent(TechClass c) noexcept {
    return is_fossil(c) || c == TechClass::TraditionalBiomass;
}

constexpr bool is_electric(TechClass c) noexcept {
    return c == TechClass::DirectElectric || c == TechClass::HeatPump;
}

/// Static technology descriptor. Efficiency may exceed 1 (heat pumps).
struct Technology {
    std::string id;
    TechClass tech_class = TechClass::FossilGas;
    double efficiency = 1.0;    // kWh_th per kWh_fuel
    double lifetime = 20.0;     // years
    double learning_rate = 0.0; // fractional cost drop per doubling
    std::string fuel;
    double carbon_content = 0.0; // kgCO2 per kWh_fuel
    bool subsidy_eligible = false;
};

/// Throws ValidationError listing every broken invariant.
void validate(const Technology &tech);

inline constexpr std::string_view kElectricityFuel = "electricity";

} // namespace heatshift
