#include "heatshift/technology.hpp"

#include "heatshift/errors.hpp"

#include <cmath>

namespace heatshift {

std::string_view to_string(TechClass c) noexcept {
    switch (c) {
    case TechClass::FossilCoal: return "FossilCoal";
    case TechClass::FossilOil: return "FossilOil";
    case TechClass::FossilGas: return "FossilGas";
    case TechClass::TraditionalBiomass: return "TraditionalBiomass";
    case TechClass::ModernBiomass: return "ModernBiomass";
    case TechClass::DistrictHeat: return "DistrictHeat";
    case TechClass::DirectElectric: return "DirectElectric";
    case TechClass::HeatPump: return "HeatPump";
    case TechClass::SolarThermal: return "SolarThermal";
    }
    return "Unknown";
}

std::optional<TechClass> parse_tech_class(std::string_view name) noexcept {
    for (auto c : kAllTechClasses) {
        if (to_string(c) == name) {
            return c;
        }
    }
    return std::nullopt;
}

void validate(const Technology &tech) {
    std::vector<std::string> errors;
    const auto prefix = "technology " + tech.id + ": ";
    if (tech.id.empty()) {
        errors.push_back("technology with empty id");
    }
    if (!(tech.efficiency > 0.0) || !std::isfinite(tech.efficiency)) {
        errors.push_back(prefix + "conversion efficiency must be > 0");
    }
    if (!(tech.lifetime > 0.0)) {
        errors.push_back(prefix + "lifetime must be > 0");
    }
    if (!(tech.learning_rate >= 0.0 && tech.learning_rate <= 0.5)) {
        errors.push_back(prefix + "learning rate must lie in [0, 0.5]");
    }
    if (!(tech.carbon_content >= 0.0)) {
        errors.push_back(prefix + "carbon content must be >= 0");
    }
    if (tech.fuel.empty()) {
        errors.push_back(prefix + "fuel id is empty");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

} // namespace heatshift
