#include "heatshift/scenario.hpp"

#include "heatshift/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <type_traits>
#include <cmath>

namespace heatshift::scenario {
namespace {

using nlohmann::json;

bool region_matches(const std::vector<std::string> &regions, const std::string &region) {
    return regions.empty() || std::find(regions.begin(), regions.end(), region) != regions.end();
}

YearSeries add_series(const YearSeries &a, const YearSeries &b) {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    const int first = std::min(a.first_year, b.first_year);
    const int last = std::max(a.last_year(), b.last_year());
    YearSeries out{first, {}};
    for (int y = first; y <= last; ++y) {
        out.values.push_back(a.held(y) + b.held(y));
    }
    return out;
}

void check_series(const YearSeries &s, const std::string &name, double upper,
                  std::vector<std::string> &errors) {
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double v = s.values[k];
        if (!std::isfinite(v) || v < 0.0 || v > upper) {
            errors.push_back(name + ": value " + std::to_string(v) + " in year " +
                             std::to_string(s.first_year + static_cast<int>(k)) +
                             " is out of range");
        }
    }
}

json classes_to_json(const std::vector<TechClass> &classes) {
    json out = json::array();
    for (auto c : classes) {
        out.push_back(std::string{to_string(c)});
    }
    return out;
}

std::vector<TechClass> classes_from_json(const json &j, const std::string &path,
                                         std::vector<std::string> &errors) {
    std::vector<TechClass> out;
    if (!j.is_array()) {
        errors.push_back(path + ": expected an array of technology classes");
        return out;
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto item_path = path + "[" + std::to_string(k) + "]";
        if (!j[k].is_string()) {
            errors.push_back(item_path + ": expected a string");
            continue;
        }
        const auto cls = parse_tech_class(j[k].get<std::string>());
        if (!cls) {
            errors.push_back(item_path + ": unknown technology class '" +
                             j[k].get<std::string>() + "'");
            continue;
        }
        out.push_back(*cls);
    }
    return out;
}

std::vector<std::string> strings_from_json(const json &j, const std::string &path,
                                           std::vector<std::string> &errors) {
    std::vector<std::string> out;
    if (!j.is_array()) {
        errors.push_back(path + ": expected an array of strings");
        return out;
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_string()) {
            errors.push_back(path + "[" + std::to_string(k) + "]: expected a string");
            continue;
        }
        out.push_back(j[k].get<std::string>());
    }
    return out;
}

template <typename T>
bool read_number(const json &obj, const char *key, const std::string &path, T &out,
                 std::vector<std::string> &errors) {
    if (!obj.contains(key)) {
        return false;
    }
    const auto &v = obj.at(key);
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) {
            errors.push_back(path + "." + key + ": expected an integer");
            return false;
        }
    } else if (!v.is_number()) {
        errors.push_back(path + "." + key + ": expected a number");
        return false;
    }
    out = v.get<T>();
    return true;
}

json variant_to_json(const demand::DemandVariant &v) {
    return {{"kind", std::string{demand::to_string(v.kind)}},
            {"new_build_reduction", v.new_build_reduction},
            {"target_intensity", v.target_intensity},
            {"target_year", v.target_year}};
}

demand::DemandVariant variant_from_json(const json &j, const std::string &path,
                                        std::vector<std::string> &errors) {
    const json *kind_node = j.is_object() && j.contains("kind") ? &j.at("kind") : &j;
    if (!kind_node->is_string()) {
        errors.push_back(path + ": expected a variant name or an object with 'kind'");
        return {};
    }
    demand::DemandVariant v;
    try {
        switch (demand::parse_variant_kind(kind_node->get<std::string>())) {
        case demand::VariantKind::Baseline90by2100: v = demand::DemandVariant::baseline(); break;
        case demand::VariantKind::Insulation19: v = demand::DemandVariant::insulation(); break;
        case demand::VariantKind::Retrofit45by2050: v = demand::DemandVariant::retrofit(); break;
        }
    } catch (const ValidationError &e) {
        errors.push_back(path + ".kind: " + e.what());
        return {};
    }
    if (j.is_object()) {
        read_number(j, "new_build_reduction", path, v.new_build_reduction, errors);
        read_number(j, "target_intensity", path, v.target_intensity, errors);
        read_number(j, "target_year", path, v.target_year, errors);
        try {
            demand::validate(v);
        } catch (const ValidationError &e) {
            for (const auto &msg : e.violations()) {
                errors.push_back(path + ": " + msg);
            }
        }
    }
    return v;
}

json schedule_to_json(const PolicySchedule &s) {
    json regional = json::object();
    for (const auto &[region, series] : s.regional_tax) {
        regional[region] = series_to_json(series);
    }
    json subsidies = json::array();
    for (const auto &e : s.subsidies) {
        subsidies.push_back({{"classes", classes_to_json(e.classes)},
                             {"regions", e.regions},
                             {"rate", series_to_json(e.rate)}});
    }
    json kicks = json::array();
    for (const auto &k : s.kick_start) {
        kicks.push_back({{"region", k.region},
                         {"start_year", k.start_year},
                         {"duration_years", k.duration_years},
                         {"classes", classes_to_json(k.classes)}});
    }
    return {{"carbon_tax", series_to_json(s.carbon_tax)},
            {"regional_tax", regional},
            {"subsidies", subsidies},
            {"electricity_subsidy", series_to_json(s.electricity_subsidy)},
            {"kick_start", kicks}};
}

PolicySchedule schedule_from_json(const json &j, const std::string &path,
                                  std::vector<std::string> &errors) {
    PolicySchedule s;
    if (!j.is_object()) {
        errors.push_back(path + ": expected an object");
        return s;
    }
    for (const auto &[key, value] : j.items()) {
        if (key != "carbon_tax" && key != "regional_tax" && key != "subsidies" &&
            key != "electricity_subsidy" && key != "kick_start") {
            errors.push_back(path + "." + key + ": unknown field");
        }
    }
    if (j.contains("carbon_tax")) {
        s.carbon_tax = series_from_json(j.at("carbon_tax"), path + ".carbon_tax", errors);
    }
    if (j.contains("electricity_subsidy")) {
        s.electricity_subsidy =
            series_from_json(j.at("electricity_subsidy"), path + ".electricity_subsidy", errors);
    }
    if (j.contains("regional_tax")) {
        const auto &rt = j.at("regional_tax");
        if (!rt.is_object()) {
            errors.push_back(path + ".regional_tax: expected an object keyed by region");
        } else {
            for (const auto &[region, series] : rt.items()) {
                s.regional_tax[region] =
                    series_from_json(series, path + ".regional_tax." + region, errors);
            }
        }
    }
    if (j.contains("subsidies")) {
        const auto &arr = j.at("subsidies");
        if (!arr.is_array()) {
            errors.push_back(path + ".subsidies: expected an array");
        } else {
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const auto p = path + ".subsidies[" + std::to_string(k) + "]";
                const auto &e = arr[k];
                if (!e.is_object()) {
                    errors.push_back(p + ": expected an object");
                    continue;
                }
                SubsidyEntry entry;
                if (e.contains("classes")) {
                    entry.classes = classes_from_json(e.at("classes"), p + ".classes", errors);
                } else {
                    errors.push_back(p + ".classes: required");
                }
                if (e.contains("regions")) {
                    entry.regions = strings_from_json(e.at("regions"), p + ".regions", errors);
                }
                if (e.contains("rate")) {
                    entry.rate = series_from_json(e.at("rate"), p + ".rate", errors);
                } else {
                    errors.push_back(p + ".rate: required");
                }
                s.subsidies.push_back(std::move(entry));
            }
        }
    }
    if (j.contains("kick_start")) {
        const auto &arr = j.at("kick_start");
        if (!arr.is_array()) {
            errors.push_back(path + ".kick_start: expected an array");
        } else {
            for (std::size_t k = 0; k < arr.size(); ++k) {
                const auto p = path + ".kick_start[" + std::to_string(k) + "]";
                const auto &e = arr[k];
                if (!e.is_object()) {
                    errors.push_back(p + ": expected an object");
                    continue;
                }
                KickStartEntry entry;
                if (e.contains("region") && e.at("region").is_string()) {
                    entry.region = e.at("region").get<std::string>();
                } else {
                    errors.push_back(p + ".region: required string");
                }
                read_number(e, "start_year", p, entry.start_year, errors);
                read_number(e, "duration_years", p, entry.duration_years, errors);
                if (e.contains("classes")) {
                    entry.classes = classes_from_json(e.at("classes"), p + ".classes", errors);
                }
                s.kick_start.push_back(std::move(entry));
            }
        }
    }
    return s;
}

} // namespace

std::string_view to_string(PowerVariant v) noexcept {
    switch (v) {
    case PowerVariant::Decarbonisation15C: return "Decarbonisation15C";
    case PowerVariant::PowerBaseline: return "PowerBaseline";
    }
    return "Decarbonisation15C";
}

PowerVariant parse_power_variant(std::string_view name) {
    for (auto v : {PowerVariant::Decarbonisation15C, PowerVariant::PowerBaseline}) {
        if (to_string(v) == name) {
            return v;
        }
    }
    throw ValidationError("unknown power variant '" + std::string{name} + "'");
}

bool PolicySchedule::empty() const noexcept {
    return carbon_tax.empty() && regional_tax.empty() && subsidies.empty() &&
           electricity_subsidy.empty() && kick_start.empty();
}

double PolicySchedule::tax(const std::string &region, int year) const {
    const auto it = regional_tax.find(region);
    if (it != regional_tax.end()) {
        return it->second.held(year);
    }
    return carbon_tax.held(year);
}

costs::PolicyAtTime PolicySchedule::at(const std::string &region, int year) const {
    costs::PolicyAtTime p;
    p.carbon_tax = tax(region, year);
    for (const auto &entry : subsidies) {
        if (!region_matches(entry.regions, region)) {
            continue;
        }
        const double rate = entry.rate.held(year);
        for (auto cls : entry.classes) {
            p.subsidy[index_of(cls)] += rate;
        }
    }
    p.electricity_subsidy = electricity_subsidy.held(year);
    return p;
}

const KickStartEntry *PolicySchedule::kick_start_for(const std::string &region, int year) const {
    for (const auto &entry : kick_start) {
        if (entry.region == region && entry.active(year)) {
            return &entry;
        }
    }
    return nullptr;
}

void validate(const PolicySchedule &schedule) {
    std::vector<std::string> errors;
    check_series(schedule.carbon_tax, "carbon_tax", INFINITY, errors);
    for (const auto &[region, series] : schedule.regional_tax) {
        check_series(series, "regional_tax." + region, INFINITY, errors);
    }
    check_series(schedule.electricity_subsidy, "electricity_subsidy", INFINITY, errors);
    for (std::size_t k = 0; k < schedule.subsidies.size(); ++k) {
        const auto &entry = schedule.subsidies[k];
        const auto name = "subsidies[" + std::to_string(k) + "]";
        check_series(entry.rate, name + ".rate", 1.0, errors);
        if (entry.classes.empty()) {
            errors.push_back(name + ".classes: at least one class required");
        }
    }
    // Overlapping subsidies on one class must not exceed the full price.
    std::vector<int> years;
    for (const auto &entry : schedule.subsidies) {
        for (int y : entry.rate.years()) {
            years.push_back(y);
        }
    }
    std::sort(years.begin(), years.end());
    years.erase(std::unique(years.begin(), years.end()), years.end());
    for (int y : years) {
        std::array<double, kTechClassCount> total{};
        for (const auto &entry : schedule.subsidies) {
            for (auto cls : entry.classes) {
                total[index_of(cls)] += entry.rate.held(y);
            }
        }
        for (auto cls : kAllTechClasses) {
            if (total[index_of(cls)] > 1.0) {
                errors.push_back("combined subsidy on " + std::string{to_string(cls)} +
                                 " exceeds 1 in year " + std::to_string(y));
            }
        }
    }
    for (std::size_t k = 0; k < schedule.kick_start.size(); ++k) {
        const auto &entry = schedule.kick_start[k];
        const auto name = "kick_start[" + std::to_string(k) + "]";
        if (entry.region.empty()) {
            errors.push_back(name + ".region: empty");
        }
        if (entry.duration_years < 5 || entry.duration_years > 10) {
            errors.push_back(name + ".duration_years: must lie in [5, 10]");
        }
        if (entry.classes.empty()) {
            errors.push_back(name + ".classes: at least one class required");
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

PolicySchedule merge(const PolicySchedule &a, const PolicySchedule &b) {
    PolicySchedule out;
    out.carbon_tax = add_series(a.carbon_tax, b.carbon_tax);
    out.regional_tax = a.regional_tax;
    for (const auto &[region, series] : b.regional_tax) {
        out.regional_tax[region] = add_series(out.regional_tax[region], series);
    }
    out.subsidies = a.subsidies;
    out.subsidies.insert(out.subsidies.end(), b.subsidies.begin(), b.subsidies.end());
    out.electricity_subsidy = add_series(a.electricity_subsidy, b.electricity_subsidy);
    out.kick_start = a.kick_start;
    out.kick_start.insert(out.kick_start.end(), b.kick_start.begin(), b.kick_start.end());
    return out;
}

YearSeries build_tax_series(double start_value, int start_year, int end_year) {
    if (!(start_value >= 0.0)) {
        throw ValidationError("tax start value must be >= 0");
    }
    if (end_year < start_year) {
        throw ValidationError("tax series end precedes its start");
    }
    YearSeries out{start_year, {}};
    for (int y = start_year; y <= end_year; ++y) {
        out.values.push_back(start_value * (1.0 + 0.1 * (y - start_year)));
    }
    return out;
}

YearSeries build_subsidy_series(double rate, int start_year, int hold_until, int zero_at) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ValidationError("subsidy rate must lie in [0, 1]");
    }
    if (!(start_year <= hold_until && hold_until < zero_at)) {
        throw ValidationError("subsidy series needs start <= hold_until < zero_at");
    }
    YearSeries out{start_year, {}};
    for (int y = start_year; y <= zero_at; ++y) {
        if (y <= hold_until) {
            out.values.push_back(rate);
        } else {
            out.values.push_back(rate * static_cast<double>(zero_at - y) /
                                 static_cast<double>(zero_at - hold_until));
        }
    }
    return out;
}

ScenarioSpec preset_scenario(std::string_view id) {
    const std::vector<TechClass> renewables{TechClass::ModernBiomass, TechClass::HeatPump,
                                            TechClass::SolarThermal};
    auto with_subsidy = [&](double rate) {
        auto spec = preset_scenario("c");
        spec.schedule.subsidies.push_back({renewables, {}, build_subsidy_series(rate)});
        return spec;
    };
    auto with_tax = [](double start) {
        auto spec = preset_scenario("c");
        spec.schedule.carbon_tax = build_tax_series(start);
        return spec;
    };

    ScenarioSpec spec;
    if (id == "a") {
        spec.demand_variant = demand::DemandVariant::baseline();
        spec.notes = "baseline, no new policy";
    } else if (id == "b") {
        spec.demand_variant = demand::DemandVariant::insulation();
        spec.notes = "insulation improvements in new buildings";
    } else if (id == "c") {
        spec.demand_variant = demand::DemandVariant::retrofit();
        spec.notes = "insulation plus retrofits of existing buildings";
    } else if (id == "d") {
        spec = with_tax(50.0);
        spec.notes = "c + carbon tax 50 EUR/tCO2 rising to 200 by 2050";
    } else if (id == "e") {
        spec = with_tax(100.0);
        spec.notes = "c + carbon tax 100 EUR/tCO2 rising to 400 by 2050";
    } else if (id == "f") {
        spec = with_subsidy(0.25);
        spec.notes = "c + 25% renewable subsidy";
    } else if (id == "g") {
        spec = with_subsidy(0.5);
        spec.notes = "c + 50% renewable subsidy";
    } else if (id == "h") {
        const auto d = preset_scenario("d");
        const auto g = preset_scenario("g");
        spec = d;
        spec.schedule = merge(d.schedule, g.schedule);
        spec.notes = "c + carbon tax 50-200 + 50% renewable subsidy";
    } else if (id == "i") {
        spec = preset_scenario("h");
        spec.schedule.kick_start.push_back({std::string{kFlaggedRegions}, 2020, 10, renewables});
        spec.notes = "h + kick-start in flagged low-renewable regions";
    } else if (id == "j") {
        spec = preset_scenario("e");
        spec.schedule.electricity_subsidy = YearSeries{2020, std::vector<double>(31, 0.05)};
        spec.schedule.subsidies.push_back({{TechClass::DirectElectric, TechClass::HeatPump},
                                           {},
                                           YearSeries{2020, std::vector<double>(31, 0.3)}});
        spec.notes = "e + 0.05 EUR/kWh electricity subsidy + 30% subsidy on electric systems";
    } else {
        throw ValidationError("unknown preset scenario '" + std::string{id} + "'");
    }
    spec.id = std::string{id};
    return spec;
}

ScenarioSpec resolve(const ScenarioSpec &spec, const std::vector<std::string> &flagged_regions) {
    ScenarioSpec out = spec;
    out.schedule.kick_start.clear();
    for (const auto &entry : spec.schedule.kick_start) {
        if (entry.region != kFlaggedRegions) {
            out.schedule.kick_start.push_back(entry);
            continue;
        }
        for (const auto &region : flagged_regions) {
            auto copy = entry;
            copy.region = region;
            out.schedule.kick_start.push_back(std::move(copy));
        }
    }
    for (auto &entry : out.schedule.subsidies) {
        std::vector<std::string> regions;
        for (const auto &r : entry.regions) {
            if (r == kFlaggedRegions) {
                regions.insert(regions.end(), flagged_regions.begin(), flagged_regions.end());
            } else {
                regions.push_back(r);
            }
        }
        entry.regions = std::move(regions);
    }
    return out;
}

json series_to_json(const YearSeries &s) {
    return {{"years", s.years()}, {"values", s.values}};
}

YearSeries series_from_json(const json &j, const std::string &path,
                            std::vector<std::string> &errors) {
    if (!j.is_object() || !j.contains("years") || !j.contains("values")) {
        errors.push_back(path + ": expected {years: [...], values: [...]}");
        return {};
    }
    const auto &years = j.at("years");
    const auto &values = j.at("values");
    if (!years.is_array() || !values.is_array() || years.size() != values.size()) {
        errors.push_back(path + ": years and values must be arrays of equal length");
        return {};
    }
    YearSeries out;
    for (std::size_t k = 0; k < years.size(); ++k) {
        if (!years[k].is_number_integer() || !values[k].is_number()) {
            errors.push_back(path + "[" + std::to_string(k) + "]: expected integer year and numeric value");
            return {};
        }
        const int y = years[k].get<int>();
        if (k == 0) {
            out.first_year = y;
        } else if (y != out.first_year + static_cast<int>(k)) {
            errors.push_back(path + ".years: must be consecutive");
            return {};
        }
        out.values.push_back(values[k].get<double>());
    }
    return out;
}

json to_json(const ScenarioSpec &spec) {
    return {{"id", spec.id},
            {"demand_variant", variant_to_json(spec.demand_variant)},
            {"schedule", schedule_to_json(spec.schedule)},
            {"power_variant", std::string{to_string(spec.power_variant)}},
            {"notes", spec.notes}};
}

ScenarioSpec scenario_from_json(const json &j) {
    std::vector<std::string> errors;
    ScenarioSpec spec;
    if (!j.is_object()) {
        throw ValidationError(std::vector<std::string>{"$: expected an object"});
    }
    for (const auto &[key, value] : j.items()) {
        if (key != "id" && key != "demand_variant" && key != "schedule" &&
            key != "power_variant" && key != "notes") {
            errors.push_back("$." + key + ": unknown field");
        }
    }
    if (j.contains("id") && j.at("id").is_string() && !j.at("id").get<std::string>().empty()) {
        spec.id = j.at("id").get<std::string>();
    } else {
        errors.emplace_back("$.id: required non-empty string");
    }
    if (j.contains("demand_variant")) {
        spec.demand_variant = variant_from_json(j.at("demand_variant"), "$.demand_variant", errors);
    } else {
        errors.emplace_back("$.demand_variant: required");
    }
    if (j.contains("schedule")) {
        spec.schedule = schedule_from_json(j.at("schedule"), "$.schedule", errors);
        if (errors.empty()) {
            try {
                validate(spec.schedule);
            } catch (const ValidationError &e) {
                for (const auto &msg : e.violations()) {
                    errors.push_back("$.schedule." + msg);
                }
            }
        }
    }
    if (j.contains("power_variant")) {
        const auto &pv = j.at("power_variant");
        try {
            if (!pv.is_string()) {
                throw ValidationError("expected a string");
            }
            spec.power_variant = parse_power_variant(pv.get<std::string>());
        } catch (const ValidationError &e) {
            errors.push_back(std::string{"$.power_variant: "} + e.what());
        }
    }
    if (j.contains("notes")) {
        if (j.at("notes").is_string()) {
            spec.notes = j.at("notes").get<std::string>();
        } else {
            errors.emplace_back("$.notes: expected a string");
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
    return spec;
}

} // namespace heatshift::scenario
