#include "heatshift/synthetic.hpp"

#include "heatshift/calibration.hpp"
#include "heatshift/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace heatshift::synthetic {

namespace {

struct TechRow {
    const char *id;
    TechClass tech_class;
    double efficiency;
    double learning_rate;
    const char *fuel;
    double carbon;
    double ic;
    double mr;
    bool eligible;
    double gamma_cent;
};

// Investment and maintenance costs, efficiencies and learning rates of the
// thirteen residential heating options; gamma_cent drives the generated history.
const std::vector<TechRow> &tech_rows() {
    static const std::vector<TechRow> rows{
        {"oil", TechClass::FossilOil, 0.75, 0.0, "oil", 0.265, 471.0, 19.0, false, -1.3},
        {"oil_condensing", TechClass::FossilOil, 0.86, 0.10, "oil", 0.265, 512.0, 20.0, false, -1.3},
        {"gas", TechClass::FossilGas, 0.75, 0.0, "gas", 0.202, 391.0, 8.0, false, -1.2},
        {"gas_condensing", TechClass::FossilGas, 0.90, 0.10, "gas", 0.202, 434.0, 9.0, false, -1.6},
        {"biomass_stove", TechClass::TraditionalBiomass, 0.40, 0.0, "biomass", 0.0, 440.0, 0.1, false, -0.7},
        {"biomass_boiler", TechClass::ModernBiomass, 0.85, 0.10, "biomass", 0.0, 523.0, 2.0, true, 1.6},
        {"coal", TechClass::FossilCoal, 0.75, 0.0, "coal", 0.354, 247.0, 5.0, false, 2.5},
        {"district_heat", TechClass::DistrictHeat, 0.98, 0.0, "district_heat", 0.0, 265.0, 16.0, false, -1.1},
        {"direct_electric", TechClass::DirectElectric, 1.0, 0.0, "electricity", 0.0, 538.0, 0.5, true, -3.2},
        {"hp_ground", TechClass::HeatPump, 3.5, 0.30, "electricity", 0.0, 1400.0, 14.0, true, -0.7},
        {"hp_air_water", TechClass::HeatPump, 2.6, 0.30, "electricity", 0.0, 750.0, 15.0, true, -0.7},
        {"hp_air_air", TechClass::HeatPump, 2.6, 0.30, "electricity", 0.0, 510.0, 51.0, true, -0.4},
        {"solar_thermal", TechClass::SolarThermal, 1.0, 0.10, "solar", 0.0, 773.0, 8.0, true, -0.8},
    };
    return rows;
}

struct RegionRow {
    const char *id;
    bool kick_start;
    double heating_cf;
    double solar_cf;
    double stove_efficiency;
    double heat_pump_bonus; // added to air-source heat pump efficiency
    double price_level;     // multiplier on the reference fuel prices
    double population;
    double population_growth;
    double floor_per_capita;
    double floor_growth;
    double hdd;
    double hdd_trend; // fractional change per year
    double intensity;
    double income;
    double income_growth;
    double water_saturation;
    double grid_now;      // kgCO2 per kWh_el at the base year
    double grid_baseline; // baseline intensity at the last year
    std::vector<double> shares; // base-year shares, technology order
};

const std::vector<RegionRow> &region_rows() {
    static const std::vector<RegionRow> rows{
        {"north", false, 0.22, 0.06, 0.5, 0.0, 1.0, 50e6, 0.002, 42.0, 0.004, 3200.0, -0.002, 110.0,
         35000.0, 0.015, 900.0, 0.30, 0.25,
         {0.10, 0.05, 0.25, 0.15, 0.02, 0.06, 0.01, 0.15, 0.06, 0.04, 0.05, 0.02, 0.04}},
        {"south", false, 0.15, 0.10, 0.4, 0.1, 0.9, 60e6, 0.003, 35.0, 0.006, 1400.0, -0.003, 120.0,
         20000.0, 0.02, 700.0, 0.40, 0.35,
         {0.15, 0.03, 0.30, 0.08, 0.04, 0.03, 0.02, 0.0, 0.20, 0.01, 0.03, 0.06, 0.05}},
        {"east", true, 0.25, 0.07, 0.3, -0.1, 0.6, 80e6, -0.002, 25.0, 0.01, 4000.0, -0.002, 160.0,
         8000.0, 0.03, 800.0, 0.60, 0.55,
         {0.05, 0.01, 0.25, 0.04, 0.10, 0.02, 0.20, 0.26, 0.04, 0.005, 0.01, 0.005, 0.01}},
    };
    return rows;
}

struct FuelRow {
    const char *fuel;
    double price; // EUR per kWh_fuel
    double relative_sd;
};

const std::vector<FuelRow> &fuel_rows() {
    static const std::vector<FuelRow> rows{
        {"oil", 0.055, 0.15},         {"gas", 0.05, 0.15},    {"coal", 0.012, 0.15},
        {"biomass", 0.014, 0.30},     {"district_heat", 0.047, 0.15},
        {"electricity", 0.09, 0.15},  {"solar", 0.0, 0.0},
    };
    return rows;
}

YearSeries generate(int first, int last, auto fn) {
    std::vector<double> v;
    for (int y = first; y <= last; ++y) {
        v.push_back(fn(y));
    }
    return {first, std::move(v)};
}

} // namespace

io::Dataset base_dataset() {
    io::Dataset data;
    data.name = "synthetic";
    for (const auto &t : tech_rows()) {
        Technology tech;
        tech.id = t.id;
        tech.tech_class = t.tech_class;
        tech.efficiency = t.efficiency;
        tech.lifetime = 20.0;
        tech.learning_rate = t.learning_rate;
        tech.fuel = t.fuel;
        tech.carbon_content = t.carbon;
        tech.subsidy_eligible = t.eligible;
        data.techs.push_back(tech);
        data.ic.push_back({t.ic, t.ic / 3.0});
        data.mr.push_back({t.mr, t.mr / 3.0});
    }
    data.reference_capacity.assign(data.techs.size(), 0.0);

    const int first = kHistoryFirstYear;
    const int last = kLastYear;
    for (const auto &r : region_rows()) {
        io::RegionData region;
        region.id = r.id;
        region.kick_start_eligible = r.kick_start;
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            const auto &tech = data.techs[k];
            double cf = r.heating_cf;
            double ce = tech.efficiency;
            if (tech.tech_class == TechClass::SolarThermal) {
                cf = r.solar_cf;
            } else if (tech.tech_class == TechClass::TraditionalBiomass) {
                ce = r.stove_efficiency;
            } else if (tech.tech_class == TechClass::HeatPump && tech.id != std::string{"hp_ground"}) {
                ce += r.heat_pump_bonus;
            }
            region.capacity_factor.push_back(cf);
            region.efficiency.push_back(ce);
        }
        for (const auto &f : fuel_rows()) {
            const double p = f.price * r.price_level;
            region.fuel_prices[f.fuel] = {generate(first, last, [&](int) { return p; }),
                                          generate(first, last, [&](int) { return p * f.relative_sd; })};
        }
        for (const double s : r.shares) {
            region.history.push_back(generate(first, kBaseYear, [&](int) { return s; }));
        }

        demand::DemandDrivers d;
        const auto grow = [&](double base, double rate) {
            return generate(first, last, [=](int y) { return base * std::pow(1.0 + rate, y - kBaseYear); });
        };
        d.population = grow(r.population, r.population_growth);
        d.floor_per_capita = grow(r.floor_per_capita, r.floor_growth);
        d.hdd = grow(r.hdd, r.hdd_trend);
        d.heating_intensity = generate(first, last, [&](int) { return r.intensity; });
        d.income_per_capita = grow(r.income, r.income_growth);
        d.new_build_fraction = generate(first, last, [](int y) {
            return y <= 2020 ? 0.0 : 0.012 * static_cast<double>(y - 2020);
        });
        region.drivers = std::move(d);
        region.water = {r.water_saturation, 10000.0};

        region.grid_intensity[scenario::PowerVariant::Decarbonisation15C] =
            generate(first, last, [&](int y) {
                if (y <= kBaseYear) {
                    return r.grid_now;
                }
                return std::max(0.0, r.grid_now * (1.0 - static_cast<double>(y - kBaseYear) / 25.0));
            });
        region.grid_intensity[scenario::PowerVariant::PowerBaseline] =
            generate(first, last, [&](int y) {
                if (y <= kBaseYear) {
                    return r.grid_now;
                }
                const double f = static_cast<double>(y - kBaseYear) / (last - kBaseYear);
                return r.grid_now + f * (r.grid_baseline - r.grid_now);
            });
        data.regions.push_back(std::move(region));
    }
    return data;
}

costs::GammaTable reference_gammas(const io::Dataset &data) {
    costs::GammaTable table;
    const auto &rows = tech_rows();
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        const auto &region = data.regions[r];
        const int h = region.history_last_year();
        std::size_t gauge = 0;
        for (std::size_t k = 1; k < data.techs.size(); ++k) {
            if (region.historical_share(k, h) > region.historical_share(gauge, h)) {
                gauge = k;
            }
        }
        const auto cent = [&](std::size_t k) {
            const auto it = std::find_if(rows.begin(), rows.end(),
                                         [&](const TechRow &t) { return data.techs[k].id == t.id; });
            return it == rows.end() ? 0.0 : it->gamma_cent;
        };
        costs::GammaVector g(data.techs.size());
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            if (region.historical_share(k, h) > 0.0 && k != gauge) {
                g[k] = {(cent(k) - cent(gauge)) / 100.0, costs::GammaProvenance::Manual};
            }
        }
        table[region.id] = std::move(g);
    }
    return table;
}

void generate_history(io::Dataset &data, const costs::GammaTable &gammas,
                      const RunOptions &options, int first_year) {
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        auto &region = data.regions[r];
        const int h = region.history_last_year();
        if (first_year >= h) {
            throw ValidationError("history must start before " + std::to_string(h));
        }
        const auto rates =
            calibration::handover_rates(data, r, gammas.at(region.id).values(), options);
        std::vector<YearSeries> history;
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            const double s = region.historical_share(k, h);
            history.push_back(generate(first_year, h, [&](int y) {
                return std::max(0.0, s + rates[k] * static_cast<double>(y - h));
            }));
        }
        for (int y = first_year; y <= h; ++y) {
            double sum = 0.0;
            for (const auto &s : history) {
                sum += s.at(y);
            }
            for (auto &s : history) {
                s.values[static_cast<std::size_t>(y - first_year)] /= sum;
            }
        }
        region.history = std::move(history);
    }
}

} // namespace heatshift::synthetic
