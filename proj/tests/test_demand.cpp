#include "heatshift/demand.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/simulation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace heatshift;
using namespace heatshift::demand;

namespace {

YearSeries flat(double v, int first = 2015, int last = 2050) {
    return {first, std::vector<double>(static_cast<std::size_t>(last - first + 1), v)};
}

DemandDrivers drivers(double pop = 1e6, double floor = 30.0, double hdd = 3000.0,
                      double intensity = 100.0) {
    DemandDrivers d;
    d.population = flat(pop);
    d.floor_per_capita = flat(floor);
    d.hdd = flat(hdd);
    d.heating_intensity = flat(intensity);
    d.income_per_capita = flat(20000.0);
    d.new_build_fraction = flat(0.0);
    return d;
}

} // namespace

TEST_SUITE("demand") {

TEST_CASE("space heat: four-factor product in kWh") {
    // 1e6 * 30 * 3000 * 100 kJ = 9e12 kJ = 2.5e9 kWh
    CHECK(space_heat_demand(drivers(), 2020) == doctest::Approx(2.5e9).epsilon(1e-15));
}

TEST_CASE("space heat: linear in each driver and vanishing in the limit") {
    const double base = space_heat_demand(drivers(), 2020);
    CHECK(space_heat_demand(drivers(2e6), 2020) == 2.0 * base);
    CHECK(space_heat_demand(drivers(1e6, 60.0), 2020) == doctest::Approx(2.0 * base).epsilon(1e-15));
    CHECK(space_heat_demand(drivers(1e-12), 2020) < 1e-6);
}

TEST_CASE("space heat: off-grid year and non-positive drivers") {
    CHECK_THROWS_AS(space_heat_demand(drivers(), 2051), GridError);
    auto d = drivers();
    d.hdd.values[5] = 0.0;
    CHECK_THROWS_AS(space_heat_demand(d, 2020), ValidationError);
    CHECK_THROWS_AS(validate(d), ValidationError);
}

TEST_CASE("drivers must share one year grid") {
    auto d = drivers();
    d.hdd = flat(3000.0, 2016, 2050);
    CHECK_THROWS_AS(validate(d), ValidationError);
}

TEST_CASE("water heat: saturation curve") {
    const WaterDemandParams p{800.0, 10000.0};
    CHECK(water_heat_demand(p, 0.0, 1e6) == 0.0);
    CHECK(water_heat_demand(p, 10000.0, 1.0) == 400.0);
    CHECK(water_heat_demand(p, std::numeric_limits<double>::infinity(), 2e6) == 800.0 * 2e6);
    CHECK(water_heat_demand(p, 1e12, 1.0) == doctest::Approx(800.0));
    CHECK_THROWS_AS(water_heat_demand(p, -1.0, 1.0), ValidationError);
}

TEST_CASE("intensity paths") {
    const auto base = intensity_path(DemandVariant::baseline(), 150.0, 2015, 2100);
    CHECK(base.at(2100) == doctest::Approx(90.0));
    CHECK(base.at(2015) == 150.0);

    const auto low = intensity_path(DemandVariant::baseline(), 80.0, 2015, 2100);
    for (const double v : low.values) {
        CHECK(v == 80.0);
    }

    const auto retro = intensity_path(DemandVariant::retrofit(), 150.0, 2016, 2050);
    CHECK(retro.at(2033) == doctest::Approx(0.5 * (150.0 + 45.0)).epsilon(1e-14));
    CHECK(retro.at(2050) == doctest::Approx(45.0));

    CHECK_THROWS_AS(intensity_path(DemandVariant::baseline(), 150.0, 2050, 2050), ValidationError);
}

TEST_CASE("variant invariants") {
    CHECK(DemandVariant::baseline().target_intensity == 90.0);
    CHECK(DemandVariant::baseline().target_year == 2100);
    CHECK(DemandVariant::retrofit().target_intensity == 45.0);
    CHECK(DemandVariant::retrofit().target_year == 2050);
    auto bad = DemandVariant::retrofit();
    bad.target_intensity = 60.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    CHECK(parse_variant_kind(to_string(VariantKind::Insulation19)) == VariantKind::Insulation19);
    CHECK_THROWS_AS(parse_variant_kind("Passivhaus"), ValidationError);
}

TEST_CASE("trajectory without water demand equals the space series") {
    const auto d = drivers();
    const auto t = demand_trajectory(d, {0.0, 1.0}, DemandVariant::baseline(), 2015);
    for (int y = 2015; y <= 2050; ++y) {
        CHECK(t.water_fraction.at(y) == 0.0);
    }
    CHECK(t.ue_total.at(2015) == space_heat_demand(d, 2015));
}

TEST_CASE("ingested trajectories pass through verbatim") {
    auto data = testing::synthetic();
    demand::DemandTrajectory ingested{{2015, std::vector<double>(36, 1.5e11)},
                                      {2015, std::vector<double>(36, 0.25)}};
    data.regions[0].trajectory = ingested;
    data.regions[0].drivers.reset();
    const auto t = region_demand(data, 0, DemandVariant::retrofit(), 2015);
    CHECK(t.ue_total == ingested.ue_total);
    CHECK(t.water_fraction == ingested.water_fraction);
}

TEST_CASE("synthetic baseline demand: audited region-year and pinned series") {
    const auto &data = testing::synthetic();
    const auto &north = data.regions[data.region_index("north")];
    const auto &d = *north.drivers;
    const double space = d.population.at(2015) * d.floor_per_capita.at(2015) * d.hdd.at(2015) *
                         d.heating_intensity.at(2015) / 3600.0;
    const double income = d.income_per_capita.at(2015);
    const double water = north.water.saturation_level * income /
                         (income + north.water.half_saturation_income) * d.population.at(2015);
    const auto t = region_demand(data, data.region_index("north"), DemandVariant::baseline(), 2015);
    CHECK(t.ue_total.at(2015) == doctest::Approx(space + water).epsilon(1e-12));
    CHECK(t.water_fraction.at(2015) == doctest::Approx(water / (space + water)).epsilon(1e-12));

    struct Golden {
        const char *region;
        int year;
        double ue;
    };
    const Golden golden[] = {
#include "golden_demand.inc"
    };
    for (const auto &g : golden) {
        const auto s = region_demand(data, data.region_index(g.region), DemandVariant::baseline(), 2015);
        INFO(g.region << " " << g.year);
        CHECK(s.ue_total.at(g.year) == doctest::Approx(g.ue).epsilon(1e-12));
    }
}

TEST_CASE("variants are ordered: retrofit <= insulation <= baseline") {
    const auto &data = testing::synthetic();
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        const auto b = region_demand(data, r, DemandVariant::baseline(), 2015);
        const auto i = region_demand(data, r, DemandVariant::insulation(), 2015);
        const auto x = region_demand(data, r, DemandVariant::retrofit(), 2015);
        for (int y = 2015; y <= 2050; ++y) {
            CHECK(x.ue_total.at(y) <= i.ue_total.at(y));
            CHECK(i.ue_total.at(y) <= b.ue_total.at(y));
            CHECK(b.water_fraction.at(y) >= 0.0);
            CHECK(b.water_fraction.at(y) <= 1.0);
        }
    }
}

}
