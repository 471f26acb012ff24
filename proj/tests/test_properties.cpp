#include "heatshift/accounting.hpp"
#include "heatshift/choice.hpp"
#include "heatshift/costs.hpp"
#include "heatshift/demand.hpp"
#include "heatshift/dynamics.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/simulation.hpp"
#include "support.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <random>

using namespace heatshift;

namespace {

constexpr int kCases = 200;

/// Seeded source of random model inputs.
struct Gen {
    std::mt19937_64 rng;
    explicit Gen(std::uint64_t seed) : rng{seed} {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin() { return integer(0, 1) == 1; }

    std::vector<double> simplex(std::size_t n, double zero_chance = 0.0) {
        std::vector<double> v(n);
        for (auto &x : v) {
            x = uniform(0.0, 1.0) < zero_chance ? 0.0 : uniform(0.01, 1.0);
        }
        if (std::accumulate(v.begin(), v.end(), 0.0) == 0.0) {
            v[0] = 1.0;
        }
        const double total = std::accumulate(v.begin(), v.end(), 0.0);
        for (auto &x : v) {
            x /= total;
        }
        return v;
    }

    TechClass tech_class() { return kAllTechClasses[static_cast<std::size_t>(integer(0, kTechClassCount - 1))]; }

    Technology technology() {
        Technology t;
        t.id = "t";
        t.tech_class = tech_class();
        t.efficiency = uniform(0.3, 4.0);
        t.lifetime = integer(5, 30);
        t.fuel = "fuel";
        t.carbon_content = uniform(0.0, 0.4);
        t.subsidy_eligible = coin();
        return t;
    }

    costs::CostInputs cost_inputs() {
        costs::CostInputs c;
        c.ic = {uniform(0.0, 2000.0), uniform(0.0, 500.0)};
        c.mr = {uniform(0.0, 60.0), uniform(0.0, 20.0)};
        c.fuel_price = {uniform(0.0, 0.2), uniform(0.0, 0.05)};
        c.cf = uniform(0.05, 1.0);
        return c;
    }

    YearSeries series(int first, int last, double lo, double hi) {
        YearSeries s{first, {}};
        for (int y = first; y <= last; ++y) {
            s.values.push_back(uniform(lo, hi));
        }
        return s;
    }

    demand::DemandDrivers drivers() {
        demand::DemandDrivers d;
        d.population = series(2010, 2050, 1e6, 1e8);
        d.floor_per_capita = series(2010, 2050, 10.0, 60.0);
        d.hdd = series(2010, 2050, 0.0, 5000.0);
        d.heating_intensity = series(2010, 2050, 60.0, 200.0);
        d.income_per_capita = series(2010, 2050, 1000.0, 50000.0);
        d.new_build_fraction = series(2010, 2050, 0.0, 0.5);
        return d;
    }
};

/// Random n-technology replacement instance with consistent step inputs.
struct Instance {
    std::vector<Technology> techs;
    choice::PreferenceMatrix prefs;
    choice::ScrapMatrix scrap;
    std::vector<double> lifetimes;
    std::vector<double> kappa;

    Instance(Gen &g, std::size_t n, bool scrapping)
        : prefs{SquareMatrix(n), std::vector<char>(n * n, 1)}, scrap(choice::no_scrapping(n)) {
        for (std::size_t k = 0; k < n; ++k) {
            techs.push_back(g.technology());
            lifetimes.push_back(g.uniform(5.0, 30.0));
            kappa.push_back(1.0 / lifetimes.back());
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double f = g.uniform(0.0, 1.0);
                prefs.F(i, j) = f;
                prefs.F(j, i) = 1.0 - f;
                if (g.uniform(0.0, 1.0) < 0.2) {
                    prefs.mask[i * n + j] = 0;
                    prefs.F(i, j) = 0.0;
                }
            }
        }
        if (scrapping) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i != j && g.coin()) {
                        scrap.G(i, j) = g.uniform(0.0, 1.0);
                        scrap.mask[i * n + j] = 1;
                    }
                }
            }
        }
    }

    dynamics::StepInputs inputs(const dynamics::KickStartOrder *kick = nullptr) const {
        return {prefs, scrap, lifetimes, kappa, techs, kick, {}};
    }
};

} // namespace

TEST_SUITE("properties") {

TEST_CASE("demand: positivity, variant ordering and driver linearity") {
    Gen g{101};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const auto drivers = g.drivers();
        demand::WaterDemandParams water{g.uniform(100.0, 1500.0), g.uniform(1000.0, 20000.0)};
        const int base = 2015;
        const auto baseline = demand::demand_trajectory(drivers, water, demand::DemandVariant::baseline(), base);
        const auto insulation = demand::demand_trajectory(drivers, water, demand::DemandVariant::insulation(), base);
        const auto retrofit = demand::demand_trajectory(drivers, water, demand::DemandVariant::retrofit(), base);
        for (int y : baseline.ue_total.years()) {
            CHECK(baseline.ue_total.at(y) > 0.0);
            CHECK(baseline.water_fraction.at(y) >= 0.0);
            CHECK(baseline.water_fraction.at(y) <= 1.0);
            CHECK(retrofit.ue_total.at(y) <= insulation.ue_total.at(y) * (1.0 + 1e-12));
            CHECK(insulation.ue_total.at(y) <= baseline.ue_total.at(y) * (1.0 + 1e-12));
        }

        const double k = g.uniform(0.1, 10.0);
        const int which = g.integer(0, 3);
        auto scaled = drivers;
        YearSeries *series[] = {&scaled.population, &scaled.floor_per_capita, &scaled.hdd, &scaled.heating_intensity};
        for (auto &v : series[which]->values) {
            v *= k;
        }
        for (int y = 2010; y <= 2050; y += 7) {
            const double a = demand::space_heat_demand(drivers, y);
            CHECK(demand::space_heat_demand(scaled, y) == doctest::Approx(k * a).epsilon(1e-12));
        }
    }
}

TEST_CASE("costs: monotonicity, discounting and additivity") {
    Gen g{202};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const auto t = g.technology();
        const auto in = g.cost_inputs();
        const double r = g.uniform(0.0, 0.3);
        const double base = costs::levelised_cost(t, in, r);

        auto more = in;
        more.ic.mean += g.uniform(0.0, 500.0);
        CHECK(costs::levelised_cost(t, more, r) >= base);
        more = in;
        more.mr.mean += g.uniform(0.0, 50.0);
        CHECK(costs::levelised_cost(t, more, r) >= base);
        more = in;
        more.fuel_price.mean += g.uniform(1e-3, 0.1);
        CHECK(costs::levelised_cost(t, more, r) > base);

        const double r2 = r + g.uniform(0.01, 0.1);
        if (in.ic.mean > 0.0) {
            CHECK(costs::levelised_cost(t, in, r2) > base);
        }
        auto fuel_only = in;
        fuel_only.ic.mean = 0.0;
        fuel_only.mr.mean = 0.0;
        CHECK(costs::levelised_cost(t, fuel_only, r2) == doctest::Approx(costs::levelised_cost(t, fuel_only, r)).epsilon(1e-14));

        costs::PolicyAtTime first;
        first.carbon_tax = g.uniform(0.0, 300.0);
        costs::PolicyAtTime second;
        second.carbon_tax = g.uniform(0.0, 300.0);
        costs::PolicyAtTime both;
        both.carbon_tax = first.carbon_tax + second.carbon_tax;
        const auto twice = costs::apply_policies(costs::apply_policies(in, t, first), t, second);
        const auto once = costs::apply_policies(in, t, both);
        CHECK(twice.fuel_price.mean == doctest::Approx(once.fuel_price.mean).epsilon(1e-14));

        double squares = 0.0;
        for (int part = 0; part < 3; ++part) {
            auto only = in;
            if (part != 0) only.ic.sd = 0.0;
            if (part != 1) only.mr.sd = 0.0;
            if (part != 2) only.fuel_price.sd = 0.0;
            const double s = costs::cost_spread(t, only, r);
            squares += s * s;
        }
        CHECK(costs::cost_spread(t, in, r) == doctest::Approx(std::sqrt(squares)).epsilon(1e-12));
    }
}

TEST_CASE("costs: learning is path independent") {
    Gen g{303};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const double w0 = g.uniform(1.0, 1e6);
        const double ic0 = g.uniform(100.0, 2000.0);
        const double lr = g.uniform(0.0, 0.3);
        costs::LearningState one{{w0}, {ic0}, {lr}};
        costs::LearningState many{{w0}, {ic0}, {lr}};
        double total = 0.0;
        const int pieces = g.integer(1, 20);
        for (int p = 0; p < pieces; ++p) {
            const double add = g.uniform(0.0, 5.0 * w0);
            total += add;
            costs::learning_update(many, 0, add);
        }
        costs::learning_update(one, 0, total);
        CHECK(many.investment_cost(0) == doctest::Approx(one.investment_cost(0)).epsilon(1e-12));
        CHECK(one.investment_cost(0) >= 0.1 * ic0 * (1.0 - 1e-12));
        CHECK(one.investment_cost(0) <= ic0);
    }
}

TEST_CASE("choice: antisymmetry, monotonicity, shift invariance, dilution") {
    Gen g{404};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const costs::CostDistribution i{g.uniform(0.0, 0.3), g.uniform(0.001, 0.05)};
        const costs::CostDistribution j{g.uniform(0.0, 0.3), g.uniform(0.001, 0.05)};
        const double fij = choice::pairwise_preference(i, j);
        const double fji = choice::pairwise_preference(j, i);
        CHECK(fij + fji == doctest::Approx(1.0).epsilon(1e-15));

        const costs::CostDistribution dearer{i.mean + g.uniform(0.0, 0.1), i.sd};
        CHECK(choice::pairwise_preference(dearer, j) <= fij);

        const double shift = g.uniform(-0.2, 0.2);
        const double shifted = choice::pairwise_preference({i.mean + shift, i.sd}, {j.mean + shift, j.sd});
        CHECK(std::abs(shifted - fij) < 1e-12);

        const double widen = g.uniform(1.5, 10.0);
        const double wide = choice::pairwise_preference({i.mean, i.sd * widen}, {j.mean, j.sd * widen});
        CHECK(std::abs(wide - 0.5) <= std::abs(fij - 0.5) + 1e-15);
    }
}

TEST_CASE("choice: preference matrices are antisymmetric on unmasked pairs") {
    Gen g{505};
    const auto mask = choice::SubstitutionMask::comfort_default();
    for (int c = 0; c < 50; ++c) {
        INFO("case " << c);
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 8));
        std::vector<Technology> techs;
        std::vector<costs::CostDistribution> gcoh;
        std::vector<char> available;
        for (std::size_t k = 0; k < n; ++k) {
            techs.push_back(g.technology());
            gcoh.push_back({g.uniform(0.0, 0.3), g.uniform(0.001, 0.05)});
            available.push_back(g.uniform(0.0, 1.0) < 0.85);
        }
        const auto P = choice::preference_matrix(gcoh, techs, mask, available);
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                if (a == b || !P.permitted(a, b)) {
                    continue;
                }
                CHECK(available[a]);
                CHECK(available[b]);
                CHECK(mask.allowed(techs[b].tech_class, techs[a].tech_class));
                CHECK(P.F(a, b) == doctest::Approx(1.0 - choice::pairwise_preference(gcoh[b], gcoh[a])).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("dynamics: simplex, conservation, absorption and growth") {
    Gen g{606};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 9));
        const Instance x{g, n, g.coin()};
        dynamics::RegionState s;
        s.shares = g.simplex(n, 0.3);
        s.water_fraction = 1.0;
        s.year = 2015.0;
        std::vector<char> absent(n);
        for (std::size_t k = 0; k < n; ++k) {
            absent[k] = s.shares[k] == 0.0;
        }
        const double dt = std::vector<double>{1.0, 0.5, 0.25, 0.0625}[static_cast<std::size_t>(g.integer(0, 3))];
        for (int step = 0; step < 40; ++step) {
            const auto r = dynamics::step_shares(s, x.inputs(), dt);
            CHECK_NOTHROW(dynamics::check_simplex(r.state.shares));
            const auto net = r.flows.net_regular();
            CHECK(std::abs(std::accumulate(net.begin(), net.end(), 0.0)) < 1e-12);
            for (double v : r.flows.regular.data()) {
                CHECK(v >= 0.0);
            }
            for (double v : r.flows.scrap.data()) {
                CHECK(v >= 0.0);
            }
            s = r.state;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (absent[k]) {
                CHECK(s.shares[k] == 0.0);
            }
        }

        const double si = g.uniform(0.001, 0.2);
        const double sj = g.uniform(0.1, 0.5);
        const double f = g.uniform(0.0, 1.0);
        const double tau = g.uniform(5.0, 30.0);
        CHECK(dynamics::share_flow(2.0 * si, sj, f, tau, dt) == doctest::Approx(2.0 * dynamics::share_flow(si, sj, f, tau, dt)).epsilon(1e-15));
    }
}

TEST_CASE("dynamics: kick-start conserves share and only feeds eligible classes") {
    Gen g{707};
    const dynamics::KickStartOrder order;
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 9));
        std::vector<Technology> techs;
        for (std::size_t k = 0; k < n; ++k) {
            techs.push_back(g.technology());
        }
        const auto shares = g.simplex(n, 0.3);
        const auto d = dynamics::kick_start(shares, techs, order, 0.25, {});
        CHECK(std::abs(std::accumulate(d.begin(), d.end(), 0.0)) < 1e-15);
        for (std::size_t k = 0; k < n; ++k) {
            if (d[k] > 0.0) {
                CHECK(std::find(order.classes.begin(), order.classes.end(), techs[k].tech_class) != order.classes.end());
            }
            if (d[k] < 0.0) {
                CHECK(is_fossil(techs[k].tech_class));
                CHECK(d[k] == doctest::Approx(-0.0025).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("dynamics: the solar cap keeps shares on the simplex") {
    Gen g{808};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        const std::size_t n = static_cast<std::size_t>(g.integer(2, 9));
        std::vector<Technology> techs;
        for (std::size_t k = 0; k < n; ++k) {
            techs.push_back(g.technology());
        }
        techs[0].tech_class = TechClass::SolarThermal;
        auto shares = g.simplex(n);
        const double water = g.uniform(0.0, 1.0);
        dynamics::enforce_constraints(shares, techs, water, {true});
        double solar = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (techs[k].tech_class == TechClass::SolarThermal) {
                solar += shares[k];
            }
        }
        const bool all_solar = std::all_of(techs.begin(), techs.end(), [](const Technology &t) {
            return t.tech_class == TechClass::SolarThermal;
        });
        if (!all_solar) {
            CHECK(solar <= water + 1e-12);
        }
        CHECK(std::abs(std::accumulate(shares.begin(), shares.end(), 0.0) - 1.0) < 1e-12);
    }
}

TEST_CASE("accounting: swapping fossil for zero-carbon never raises direct emissions") {
    Gen g{909};
    const std::map<std::string, double> carbon{{"oil", 0.265}, {"gas", 0.202}, {"coal", 0.354}, {"electricity", 0.0}, {"biomass", 0.0}};
    const std::vector<std::string> fossil{"oil", "gas", "coal"};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        std::map<std::string, double> use;
        for (const auto &[fuel, factor] : carbon) {
            use[fuel] = g.uniform(0.0, 1e9);
        }
        const auto &from = fossil[static_cast<std::size_t>(g.integer(0, 2))];
        const double moved = g.uniform(0.0, 1.0) * use[from];
        auto swapped = use;
        swapped[from] -= moved;
        swapped[g.coin() ? "electricity" : "biomass"] += moved * g.uniform(0.2, 1.5);
        CHECK(accounting::direct_emissions(swapped, carbon) <= accounting::direct_emissions(use, carbon));
    }
}

TEST_CASE("scenario: random schedules survive a JSON round trip and taxes stay linear") {
    Gen g{1010};
    for (int c = 0; c < kCases; ++c) {
        INFO("case " << c);
        scenario::ScenarioSpec spec;
        spec.id = "random-" + std::to_string(c);
        spec.demand_variant = g.coin() ? demand::DemandVariant::insulation(g.uniform(0.0, 0.9)) : demand::DemandVariant::retrofit();
        const double start = g.uniform(0.0, 500.0);
        spec.schedule.carbon_tax = scenario::build_tax_series(start);
        spec.schedule.subsidies.push_back({{g.tech_class()}, {}, scenario::build_subsidy_series(g.uniform(0.0, 1.0))});
        if (g.coin()) {
            spec.schedule.regional_tax["east"] = g.series(2020, 2030, 0.0, 300.0);
        }
        if (g.coin()) {
            spec.schedule.kick_start.push_back({"east", g.integer(2015, 2040), g.integer(5, 10), {TechClass::HeatPump}});
        }
        spec.power_variant = g.coin() ? scenario::PowerVariant::PowerBaseline : scenario::PowerVariant::Decarbonisation15C;
        const auto text = scenario::to_json(spec).dump();
        CHECK(scenario::scenario_from_json(nlohmann::json::parse(text)) == spec);
        CHECK(spec.schedule.carbon_tax.at(2035) - spec.schedule.carbon_tax.at(2020) ==
              doctest::Approx(1.5 * start).epsilon(1e-15));
    }
}

TEST_CASE("validation agrees with simulation about the horizon") {
    Gen g{1111};
    const auto &data = testing::synthetic();
    const auto spec = scenario::preset_scenario("a");
    for (int c = 0; c < 12; ++c) {
        const int from = g.integer(2005, 2030);
        const int to = from + g.integer(1, 45);
        INFO("horizon " << from << "-" << to);
        bool validate_ok = true;
        try {
            check_horizon(data, from, to);
        } catch (const ValidationError &) {
            validate_ok = false;
        }
        RunOptions options;
        options.sim.start_year = from;
        options.sim.end_year = to;
        bool simulate_ok = true;
        try {
            simulate_run(data, spec, options, *data.gammas);
        } catch (const ValidationError &) {
            simulate_ok = false;
        }
        CHECK(validate_ok == simulate_ok);
    }
}

}
