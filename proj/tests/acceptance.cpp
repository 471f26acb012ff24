#include "heatshift/accounting.hpp"
#include "heatshift/calibration.hpp"
#include "heatshift/choice.hpp"
#include "heatshift/costs.hpp"
#include "heatshift/dynamics.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/service.hpp"
#include "heatshift/simulation.hpp"
#include "heatshift/synthetic.hpp"
#include "support.hpp"

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

// One PASS/FAIL line per acceptance criterion on the shipped synthetic dataset.

using namespace heatshift;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

const io::Dataset &data() { return testing::synthetic(); }

RunResult run(const scenario::ScenarioSpec &spec, const RunOptions &options = {}) {
    return simulate_run(data(), spec, options, *data().gammas);
}

Technology tech(const char *id, TechClass c) {
    Technology t;
    t.id = id;
    t.tech_class = c;
    t.fuel = "x";
    return t;
}

void simplex_invariant(Outcome &o) {
    double worst_sum = 0.0;
    double lowest = 1.0;
    double slowest = 0.0;
    for (char id : scenario::kPresetIds) {
        const auto start = std::chrono::steady_clock::now();
        RunResult r;
        try {
            r = run(scenario::preset_scenario(std::string(1, id)));
        } catch (const std::exception &e) {
            o.require(false, std::string{"preset "} + id + " raised: " + e.what());
            continue;
        }
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        for (const auto &region : r.regions) {
            for (const auto &s : region.shares) {
                worst_sum = std::max(worst_sum, std::abs(std::accumulate(s.begin(), s.end(), 0.0) - 1.0));
                lowest = std::min(lowest, *std::min_element(s.begin(), s.end()));
            }
        }
    }
    o.detail << "presets a-j ran with the per-step simplex assertion; max |sum-1| " << worst_sum
             << ", min share " << lowest << ", slowest run " << slowest << " s";
    o.require(worst_sum <= dynamics::kSimplexTolerance, "share sum");
    o.require(lowest >= 0.0, "negative share");
    o.require(slowest < 10.0, "run time");
}

void choice_kernel(Outcome &o) {
    double worst_integral = 0.0;
    for (int a = 0; a < 10; ++a) {
        for (int b = 0; b < 10; ++b) {
            for (int c = 0; c < 10; ++c) {
                const double delta = -0.05 + 0.1 * a / 9.0;
                const double si = 0.002 + 0.03 * b / 9.0;
                const double sj = 0.002 + 0.03 * c / 9.0;
                const double closed = choice::pairwise_preference({0.1, si}, {0.1 + delta, sj});
                worst_integral = std::max(worst_integral, std::abs(closed - testing::choice_integral(0.1, si, 0.1 + delta, sj)));
            }
        }
    }
    const std::vector<Technology> techs{tech("a", TechClass::FossilGas), tech("b", TechClass::HeatPump),
                                        tech("c", TechClass::SolarThermal)};
    const std::vector<costs::CostDistribution> g{{0.080, 0.014}, {0.087, 0.018}, {0.100, 0.033}};
    const std::vector<char> available{1, 1, 1};
    const auto m = choice::preference_matrix(g, techs, choice::SubstitutionMask::permissive(), available);
    double worst_mc = 0.0;
    std::uint64_t seed = 11;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i != j) {
                const double mc = testing::household_draws(g[i].mean, g[i].sd, g[j].mean, g[j].sd, 1'000'000, seed++);
                worst_mc = std::max(worst_mc, std::abs(m.F(i, j) - mc));
            }
        }
    }
    o.detail << "1000-point grid max error " << worst_integral << ", 1e6 households max error " << worst_mc;
    o.require(worst_integral < 1e-6, "integral grid");
    o.require(worst_mc < 0.003, "household draws");
}

struct Toy {
    std::vector<Technology> techs;
    choice::PreferenceMatrix prefs;
    choice::ScrapMatrix scrap;
    std::vector<double> lifetimes;
    std::vector<double> kappa;

    explicit Toy(std::vector<Technology> t)
        : techs(std::move(t)), prefs{SquareMatrix(techs.size()), std::vector<char>(techs.size() * techs.size(), 1)},
          scrap(choice::no_scrapping(techs.size())), lifetimes(techs.size(), 20.0), kappa(techs.size(), 0.05) {}

    void prefer(std::size_t i, std::size_t j, double f) {
        prefs.F(i, j) = f;
        prefs.F(j, i) = 1.0 - f;
    }
    dynamics::StepInputs inputs() const { return {prefs, scrap, lifetimes, kappa, techs, nullptr, {}}; }
};

dynamics::RegionState state(std::vector<double> s) {
    dynamics::RegionState st;
    st.shares = std::move(s);
    st.water_fraction = 1.0;
    st.ue_total = 1.0;
    st.year = 2015.0;
    return st;
}

void dynamics_oracle(Outcome &o) {
    Toy three({tech("a", TechClass::FossilGas), tech("b", TechClass::HeatPump), tech("c", TechClass::ModernBiomass)});
    three.prefer(1, 0, 0.85);
    three.prefer(2, 0, 0.65);
    three.prefer(1, 2, 0.55);
    three.lifetimes = {15.0, 20.0, 25.0};
    const std::vector<double> initial{0.7, 0.1, 0.2};
    const int years = 40;
    const auto agents = testing::agent_simulation(three.prefs.F, three.lifetimes, initial, 100000, 0.25, years, 2024);
    auto s = state(initial);
    double worst = 0.0;
    for (int y = 1; y <= years; ++y) {
        for (int q = 0; q < 4; ++q) {
            s = dynamics::step_shares(s, three.inputs(), 0.25).state;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            worst = std::max(worst, std::abs(s.shares[k] - agents[static_cast<std::size_t>(y)][k]));
        }
    }

    Toy two({tech("old", TechClass::FossilGas), tech("new", TechClass::HeatPump)});
    two.prefer(1, 0, 0.9);
    const dynamics::SimConfig config;
    const int horizon = config.end_year - config.start_year;
    auto t = state({0.95, 0.05});
    double squared = 0.0;
    for (int y = 1; y <= horizon; ++y) {
        for (int q = 0; q < 4; ++q) {
            t = dynamics::step_shares(t, two.inputs(), config.dt).state;
        }
        const double exact = testing::logistic(0.05, 0.8 / 20.0, y);
        squared += (t.shares[1] - exact) * (t.shares[1] - exact);
    }
    const double rms = std::sqrt(squared / horizon);
    o.detail << "3-tech vs 1e5 agents max gap " << worst << ", 2-tech logistic RMS " << rms << " over " << horizon
             << " years at dt " << config.dt;
    o.require(worst < 0.01, "agent oracle");
    o.require(rms < 1e-3, "logistic oracle");
}

void unit_anchors(Outcome &o) {
    Technology gas = tech("gas", TechClass::FossilGas);
    gas.carbon_content = 0.202;
    gas.efficiency = 0.75;
    costs::CostInputs in;
    in.ic = {391.0, 130.0};
    in.fuel_price = {0.05, 0.0075};
    in.cf = 0.2;
    costs::PolicyAtTime tax;
    tax.carbon_tax = 50.0;
    const double added = costs::apply_policies(in, gas, tax).fuel_price.mean - in.fuel_price.mean;
    const auto t50 = scenario::build_tax_series(50.0);
    const auto t100 = scenario::build_tax_series(100.0);
    const auto sub = scenario::build_subsidy_series(0.5);
    costs::LearningState hp{{1000.0}, {1400.0}, {0.30}};
    const double ic = costs::learning_update(hp, 0, 1000.0);
    o.detail << "gas +" << added << " EUR/kWh at 50 EUR/t; tax 2050 " << t50.at(2050) << " / " << t100.at(2050)
             << "; subsidy " << sub.at(2030) << " -> " << sub.at(2040) << " -> " << sub.at(2050)
             << "; HP-ground after one doubling " << ic << " EUR/kW";
    o.require(std::abs(added - 0.0101) < 1e-15, "tax adder");
    o.require(std::abs(added - 0.01) <= 0.05 * 0.01, "tax adder vs 0.01");
    o.require(t50.at(2050) == 200.0 && t100.at(2050) == 400.0, "tax endpoints");
    o.require(sub.at(2030) == 0.5 && sub.at(2040) == 0.25 && sub.at(2050) == 0.0, "subsidy phase-out");
    o.require(std::abs(ic - 980.0) <= 1e-12 * 980.0, "learning doubling");
}

double fossil_share(const RunResult &r, std::size_t y) {
    double fossil = 0.0;
    double total = 0.0;
    for (const auto &region : r.regions) {
        for (std::size_t k = 0; k < r.tech_ids.size(); ++k) {
            if (is_fossil(data().techs[k].tech_class)) {
                fossil += region.ue[y][k];
            }
        }
        total += region.ue_total[y];
    }
    return fossil / total;
}

/// First year the UE-weighted fossil share is at most 20% of its 2020 level.
int phase_out_year(const RunResult &r) {
    const auto base = static_cast<std::size_t>(2020 - r.years.front());
    const double reference = fossil_share(r, base);
    for (std::size_t y = base; y < r.years.size(); ++y) {
        if (fossil_share(r, y) <= 0.2 * reference) {
            return r.years[y];
        }
    }
    return std::numeric_limits<int>::max();
}

double scrapped_2020_2050(const RunResult &r) {
    double total = 0.0;
    for (const auto &region : r.regions) {
        for (std::size_t y = 0; y < region.years.size(); ++y) {
            if (region.years[y] >= 2020 && region.years[y] <= 2050) {
                total += std::accumulate(region.scrapped_kw[y].begin(), region.scrapped_kw[y].end(), 0.0);
            }
        }
    }
    return total;
}

void scrapping_order(Outcome &o) {
    const auto spec = scenario::preset_scenario("i");
    std::vector<double> scrapped;
    std::vector<int> phase_out;
    for (double b : {1.0, 3.0, 15.0}) {
        RunOptions options;
        options.behaviour.payback_years = {b, b / 3.0};
        const auto r = run(spec, options);
        scrapped.push_back(scrapped_2020_2050(r));
        phase_out.push_back(phase_out_year(r));
    }
    auto year = [](int y) { return y == std::numeric_limits<int>::max() ? std::string{"not by 2050"} : std::to_string(y); };
    o.detail << "scrapped 2020-2050 (GW) b=1 " << scrapped[0] / 1e6 << ", b=3 " << scrapped[1] / 1e6 << ", b=15 "
             << scrapped[2] / 1e6 << "; fossil at 20% of 2020: b=3 " << year(phase_out[1]) << ", b=15 "
             << year(phase_out[2]);
    o.require(scrapped[0] < scrapped[1] && scrapped[1] < scrapped[2], "scrap ordering");
    o.require(phase_out[2] < phase_out[1], "phase-out ordering");
}

void sensitivity_directions(Outcome &o) {
    int checked = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (char id : scenario::kPresetIds) {
        const auto spec = scenario::preset_scenario(std::string(1, id));
        const double base = accounting::cumulative_emissions(run(spec), 2015, 2050).heating_gt;
        RunOptions discount;
        discount.adjustments.discount_rate_factor = 1.5;
        RunOptions intangibles;
        intangibles.adjustments.gamma_factor = 0.5;
        for (const auto &options : {discount, intangibles}) {
            const double gt = accounting::cumulative_emissions(run(spec, options), 2015, 2050).heating_gt;
            const double pct = 100.0 * (gt - base) / base;
            smallest = std::min(smallest, pct);
            o.require(gt >= base, std::string{"preset "} + id);
            ++checked;
        }
    }
    o.detail << checked << " perturbed runs over presets a-j; smallest deviation " << smallest << "%";
}

void calibration_recovery(Outcome &o) {
    auto d = synthetic::base_dataset();
    const auto truth = synthetic::reference_gammas(d);
    const RunOptions options;
    synthetic::generate_history(d, truth, options);
    double worst_gamma = 0.0;
    double worst_residual = 0.0;
    bool converged = true;
    for (std::size_t r = 0; r < d.regions.size(); ++r) {
        const auto result = calibration::auto_calibrate(d, r, options);
        converged = converged && result.diagnostics.converged;
        const auto &expected = truth.at(d.regions[r].id);
        const double shift = result.gamma[result.gauge_tech].value - expected[result.gauge_tech].value;
        for (std::size_t k = 0; k < d.techs.size(); ++k) {
            if (result.active[k]) {
                worst_gamma = std::max(worst_gamma, std::abs(result.gamma[k].value - expected[k].value - shift));
                worst_residual = std::max(worst_residual, std::abs(result.diagnostics.residuals[k]));
            }
        }
    }
    o.detail << "max gamma error " << worst_gamma * 100.0 << " ct/kWh, max handover residual " << worst_residual << "/yr";
    o.require(converged, "convergence");
    o.require(worst_gamma * 100.0 < 0.1, "gamma recovery");
    o.require(worst_residual <= 1e-4, "residuals");
}

void determinism_parity(Outcome &o) {
    const auto dir = testing::temp_dir("acceptance_parity");
    const std::string command = std::string{HEATSHIFT_CLI} + " simulate --data " + testing::data_dir().string() +
                                " --scenario h --out " + dir.string() + " > /dev/null 2>&1";
    const int rc = std::system(command.c_str());
    o.require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "CLI simulate");
    const auto cli = testing::read_file(dir / "result.json");

    service::Service svc{{{"synthetic", std::make_shared<const io::Dataset>(data())}}};
    const auto session = nlohmann::json::parse(svc.create_session(R"({"dataset":"synthetic"})").body).at("session").get<std::string>();
    const auto started = nlohmann::json::parse(svc.start_run(session, R"({"scenario":"h"})").body).at("run").get<std::string>();
    svc.wait(started);
    const auto served = svc.run_results(started, "").body;

    RunOptions one;
    one.sim.threads = 1;
    RunOptions three;
    three.sim.threads = 3;
    const auto spec = scenario::preset_scenario("h");
    const bool threads_equal = serialize(run(spec, one)) == serialize(run(spec, three));
    o.detail << "CLI " << cli.size() << " bytes, service " << served.size() << " bytes, identical "
             << (cli == served ? "yes" : "no") << "; 1 vs 3 threads identical " << (threads_equal ? "yes" : "no");
    o.require(!cli.empty() && cli == served, "CLI/service parity");
    o.require(threads_equal, "thread independence");
}

double direct_in(const RunResult &r, int year) {
    double kg = 0.0;
    for (const auto &region : r.regions) {
        kg += region.direct_kg[static_cast<std::size_t>(year - region.years.front())];
    }
    return kg;
}

void scenario_j(Outcome &o) {
    const auto j = run(scenario::preset_scenario("j"));
    const auto h = run(scenario::preset_scenario("h"));
    const double ratio = direct_in(j, 2050) / direct_in(j, 2015);
    const auto jt = accounting::cumulative_emissions(j, 2020, 2050);
    const auto ht = accounting::cumulative_emissions(h, 2020, 2050);
    o.detail << "j direct 2050 at " << ratio * 100.0 << "% of 2015; PowerBaseline indirect 2020-2050 j "
             << jt.elec_baseline_gt << " Gt vs h " << ht.elec_baseline_gt << " Gt";
    o.require(ratio <= 0.10, "direct emissions approaching zero");
    o.require(jt.elec_baseline_gt > ht.elec_baseline_gt, "indirect above h");
}

} // namespace

int main() {
    spdlog::set_level(spdlog::level::warn);
    const std::vector<std::pair<std::string, std::function<void(Outcome &)>>> criteria{
        {"simplex invariant", simplex_invariant},
        {"choice-kernel fidelity", choice_kernel},
        {"dynamics oracle", dynamics_oracle},
        {"unit anchors", unit_anchors},
        {"payback-threshold scrapping order", scrapping_order},
        {"sensitivity directions", sensitivity_directions},
        {"calibration self-consistency", calibration_recovery},
        {"determinism and parity", determinism_parity},
        {"full electrification mechanism", scenario_j},
    };
    int failures = 0;
    for (const auto &[name, check] : criteria) {
        Outcome o;
        try {
            check(o);
        } catch (const std::exception &e) {
            o.require(false, std::string{"exception: "} + e.what());
        }
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
