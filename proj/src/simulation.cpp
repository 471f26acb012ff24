#include "heatshift/simulation.hpp"

#include "heatshift/accounting.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/units.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

namespace heatshift {
namespace {

using nlohmann::json;

struct RegionRun {
    std::size_t index = 0;
    demand::DemandTrajectory demand;
    dynamics::RegionState state;
    dynamics::RegionConstraints constraints;
    costs::GammaVector gamma;
    std::vector<double> hours; // full-load hours per technology
    RegionResult result;
    std::vector<double> step_built; // last step, for the learning reduction
    int halvings = 0;
};

struct StepContext {
    const io::Dataset &data;
    const scenario::ScenarioSpec &spec;
    const RunOptions &options;
    const std::vector<double> &ic_mean;
    const std::vector<double> &scrap_kappa;
    const std::vector<double> &lifetimes;
    const std::map<std::string, double> &carbon;
    const std::vector<std::string> &fuels;
};

std::size_t fuel_index(const std::vector<std::string> &fuels, const std::string &fuel) {
    return static_cast<std::size_t>(std::find(fuels.begin(), fuels.end(), fuel) - fuels.begin());
}

double demand_at(const demand::DemandTrajectory &d, int year, int fallback) {
    return d.ue_total.covers(year) ? d.ue_total.at(year) : d.ue_total.at(fallback);
}

void allocate_year(RegionResult &r, std::size_t n_tech, std::size_t n_fuel) {
    r.ue.emplace_back(n_tech, 0.0);
    r.final_energy.emplace_back(n_fuel, 0.0);
    r.built_kw.emplace_back(n_tech, 0.0);
    r.scrapped_kw.emplace_back(n_tech, 0.0);
    r.direct_kg.push_back(0.0);
    r.indirect_decarb_kg.push_back(0.0);
    r.indirect_baseline_kg.push_back(0.0);
    r.invest_eur.push_back(0.0);
    r.energy_eur.push_back(0.0);
    r.tax_eur.push_back(0.0);
    r.subsidy_eur.push_back(0.0);
}

void record_stock(RegionRun &run, int year, std::size_t n_fuel) {
    auto &r = run.result;
    const std::size_t n = run.state.shares.size();
    const double ue = run.demand.ue_total.at(year);
    r.years.push_back(year);
    r.shares.push_back(run.state.shares);
    r.ue_total.push_back(ue);
    r.water_fraction.push_back(run.demand.water_fraction.at(year));
    std::vector<double> cap(n);
    for (std::size_t k = 0; k < n; ++k) {
        cap[k] = run.state.shares[k] * ue / run.hours[k];
    }
    r.capacity_kw.push_back(std::move(cap));
    allocate_year(r, n, n_fuel);
}

void step_region(RegionRun &run, const StepContext &ctx, int year, double dt) {
    const auto &data = ctx.data;
    const auto &region = data.regions[run.index];
    const std::size_t n = data.techs.size();
    const auto &opts = ctx.options;

    const double ue = run.demand.ue_total.at(year);
    run.state.ue_total = ue;
    run.state.water_fraction = run.demand.water_fraction.at(year);

    const auto policy = ctx.spec.schedule.at(region.id, year);
    const auto gamma = run.gamma.values();
    const auto costs = region_costs(data, run.index, year, ctx.ic_mean, policy, gamma, opts);

    const auto *entry = ctx.spec.schedule.kick_start_for(region.id, year);
    dynamics::KickStartOrder order;
    if (entry != nullptr) {
        order.classes = entry->classes;
    }
    const auto *kick = entry != nullptr ? &order : nullptr;

    std::vector<Technology> techs;
    techs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        techs.push_back(data.regional_tech(run.index, k));
    }
    const auto available = availability(data, run.index, run.state.shares, kick);
    const auto F = choice::preference_matrix(costs.gcoh, techs, data.mask, available);
    const auto G = opts.sim.scrapping_enabled
                       ? choice::scrap_matrix(costs.running, costs.payback, techs, data.mask,
                                              available)
                       : choice::no_scrapping(n);

    dynamics::StepInputs inputs{F, G, ctx.lifetimes, ctx.scrap_kappa, techs, kick,
                                run.constraints};
    auto step = dynamics::step_shares(run.state, inputs, dt);
    dynamics::check_simplex(step.state.shares);
    run.halvings += step.flows.halvings;

    const std::size_t y = run.result.years.size() - 1;
    auto &r = run.result;
    const double next_ue = demand_at(run.demand, static_cast<int>(std::floor(step.state.year + 1e-9)),
                                     year);
    run.step_built.assign(n, 0.0);
    double electricity = 0.0;
    double electricity_price = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double s0 = run.state.shares[k];
        const double s1 = step.state.shares[k];
        const double cap0 = s0 * ue / run.hours[k];
        const double cap1 = s1 * next_ue / run.hours[k];
        const double built = std::max(0.0, cap1 - cap0) + cap0 * dt / ctx.lifetimes[k];
        double scrapped_share = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            scrapped_share += step.flows.scrap(k, j);
        }
        const double scrapped = scrapped_share * ue / run.hours[k];
        run.step_built[k] = built;
        r.built_kw[y][k] += built;
        r.scrapped_kw[y][k] += scrapped;

        const double useful = s0 * ue * dt;
        const double fuel_kwh = useful / techs[k].efficiency;
        r.ue[y][k] += useful;
        r.final_energy[y][fuel_index(ctx.fuels, techs[k].fuel)] += fuel_kwh;

        const double ic_full = ctx.ic_mean[k];
        const double rate = techs[k].subsidy_eligible ? policy.subsidy_for(techs[k].tech_class) : 0.0;
        r.invest_eur[y] += built * ic_full;
        r.subsidy_eur[y] += built * ic_full * rate;

        const auto price = fuel_price(data, run.index, techs[k].fuel, year, opts.adjustments);
        r.energy_eur[y] += fuel_kwh * price.mean;
        r.tax_eur[y] += fuel_kwh * policy.carbon_tax * techs[k].carbon_content / units::kKgPerTonne;
        r.direct_kg[y] += fuel_kwh * techs[k].carbon_content;
        if (techs[k].fuel == kElectricityFuel) {
            electricity += fuel_kwh;
            electricity_price = price.mean;
        }
    }
    r.subsidy_eur[y] += electricity * std::min(policy.electricity_subsidy, electricity_price);
    r.indirect_decarb_kg[y] += accounting::indirect_emissions(
        electricity, region.grid_intensity.at(scenario::PowerVariant::Decarbonisation15C), year);
    r.indirect_baseline_kg[y] += accounting::indirect_emissions(
        electricity, region.grid_intensity.at(scenario::PowerVariant::PowerBaseline), year);

    run.state = std::move(step.state);
}

std::string context(const io::Dataset &data, std::size_t region, int year) {
    return "region '" + data.regions[region].id + "', year " + std::to_string(year) + ": ";
}

void run_regions(std::vector<RegionRun> &runs, const StepContext &ctx, int year, double dt,
                 int threads) {
    std::vector<std::exception_ptr> errors(runs.size());
    auto work = [&](std::size_t k) {
        try {
            step_region(runs[k], ctx, year, dt);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, threads));
    if (workers <= 1 || runs.size() <= 1) {
        for (std::size_t k = 0; k < runs.size(); ++k) {
            work(k);
        }
    } else {
        std::vector<std::thread> pool;
        const std::size_t count = std::min(workers, runs.size());
        for (std::size_t t = 0; t < count; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t k = t; k < runs.size(); k += count) {
                    work(k);
                }
            });
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (std::size_t k = 0; k < runs.size(); ++k) {
        if (!errors[k]) {
            continue;
        }
        const auto where = context(ctx.data, runs[k].index, year);
        try {
            std::rethrow_exception(errors[k]);
        } catch (const ValidationError &e) {
            throw ValidationError(where + e.what());
        } catch (const std::exception &e) {
            throw Error(where + e.what());
        }
    }
}

} // namespace

json to_json(const RunOptions &o) {
    return {{"dt", o.sim.dt},
            {"start_year", o.sim.start_year},
            {"end_year", o.sim.end_year},
            {"scrapping_enabled", o.sim.scrapping_enabled},
            {"scrap_lifetime_factor", o.sim.scrap_lifetime_factor},
            {"discount_rate", o.behaviour.discount_rate},
            {"payback_years", {{"mean", o.behaviour.payback_years.mean},
                               {"sd", o.behaviour.payback_years.sd}}},
            {"learning_floor", o.learning_floor},
            {"adjustments",
             {{"fuel_price_trend", o.adjustments.fuel_price_trend},
              {"fuel_trend_start_year", o.adjustments.fuel_trend_start_year},
              {"learning_rate_factor", o.adjustments.learning_rate_factor},
              {"discount_rate_factor", o.adjustments.discount_rate_factor},
              {"gamma_factor", o.adjustments.gamma_factor}}}};
}

costs::CostDistribution fuel_price(const io::Dataset &data, std::size_t region,
                                   const std::string &fuel, int year,
                                   const ModelAdjustments &adjustments) {
    const auto &prices = data.regions.at(region).fuel_prices;
    const auto it = prices.find(fuel);
    if (it == prices.end()) {
        throw ValidationError("no prices for fuel '" + fuel + "'");
    }
    costs::CostDistribution out{it->second.price.at(year), it->second.sd.at(year)};
    if (adjustments.fuel_price_trend != 0.0 && year > adjustments.fuel_trend_start_year) {
        const double factor =
            std::max(0.0, 1.0 + adjustments.fuel_price_trend *
                                    static_cast<double>(year - adjustments.fuel_trend_start_year));
        out.mean *= factor;
        out.sd *= factor;
    }
    return out;
}

RegionCosts region_costs(const io::Dataset &data, std::size_t region, int year,
                         std::span<const double> ic_mean, const costs::PolicyAtTime &policy,
                         std::span<const double> gamma, const RunOptions &options) {
    const std::size_t n = data.techs.size();
    if (ic_mean.size() != n || gamma.size() != n) {
        throw ValidationError("cost vectors do not match the technology list");
    }
    const double r = options.behaviour.discount_rate * options.adjustments.discount_rate_factor;
    RegionCosts out;
    for (std::size_t k = 0; k < n; ++k) {
        const auto tech = data.regional_tech(region, k);
        const auto &ic0 = data.ic[k];
        costs::CostInputs in;
        in.ic.mean = ic_mean[k];
        in.ic.sd = ic0.mean > 0.0 ? ic0.sd * ic_mean[k] / ic0.mean : ic0.sd;
        in.mr = data.mr[k];
        in.fuel_price = fuel_price(data, region, tech.fuel, year, options.adjustments);
        in.cf = data.regions[region].capacity_factor[k];
        const auto after = costs::apply_policies(in, tech, policy);
        const costs::CostDistribution lcoh{costs::levelised_cost(tech, after, r),
                                           costs::cost_spread(tech, after, r)};
        out.inputs.push_back(after);
        out.lcoh.push_back(lcoh);
        out.gcoh.push_back(
            costs::generalised_cost(lcoh, gamma[k] * options.adjustments.gamma_factor));
        out.running.push_back(costs::marginal_running_cost_distribution(tech, after));
        out.payback.push_back(
            costs::payback_cost_distribution(tech, after, options.behaviour.payback_years));
    }
    return out;
}

std::vector<char> availability(const io::Dataset &data, std::size_t region,
                               std::span<const double> shares,
                               const dynamics::KickStartOrder *kick) {
    const auto &rd = data.regions.at(region);
    const bool district = rd.district_present(data.techs);
    std::vector<char> out(data.techs.size(), 0);
    for (std::size_t k = 0; k < data.techs.size(); ++k) {
        const auto cls = data.techs[k].tech_class;
        if (cls == TechClass::DistrictHeat && !district) {
            continue;
        }
        const bool seeded = kick != nullptr && std::find(kick->classes.begin(), kick->classes.end(),
                                                         cls) != kick->classes.end();
        out[k] = shares[k] > 0.0 || rd.historically_present(k) || seeded;
    }
    return out;
}

std::vector<double> scrap_rates(const io::Dataset &data, const dynamics::SimConfig &config) {
    std::vector<double> out;
    for (const auto &t : data.techs) {
        out.push_back(1.0 / (config.scrap_lifetime_factor * t.lifetime));
    }
    return out;
}

demand::DemandTrajectory region_demand(const io::Dataset &data, std::size_t region,
                                       const demand::DemandVariant &variant, int base_year) {
    const auto &rd = data.regions.at(region);
    if (rd.trajectory) {
        return *rd.trajectory;
    }
    if (!rd.drivers) {
        throw ValidationError("region '" + rd.id + "' has no demand inputs");
    }
    return demand::demand_trajectory(*rd.drivers, rd.water, variant, base_year);
}

costs::LearningState initial_learning(const io::Dataset &data, const RunOptions &options) {
    const std::size_t n = data.techs.size();
    std::vector<double> w0(n, 0.0);
    std::vector<double> ic0(n);
    std::vector<double> lr(n);
    const int start = options.sim.start_year;
    for (std::size_t g = 0; g < data.regions.size(); ++g) {
        const auto d = region_demand(data, g, demand::DemandVariant::baseline(), start);
        const double ue = d.ue_total.at(start);
        for (std::size_t k = 0; k < n; ++k) {
            w0[k] += data.regions[g].historical_share(k, start) * ue /
                     costs::full_load_hours(data.regions[g].capacity_factor[k]);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (data.reference_capacity.size() == n && data.reference_capacity[k] > 0.0) {
            w0[k] = data.reference_capacity[k];
        }
        w0[k] = std::max(w0[k], 1.0);
        ic0[k] = data.ic[k].mean;
        lr[k] = std::min(0.5, data.techs[k].learning_rate * options.adjustments.learning_rate_factor);
    }
    return {w0, ic0, lr, options.learning_floor};
}

void check_horizon(const io::Dataset &data, int start_year, int end_year) {
    std::vector<std::string> errors;
    auto need = [&](const YearSeries &s, int from, int to, const std::string &what) {
        if (!s.covers(from) || !s.covers(to)) {
            errors.push_back(what + " does not cover " + std::to_string(from) + "-" +
                             std::to_string(to));
        }
    };
    for (const auto &r : data.regions) {
        const auto prefix = "region '" + r.id + "': ";
        if (r.history.empty() || !r.history.front().covers(start_year)) {
            errors.push_back(prefix + "historical shares do not include the start year " +
                             std::to_string(start_year));
        }
        if (r.trajectory) {
            need(r.trajectory->ue_total, start_year, end_year, prefix + "demand trajectory");
        } else if (r.drivers) {
            need(r.drivers->population, start_year, end_year, prefix + "demand drivers");
        }
        for (const auto &[fuel, s] : r.fuel_prices) {
            int from = start_year;
            if (!r.history.empty()) {
                from = std::min(from, r.history_last_year());
            }
            need(s.price, from, end_year, prefix + "fuel prices for '" + fuel + "'");
        }
        for (const auto &[variant, s] : r.grid_intensity) {
            need(s, start_year, end_year,
                 prefix + "grid intensity " + std::string{scenario::to_string(variant)});
        }
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

const costs::GammaTable &require_gammas(const io::Dataset &data) {
    if (!data.gammas) {
        throw ValidationError("dataset '" + data.name +
                              "' has no gamma.csv; run calibrate first or supply gammas");
    }
    return *data.gammas;
}

RunResult simulate_run(const io::Dataset &data, const scenario::ScenarioSpec &spec,
                       const RunOptions &options, const costs::GammaTable &gammas,
                       const ProgressFn &progress) {
    dynamics::validate(options.sim);
    const auto resolved = scenario::resolve(spec, data.flagged_regions());
    scenario::validate(resolved.schedule);
    demand::validate(resolved.demand_variant);
    const int start = options.sim.start_year;
    const int end = options.sim.end_year;
    check_horizon(data, start, end);

    const std::size_t n = data.techs.size();
    const auto fuels = data.fuels();
    std::vector<RegionRun> runs;
    for (std::size_t g = 0; g < data.regions.size(); ++g) {
        const auto &rd = data.regions[g];
        const auto it = gammas.find(rd.id);
        if (it == gammas.end() || it->second.size() != n) {
            throw ValidationError("no gamma values for region '" + rd.id + "'");
        }
        RegionRun run;
        run.index = g;
        run.demand = region_demand(data, g, resolved.demand_variant, start);
        run.state.shares.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            run.state.shares[k] = rd.historical_share(k, start);
        }
        run.state.year = start;
        run.constraints.district_present = rd.district_present(data.techs);
        run.gamma = it->second;
        for (std::size_t k = 0; k < n; ++k) {
            run.hours.push_back(costs::full_load_hours(rd.capacity_factor[k]));
        }
        run.result.region = rd.id;
        runs.push_back(std::move(run));
    }

    auto learning = initial_learning(data, options);
    std::vector<double> lifetimes;
    for (const auto &t : data.techs) {
        lifetimes.push_back(t.lifetime);
    }
    const auto kappa = scrap_rates(data, options.sim);
    const auto carbon = data.carbon_by_fuel();

    RunResult result;
    result.metadata.scenario_id = spec.id;
    result.metadata.dataset_name = data.name;
    result.metadata.dataset_hash = data.content_hash;
    result.metadata.config = to_json(options);
    result.metadata.scenario = scenario::to_json(spec);
    for (const auto &t : data.techs) {
        result.tech_ids.push_back(t.id);
    }
    result.fuel_ids = fuels;

    const int steps = static_cast<int>(std::lround(1.0 / options.sim.dt));
    const double dt = 1.0 / steps;
    std::vector<double> ic_mean(n);
    for (int year = start; year <= end; ++year) {
        result.years.push_back(year);
        for (std::size_t k = 0; k < n; ++k) {
            ic_mean[k] = learning.investment_cost(k);
        }
        result.investment_cost.push_back(ic_mean);
        for (auto &run : runs) {
            record_stock(run, year, fuels.size());
        }
        for (int s = 0; s < steps; ++s) {
            const StepContext ctx{data, resolved, options, ic_mean, kappa, lifetimes, carbon, fuels};
            run_regions(runs, ctx, year, dt, options.sim.threads);
            for (std::size_t k = 0; k < n; ++k) {
                double added = 0.0;
                for (const auto &run : runs) {
                    added += run.step_built[k];
                }
                learning.add_capacity(k, added);
                ic_mean[k] = learning.investment_cost(k);
            }
            for (auto &run : runs) {
                run.state.year = year + static_cast<double>(s + 1) / steps;
            }
        }
        if (progress) {
            for (const auto &run : runs) {
                progress(data.regions[run.index].id, year);
            }
        }
    }

    for (auto &run : runs) {
        result.step_halvings += run.halvings;
        result.regions.push_back(std::move(run.result));
    }
    return result;
}

} // namespace heatshift
