// Batch command-line interface: simulate, calibrate, sensitivity, compare,
// serve, validate and presets.

#include "heatshift/accounting.hpp"
#include "heatshift/calibration.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/results.hpp"
#include "heatshift/scenario.hpp"
#include "heatshift/sensitivity.hpp"
#include "heatshift/service.hpp"
#include "heatshift/simulation.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace heatshift;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;

struct SimArgs {
    std::string data;
    std::string scenario = "a";
    std::string gamma_file;
    std::string out;
    int from = 2015;
    int to = 2050;
    double dt = 0.25;
    int threads = 1;
    bool no_scrapping = false;
    double payback_mean = 3.0;
    double payback_sd = 1.0;
    double discount_rate = 0.09;
};

void add_run_options(CLI::App *cmd, SimArgs &a) {
    cmd->add_option("--from", a.from, "First simulated year");
    cmd->add_option("--to", a.to, "Last simulated year");
    cmd->add_option("--dt", a.dt, "Time step in years");
    cmd->add_option("--threads", a.threads, "Worker threads over regions");
    cmd->add_flag("--no-scrapping", a.no_scrapping, "Disable premature scrapping");
    cmd->add_option("--payback-mean", a.payback_mean, "Mean payback threshold (years)");
    cmd->add_option("--payback-sd", a.payback_sd, "Payback threshold spread (years)");
    cmd->add_option("--discount-rate", a.discount_rate, "Household discount rate");
}

RunOptions run_options(const SimArgs &a) {
    RunOptions o;
    o.sim.start_year = a.from;
    o.sim.end_year = a.to;
    o.sim.dt = a.dt;
    o.sim.threads = a.threads;
    o.sim.scrapping_enabled = !a.no_scrapping;
    o.behaviour.discount_rate = a.discount_rate;
    o.behaviour.payback_years = {a.payback_mean, a.payback_sd};
    return o;
}

scenario::ScenarioSpec load_scenario(const std::string &arg) {
    if (arg.size() == 1 && scenario::kPresetIds.find(arg[0]) != std::string_view::npos) {
        return scenario::preset_scenario(arg);
    }
    std::ifstream in(arg);
    if (!in) {
        throw ValidationError("scenario '" + arg + "' is neither a preset id nor a readable file");
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError(arg + ": " + e.what());
    }
    return scenario::scenario_from_json(j);
}

costs::GammaTable gammas_for(const io::Dataset &data, const std::string &gamma_file) {
    if (gamma_file.empty()) {
        return require_gammas(data);
    }
    return io::read_gamma_csv(gamma_file, data.techs, data.region_ids());
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

int cmd_simulate(const SimArgs &a) {
    const auto data = io::load_dataset(a.data);
    const auto spec = load_scenario(a.scenario);
    const auto result = simulate_run(data, spec, run_options(a), gammas_for(data, a.gamma_file));
    fs::create_directories(a.out);
    write_result(result, fs::path(a.out) / "result.json");
    export_csv(result, a.out);
    std::cout << "scenario " << spec.id << ": " << result.years.size() << " years, "
              << result.regions.size() << " regions -> " << a.out << "\n";
    return 0;
}

int cmd_calibrate(const SimArgs &a, const std::string &region) {
    const auto data = io::load_dataset(a.data);
    const auto options = run_options(a);
    costs::GammaTable table = data.gammas.value_or(costs::GammaTable{});
    bool converged = true;
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        const auto &id = data.regions[r].id;
        if (!region.empty() && id != region) {
            continue;
        }
        const auto result = calibration::auto_calibrate(data, r, options);
        const auto &d = result.diagnostics;
        std::cout << id << ": " << (d.converged ? "converged" : "NOT converged") << " after "
                  << d.iterations << " iterations, max |residual| " << d.max_abs_residual
                  << "/year\n";
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            if (d.suspect[k]) {
                std::cout << "  " << data.techs[k].id << ": gamma on the search bound\n";
            }
        }
        converged = converged && d.converged;
        table[id] = result.gamma;
    }
    if (!region.empty() && !table.contains(region)) {
        throw NotFoundError("unknown region '" + region + "'");
    }
    for (const auto &r : data.regions) {
        if (!table.contains(r.id)) {
            table[r.id] = costs::GammaVector(data.techs.size());
        }
    }
    io::write_gamma_csv(table, data.techs, a.out);
    return converged ? 0 : kExitNonConvergence;
}

int cmd_sensitivity(const SimArgs &a, const std::vector<std::string> &bases) {
    const auto data = io::load_dataset(a.data);
    std::vector<scenario::ScenarioSpec> specs;
    for (const auto &b : bases) {
        specs.push_back(load_scenario(b));
    }
    const auto rows =
        scenario::sensitivity_suite(data, specs, run_options(a), gammas_for(data, a.gamma_file),
                                    a.from, a.to);
    fs::create_directories(a.out);
    std::ostringstream csv;
    csv << "scenario,reference_gt";
    if (!rows.empty()) {
        for (const auto &p : rows.front().perturbations) {
            csv << "," << p << "_pct";
        }
    }
    csv << "\n";
    for (const auto &row : rows) {
        csv << row.scenario << "," << num(row.reference_gt);
        for (const double d : row.deviation_pct) {
            csv << "," << num(d);
        }
        csv << "\n";
    }
    write_text(fs::path(a.out) / "sensitivity.csv", csv.str());
    std::cout << csv.str();
    return 0;
}

int cmd_compare(const std::vector<std::string> &runs, const std::string &out, int from, int to) {
    if (runs.size() < 2) {
        throw ValidationError("compare needs at least two --run files");
    }
    std::vector<RunResult> results;
    for (const auto &r : runs) {
        results.push_back(read_result(r));
    }
    fs::create_directories(out);
    std::ostringstream t1;
    t1 << "scenario,heating_gt,elec_decarb_gt,elec_baseline_gt,total_decarb_gt,total_baseline_gt\n";
    for (const auto &r : results) {
        const auto e = accounting::cumulative_emissions(r, from, to);
        t1 << r.metadata.scenario_id << "," << num(e.heating_gt) << "," << num(e.elec_decarb_gt)
           << "," << num(e.elec_baseline_gt) << "," << num(e.total_decarb_gt()) << ","
           << num(e.total_baseline_gt()) << "\n";
    }
    std::ostringstream t3;
    t3 << "scenario,reference,reference_invest_beur,reference_energy_beur,invest_delta_beur,"
          "energy_delta_beur,total_delta_beur,policy_revenue_beur,net_reduction_mtco2,"
          "invest_eur_per_tco2\n";
    for (std::size_t k = 1; k < results.size(); ++k) {
        const auto c = accounting::compare_expenditures(results[k], results.front(), from, to);
        t3 << c.scenario << "," << c.reference << "," << num(c.reference_invest / 1e9) << ","
           << num(c.reference_energy / 1e9) << "," << num(c.invest_delta / 1e9) << ","
           << num(c.energy_delta / 1e9) << "," << num(c.total_delta / 1e9) << ","
           << num(c.policy_revenue / 1e9) << "," << num(c.net_reduction_tco2 / 1e6) << ","
           << num(c.invest_per_tco2()) << "\n";
    }
    write_text(fs::path(out) / "emissions.csv", t1.str());
    write_text(fs::path(out) / "expenditures.csv", t3.str());
    std::cout << t1.str() << "\n" << t3.str();
    return 0;
}

int cmd_serve(const std::vector<std::string> &dirs, const std::string &host, int port,
              const SimArgs &a) {
    std::map<std::string, std::shared_ptr<const io::Dataset>> datasets;
    for (const auto &d : dirs) {
        auto data = std::make_shared<const io::Dataset>(io::load_dataset(d));
        datasets[data->name] = data;
    }
    service::Service svc(std::move(datasets), run_options(a));
    httplib::Server server;
    svc.mount(server);
    std::cout << "listening on " << host << ":" << port << std::endl;
    if (!server.listen(host, port)) {
        throw Error("cannot listen on " + host + ":" + std::to_string(port));
    }
    return 0;
}

int cmd_validate(const std::string &dir, int from, int to) {
    const auto data = io::load_dataset(dir);
    check_horizon(data, from, to);
    std::cout << data.name << ": " << data.regions.size() << " regions, " << data.techs.size()
              << " technologies, " << (data.gammas ? "gammas present" : "no gammas")
              << ", sha256 " << data.content_hash << "\n";
    return 0;
}

int cmd_presets(const std::string &out) {
    fs::create_directories(out);
    for (const char id : scenario::kPresetIds) {
        const auto spec = scenario::preset_scenario(std::string(1, id));
        write_text(fs::path(out) / (std::string(1, id) + ".json"),
                   scenario::to_json(spec).dump(2) + "\n");
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"heatshift: residential heating technology diffusion simulator"};
    app.require_subcommand(1);

    SimArgs a;
    std::string region;
    std::vector<std::string> bases{"a"};
    std::vector<std::string> runs;
    std::vector<std::string> data_dirs;
    std::string host = "127.0.0.1";
    int port = 8080;

    auto *sim = app.add_subcommand("simulate", "Run one scenario and export its results");
    sim->add_option("--data", a.data, "Dataset directory")->required();
    sim->add_option("--scenario", a.scenario, "Preset id (a-j) or scenario file");
    sim->add_option("--gamma", a.gamma_file, "gamma.csv overriding the dataset's");
    sim->add_option("--out", a.out, "Output directory")->required();
    add_run_options(sim, a);

    auto *cal = app.add_subcommand("calibrate", "Fit intangible costs to historical trends");
    cal->add_option("--data", a.data, "Dataset directory")->required();
    cal->add_option("--out", a.out, "gamma.csv to write")->required();
    cal->add_option("--region", region, "Only this region");
    add_run_options(cal, a);

    auto *sens = app.add_subcommand("sensitivity", "Parameter perturbation suite");
    sens->add_option("--data", a.data, "Dataset directory")->required();
    sens->add_option("--base", bases, "Preset ids or scenario files");
    sens->add_option("--gamma", a.gamma_file, "gamma.csv overriding the dataset's");
    sens->add_option("--out", a.out, "Output directory")->required();
    add_run_options(sens, a);

    auto *cmp = app.add_subcommand("compare", "Emission and expenditure differences between runs");
    cmp->add_option("--run", runs, "result.json files; the first is the reference")->required();
    cmp->add_option("--out", a.out, "Output directory")->required();
    int cmp_from = 2020;
    int cmp_to = 2050;
    cmp->add_option("--from", cmp_from, "First accounted year");
    cmp->add_option("--to", cmp_to, "Last accounted year");

    auto *srv = app.add_subcommand("serve", "HTTP service for the studio");
    srv->add_option("--data", data_dirs, "Dataset directories")->required();
    srv->add_option("--host", host, "Bind address");
    srv->add_option("--port", port, "Port");
    add_run_options(srv, a);

    auto *val = app.add_subcommand("validate", "Check a dataset");
    val->add_option("--data", a.data, "Dataset directory")->required();
    val->add_option("--from", a.from, "First year a run needs");
    val->add_option("--to", a.to, "Last year a run needs");

    auto *pre = app.add_subcommand("presets", "Write the preset scenarios as files");
    pre->add_option("--out", a.out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            return cmd_simulate(a);
        }
        if (*cal) {
            return cmd_calibrate(a, region);
        }
        if (*sens) {
            return cmd_sensitivity(a, bases);
        }
        if (*cmp) {
            return cmd_compare(runs, a.out, cmp_from, cmp_to);
        }
        if (*srv) {
            return cmd_serve(data_dirs, host, port, a);
        }
        if (*val) {
            return cmd_validate(a.data, a.from, a.to);
        }
        if (*pre) {
            return cmd_presets(a.out);
        }
    } catch (const ValidationError &e) {
        std::cerr << "validation failed:\n";
        for (const auto &v : e.violations()) {
            std::cerr << "  " << v << "\n";
        }
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
