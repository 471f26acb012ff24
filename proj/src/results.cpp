#include "heatshift/results.hpp"

#include "heatshift/csv.hpp"
#include "heatshift/errors.hpp"

#include <fstream>
#include <sstream>

namespace heatshift {
namespace {

using nlohmann::json;

template <typename T> void get_to(const json &j, const char *key, T &out) {
    if (!j.contains(key)) {
        throw ValidationError(std::string{"result file: missing field '"} + key + "'");
    }
    j.at(key).get_to(out);
}

json region_to_json(const RegionResult &r) {
    return {{"region", r.region},
            {"years", r.years},
            {"shares", r.shares},
            {"ue", r.ue},
            {"ue_total", r.ue_total},
            {"water_fraction", r.water_fraction},
            {"final_energy", r.final_energy},
            {"capacity_kw", r.capacity_kw},
            {"built_kw", r.built_kw},
            {"scrapped_kw", r.scrapped_kw},
            {"direct_kg", r.direct_kg},
            {"indirect_decarb_kg", r.indirect_decarb_kg},
            {"indirect_baseline_kg", r.indirect_baseline_kg},
            {"invest_eur", r.invest_eur},
            {"energy_eur", r.energy_eur},
            {"tax_eur", r.tax_eur},
            {"subsidy_eur", r.subsidy_eur}};
}

RegionResult region_from_json(const json &j) {
    RegionResult r;
    get_to(j, "region", r.region);
    get_to(j, "years", r.years);
    get_to(j, "shares", r.shares);
    get_to(j, "ue", r.ue);
    get_to(j, "ue_total", r.ue_total);
    get_to(j, "water_fraction", r.water_fraction);
    get_to(j, "final_energy", r.final_energy);
    get_to(j, "capacity_kw", r.capacity_kw);
    get_to(j, "built_kw", r.built_kw);
    get_to(j, "scrapped_kw", r.scrapped_kw);
    get_to(j, "direct_kg", r.direct_kg);
    get_to(j, "indirect_decarb_kg", r.indirect_decarb_kg);
    get_to(j, "indirect_baseline_kg", r.indirect_baseline_kg);
    get_to(j, "invest_eur", r.invest_eur);
    get_to(j, "energy_eur", r.energy_eur);
    get_to(j, "tax_eur", r.tax_eur);
    get_to(j, "subsidy_eur", r.subsidy_eur);
    return r;
}

template <typename Fn>
void write_csv(const std::filesystem::path &path, const std::vector<std::string> &header, Fn &&rows) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    csv::write_row(out, header);
    rows(out);
}

std::string num(double v) { return csv::format_number(v); }

json year_values(const std::vector<int> &years, const std::vector<double> &values) {
    return {{"years", years}, {"values", values}};
}

json columns(const std::vector<int> &years, const Matrix2D &m, std::size_t k) {
    std::vector<double> v;
    v.reserve(m.size());
    for (const auto &row : m) {
        v.push_back(row.at(k));
    }
    return year_values(years, v);
}

} // namespace

const RegionResult &RunResult::region(const std::string &id) const {
    for (const auto &r : regions) {
        if (r.region == id) {
            return r;
        }
    }
    throw NotFoundError("run has no region '" + id + "'");
}

json to_json(const RunResult &run) {
    json regions = json::array();
    for (const auto &r : run.regions) {
        regions.push_back(region_to_json(r));
    }
    return {{"schema_version", run.metadata.schema_version},
            {"metadata",
             {{"scenario_id", run.metadata.scenario_id},
              {"dataset_name", run.metadata.dataset_name},
              {"dataset_hash", run.metadata.dataset_hash},
              {"code_version", run.metadata.code_version},
              {"config", run.metadata.config},
              {"scenario", run.metadata.scenario}}},
            {"tech_ids", run.tech_ids},
            {"fuel_ids", run.fuel_ids},
            {"years", run.years},
            {"investment_cost", run.investment_cost},
            {"step_halvings", run.step_halvings},
            {"regions", regions}};
}

RunResult run_from_json(const json &j) {
    RunResult run;
    try {
        get_to(j, "schema_version", run.metadata.schema_version);
        if (run.metadata.schema_version != kResultSchemaVersion) {
            throw ValidationError("result file: unsupported schema_version " +
                                  std::to_string(run.metadata.schema_version));
        }
        const auto &m = j.at("metadata");
        get_to(m, "scenario_id", run.metadata.scenario_id);
        get_to(m, "dataset_name", run.metadata.dataset_name);
        get_to(m, "dataset_hash", run.metadata.dataset_hash);
        get_to(m, "code_version", run.metadata.code_version);
        run.metadata.config = m.at("config");
        run.metadata.scenario = m.at("scenario");
        get_to(j, "tech_ids", run.tech_ids);
        get_to(j, "fuel_ids", run.fuel_ids);
        get_to(j, "years", run.years);
        get_to(j, "investment_cost", run.investment_cost);
        get_to(j, "step_halvings", run.step_halvings);
        for (const auto &r : j.at("regions")) {
            run.regions.push_back(region_from_json(r));
        }
    } catch (const json::exception &e) {
        throw ValidationError(std::string{"result file: "} + e.what());
    }
    return run;
}

std::string serialize(const RunResult &run) { return to_json(run).dump(1) + "\n"; }

RunResult read_result(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) {
        throw ValidationError(path.string() + ": cannot open");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return run_from_json(j);
}

void write_result(const RunResult &run, const std::filesystem::path &path) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << serialize(run);
}

void export_csv(const RunResult &run, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    write_csv(dir / "shares.csv", {"region", "year", "tech_id", "share", "ue_kwh", "capacity_kw",
                                   "built_kw", "scrapped_kw"},
              [&](std::ostream &out) {
                  for (const auto &r : run.regions) {
                      for (std::size_t y = 0; y < r.years.size(); ++y) {
                          for (std::size_t k = 0; k < run.tech_ids.size(); ++k) {
                              csv::write_row(out, {r.region, std::to_string(r.years[y]),
                                                   run.tech_ids[k], num(r.shares[y][k]),
                                                   num(r.ue[y][k]), num(r.capacity_kw[y][k]),
                                                   num(r.built_kw[y][k]),
                                                   num(r.scrapped_kw[y][k])});
                          }
                      }
                  }
              });
    write_csv(dir / "energy.csv", {"region", "year", "fuel", "final_energy_kwh"},
              [&](std::ostream &out) {
                  for (const auto &r : run.regions) {
                      for (std::size_t y = 0; y < r.years.size(); ++y) {
                          for (std::size_t f = 0; f < run.fuel_ids.size(); ++f) {
                              csv::write_row(out, {r.region, std::to_string(r.years[y]),
                                                   run.fuel_ids[f], num(r.final_energy[y][f])});
                          }
                      }
                  }
              });
    write_csv(dir / "emissions.csv",
              {"region", "year", "ue_total_kwh", "direct_kg", "indirect_decarb_kg",
               "indirect_baseline_kg"},
              [&](std::ostream &out) {
                  for (const auto &r : run.regions) {
                      for (std::size_t y = 0; y < r.years.size(); ++y) {
                          csv::write_row(out, {r.region, std::to_string(r.years[y]),
                                               num(r.ue_total[y]), num(r.direct_kg[y]),
                                               num(r.indirect_decarb_kg[y]),
                                               num(r.indirect_baseline_kg[y])});
                      }
                  }
              });
    write_csv(dir / "money.csv",
              {"region", "year", "invest_eur", "energy_eur", "tax_eur", "subsidy_eur"},
              [&](std::ostream &out) {
                  for (const auto &r : run.regions) {
                      for (std::size_t y = 0; y < r.years.size(); ++y) {
                          csv::write_row(out, {r.region, std::to_string(r.years[y]),
                                               num(r.invest_eur[y]), num(r.energy_eur[y]),
                                               num(r.tax_eur[y]), num(r.subsidy_eur[y])});
                      }
                  }
              });
}

json report_json(const RunResult &run, const std::string &report) {
    json regions = json::object();
    for (const auto &r : run.regions) {
        json entry = json::object();
        if (report == "shares") {
            for (std::size_t k = 0; k < run.tech_ids.size(); ++k) {
                entry[run.tech_ids[k]] = columns(r.years, r.shares, k);
            }
        } else if (report == "emissions") {
            entry = {{"direct_kg", year_values(r.years, r.direct_kg)},
                     {"indirect_decarb_kg", year_values(r.years, r.indirect_decarb_kg)},
                     {"indirect_baseline_kg", year_values(r.years, r.indirect_baseline_kg)}};
        } else if (report == "money") {
            entry = {{"invest_eur", year_values(r.years, r.invest_eur)},
                     {"energy_eur", year_values(r.years, r.energy_eur)},
                     {"tax_eur", year_values(r.years, r.tax_eur)},
                     {"subsidy_eur", year_values(r.years, r.subsidy_eur)}};
        } else {
            throw ValidationError("unknown report '" + report + "' (expected shares, emissions or money)");
        }
        regions[r.region] = std::move(entry);
    }
    return {{"report", report}, {"scenario_id", run.metadata.scenario_id}, {"regions", regions}};
}

} // namespace heatshift
