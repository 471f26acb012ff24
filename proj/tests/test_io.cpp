#include "heatshift/csv.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/results.hpp"
#include "heatshift/simulation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace heatshift;
namespace fs = std::filesystem;

namespace {

fs::path copy_dataset(const std::string &name) {
    const auto dir = testing::temp_dir(name);
    fs::copy(testing::data_dir(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
    return dir;
}

void rewrite(const fs::path &file, const std::string &from, const std::string &to) {
    auto text = testing::read_file(file);
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    text.replace(at, from.size(), to);
    std::ofstream{file, std::ios::binary} << text;
}

std::vector<std::string> load_errors(const fs::path &dir) {
    try {
        io::load_dataset(dir);
    } catch (const ValidationError &e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string> &errors, std::initializer_list<std::string> words) {
    return std::any_of(errors.begin(), errors.end(), [&](const std::string &e) {
        return std::all_of(words.begin(), words.end(),
                           [&](const std::string &w) { return e.find(w) != std::string::npos; });
    });
}

int cli(const std::string &args, const fs::path &log) {
    const std::string command = std::string{HEATSHIFT_CLI} + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string first_line(const fs::path &file) {
    std::ifstream in{file};
    std::string line;
    std::getline(in, line);
    return line;
}

std::string share_row(const std::string &region, const std::string &tech, int year) {
    const auto &data = testing::synthetic();
    const auto &r = data.regions[data.region_index(region)];
    return region + "," + tech + "," + std::to_string(year) + "," +
           csv::format_number(r.historical_share(data.tech_index(tech), year));
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("shipped dataset loads clean") {
    const auto data = io::load_dataset(testing::data_dir());
    CHECK(data.techs.size() == 13);
    CHECK(data.regions.size() == 3);
    CHECK(data.gammas.has_value());
    CHECK(data.content_hash.size() == 64);
    CHECK_NOTHROW(check_horizon(data, 2015, 2050));
}

TEST_CASE("a share row summing to 0.9 is named by region and year") {
    const auto dir = copy_dataset("shares_sum");
    const auto row = share_row("south", "gas", 2011);
    const auto &data = testing::synthetic();
    const double v = data.regions[data.region_index("south")].historical_share(data.tech_index("gas"), 2011);
    rewrite(dir / "shares.csv", row, "south,gas,2011," + csv::format_number(v - 0.1));
    const auto errors = load_errors(dir);
    REQUIRE(errors.size() == 1);
    CHECK(mentions(errors, {"south", "2011", "0.9"}));
}

TEST_CASE("unknown technology in shares is a referential error") {
    const auto dir = copy_dataset("shares_unknown");
    rewrite(dir / "shares.csv", "region,tech_id,year,share\n", "region,tech_id,year,share\nnorth,peat,2012,0\n");
    const auto errors = load_errors(dir);
    REQUIRE_FALSE(errors.empty());
    CHECK(mentions(errors, {"shares.csv", "peat"}));
}

TEST_CASE("every violation is reported, not just the first") {
    const auto dir = copy_dataset("many_errors");
    rewrite(dir / "technologies.csv", "gas,FossilGas,0.75,", "gas,FossilGas,-0.75,");
    rewrite(dir / "fuel_prices.csv", "north,biomass,2009,0.014", "north,biomass,2009,abc");
    rewrite(dir / "regions.csv", "south,false", "south,maybe");
    const auto errors = load_errors(dir);
    CHECK(errors.size() >= 3);
    CHECK(mentions(errors, {"technologies.csv"}));
    CHECK(mentions(errors, {"fuel_prices.csv"}));
    CHECK(mentions(errors, {"regions.csv"}));
}

TEST_CASE("missing required file") {
    const auto dir = copy_dataset("missing_file");
    fs::remove(dir / "grid_intensity.csv");
    CHECK(mentions(load_errors(dir), {"grid_intensity.csv"}));
}

TEST_CASE("decimal commas are normalised") {
    CHECK(csv::parse_number("0,25") == 0.25);
    CHECK(csv::parse_number("1.5e3") == 1500.0);
    CHECK_FALSE(csv::parse_number("1.2.3").has_value());
    CHECK_FALSE(csv::parse_number("").has_value());
    CHECK(csv::parse_number(csv::format_number(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("dataset write then load reproduces the files byte for byte") {
    const auto a = testing::temp_dir("dataset_a");
    const auto b = testing::temp_dir("dataset_b");
    io::write_dataset(testing::synthetic(), a);
    io::write_dataset(io::load_dataset(a), b);
    for (const auto &entry : fs::directory_iterator(a)) {
        CHECK(testing::read_file(entry.path()) == testing::read_file(b / entry.path().filename()));
    }
    CHECK(io::load_dataset(a).content_hash == io::load_dataset(b).content_hash);
}

TEST_CASE("result export, import, export is byte-identical") {
    const auto &data = testing::synthetic();
    const auto run = simulate_run(data, scenario::preset_scenario("h"), RunOptions{}, *data.gammas);
    const auto dir = testing::temp_dir("roundtrip");
    write_result(run, dir / "first.json");
    const auto back = read_result(dir / "first.json");
    CHECK(back == run);
    write_result(back, dir / "second.json");
    CHECK(testing::read_file(dir / "first.json") == testing::read_file(dir / "second.json"));
    export_csv(run, dir / "csv1");
    export_csv(back, dir / "csv2");
    for (const char *name : {"shares.csv", "energy.csv", "emissions.csv", "money.csv"}) {
        CHECK(testing::read_file(dir / "csv1" / name) == testing::read_file(dir / "csv2" / name));
    }
    const auto j = nlohmann::json::parse(testing::read_file(dir / "first.json"));
    CHECK(j.at("schema_version") == kResultSchemaVersion);
    CHECK(j.at("metadata").at("dataset_hash") == data.content_hash);
    CHECK(j.at("metadata").at("scenario").at("id") == "h");
}

TEST_CASE("command line: simulate, compare, validate and exit codes") {
    const auto dir = testing::temp_dir("cli");
    const auto data = testing::data_dir().string();
    const auto log = dir / "log.txt";
    REQUIRE(cli("simulate --data " + data + " --scenario c --out " + (dir / "c").string(), log) == 0);
    REQUIRE(cli("simulate --data " + data + " --scenario e --out " + (dir / "e").string(), log) == 0);
    CHECK(fs::exists(dir / "c" / "result.json"));
    CHECK(fs::exists(dir / "c" / "shares.csv"));

    const auto &d = testing::synthetic();
    const auto direct = simulate_run(d, scenario::preset_scenario("e"), RunOptions{}, *d.gammas);
    CHECK(testing::read_file(dir / "e" / "result.json") == serialize(direct));

    REQUIRE(cli("compare --run " + (dir / "c" / "result.json").string() + " --run " +
                    (dir / "e" / "result.json").string() + " --out " + (dir / "cmp").string(),
                log) == 0);
    CHECK(first_line(dir / "cmp" / "emissions.csv") ==
          "scenario,heating_gt,elec_decarb_gt,elec_baseline_gt,total_decarb_gt,total_baseline_gt");
    CHECK(first_line(dir / "cmp" / "expenditures.csv").find("invest_eur_per_tco2") != std::string::npos);

    CHECK(cli("validate --data " + data, log) == 0);
    const auto broken = copy_dataset("cli_broken");
    rewrite(broken / "shares.csv", "region,tech_id,year,share\n", "region,tech_id,year,share\nnorth,peat,2012,0\n");
    CHECK(cli("validate --data " + broken.string(), log) == 2);
    CHECK(testing::read_file(log).find("peat") != std::string::npos);
    CHECK(cli("simulate --data " + broken.string() + " --scenario a --out " + (dir / "x").string(), log) == 2);
    CHECK(cli("simulate --data " + data + " --scenario zz --out " + (dir / "x").string(), log) == 2);
    CHECK(cli("validate --data " + data + " --to 2080", log) == 2);
}

TEST_CASE("command line: calibrate writes the gamma table") {
    const auto dir = testing::temp_dir("cli_calibrate");
    REQUIRE(cli("calibrate --data " + testing::data_dir().string() + " --out " + (dir / "gamma.csv").string(),
                dir / "log.txt") == 0);
    const auto &data = testing::synthetic();
    const auto fitted = io::read_gamma_csv(dir / "gamma.csv", data.techs, data.region_ids());
    for (const auto &id : data.region_ids()) {
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            CHECK(std::abs(fitted.at(id)[k].value - data.gammas->at(id)[k].value) < 1e-9);
        }
    }
}

}
