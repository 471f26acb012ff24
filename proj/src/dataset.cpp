#include "heatshift/dataset.hpp"

#include "heatshift/csv.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/units.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

namespace heatshift::io {
namespace fs = std::filesystem;

namespace {

constexpr double kShareSumTolerance = 1e-6;

const std::vector<std::string> kTechColumns{"tech_id", "class", "ce", "lifetime_y", "learning_rate",
                                            "fuel", "carbon_kg_per_kwh", "ic_eur_per_kw", "ic_sd",
                                            "mr_eur_per_kw_a", "mr_sd", "subsidy_eligible"};
const std::vector<std::string> kRegionColumns{"region", "kick_start_eligible"};
const std::vector<std::string> kRegionTechColumns{"region", "tech_id", "cf", "ce"};
const std::vector<std::string> kFuelColumns{"region", "fuel", "year", "price_eur_per_kwh", "sd"};
const std::vector<std::string> kShareColumns{"region", "tech_id", "year", "share"};
const std::vector<std::string> kDriverColumns{
    "region", "year",           "population",    "m2_per_cap",     "hdd",
    "intensity_kj", "income",   "new_build_frac", "water_sat_kwh", "water_half_sat_income"};
const std::vector<std::string> kTrajectoryColumns{"region", "year", "ue_total_kwh",
                                                  "water_fraction"};
const std::vector<std::string> kGridColumns{"region", "year", "variant", "kg_per_kwh"};
const std::vector<std::string> kGammaColumns{"region", "tech_id", "gamma_cent_per_kwh",
                                             "provenance"};
const std::vector<std::string> kLearningColumns{"tech_id", "cumulative_capacity_kw"};
const std::vector<std::string> kMaskColumns{"from_class", "to_class", "allowed"};

const std::vector<std::string> kRequiredFiles{"technologies.csv", "regions.csv",
                                              "region_tech.csv",  "fuel_prices.csv",
                                              "shares.csv",       "grid_intensity.csv"};
const std::vector<std::string> kOptionalFiles{"demand_drivers.csv", "demand_trajectory.csv",
                                              "gamma.csv", "learning.csv", "mask.csv"};

/// Sparse year-keyed values that must end up on a gap-free grid.
using YearMap = std::map<int, double>;

class Loader {
public:
    explicit Loader(fs::path dir) : dir_{std::move(dir)} {}

    std::optional<csv::Table> table(const std::string &file, const std::vector<std::string> &cols,
                                    bool required) {
        const auto path = dir_ / file;
        if (!fs::exists(path)) {
            if (required) {
                errors.push_back(file + ": required file is missing");
            }
            return std::nullopt;
        }
        try {
            auto t = csv::Table::read(path);
            const auto missing = t.missing_columns(cols);
            for (const auto &m : missing) {
                errors.push_back(file + ": missing column '" + m + "'");
            }
            if (!missing.empty()) {
                return std::nullopt;
            }
            return t;
        } catch (const ValidationError &e) {
            for (const auto &v : e.violations()) {
                errors.push_back(v);
            }
            return std::nullopt;
        }
    }

    double number(const csv::Table &t, std::size_t row, const std::string &col) {
        const auto &text = t.field(row, col);
        const auto v = csv::parse_number(text);
        if (!v || !std::isfinite(*v)) {
            errors.push_back(t.where(row) + ": column '" + col + "' is not a number: '" + text + "'");
            return std::numeric_limits<double>::quiet_NaN();
        }
        return *v;
    }

    std::optional<int> integer(const csv::Table &t, std::size_t row, const std::string &col) {
        const auto &text = t.field(row, col);
        const auto v = csv::parse_int(text);
        if (!v) {
            errors.push_back(t.where(row) + ": column '" + col + "' is not an integer: '" + text +
                             "'");
        }
        return v;
    }

    std::optional<bool> boolean(const csv::Table &t, std::size_t row, const std::string &col) {
        const auto &text = t.field(row, col);
        const auto v = csv::parse_bool(text);
        if (!v) {
            errors.push_back(t.where(row) + ": column '" + col + "' is not a boolean: '" + text +
                             "'");
        }
        return v;
    }

    std::vector<std::string> errors;

private:
    fs::path dir_;
};

std::optional<YearSeries> to_series(const YearMap &m, const std::string &what,
                                    std::vector<std::string> &errors) {
    if (m.empty()) {
        return std::nullopt;
    }
    YearSeries s{m.begin()->first, {}};
    int expected = m.begin()->first;
    for (const auto &[year, value] : m) {
        if (year != expected) {
            errors.push_back(what + ": year grid has a gap before " + std::to_string(year));
            return std::nullopt;
        }
        s.values.push_back(value);
        ++expected;
    }
    return s;
}

std::string read_file(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string content_hash(const fs::path &dir) {
    std::vector<std::string> names;
    for (const auto &f : kRequiredFiles) {
        names.push_back(f);
    }
    for (const auto &f : kOptionalFiles) {
        if (fs::exists(dir / f)) {
            names.push_back(f);
        }
    }
    std::sort(names.begin(), names.end());
    std::string bytes;
    for (const auto &n : names) {
        if (!fs::exists(dir / n)) {
            continue;
        }
        bytes += n;
        bytes.push_back('\0');
        bytes += read_file(dir / n);
        bytes.push_back('\0');
    }
    return sha256_hex(bytes);
}

template <typename Fn> void write_file(const fs::path &path, Fn &&body) {
    std::ofstream out{path, std::ios::binary};
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    body(out);
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

std::string num(double v) { return csv::format_number(v); }

void load_technologies(Loader &L, Dataset &d) {
    auto t = L.table("technologies.csv", kTechColumns, true);
    if (!t) {
        return;
    }
    std::set<std::string> seen;
    std::map<std::string, double> carbon;
    for (std::size_t r = 0; r < t->rows(); ++r) {
        Technology tech;
        tech.id = t->field(r, "tech_id");
        if (!seen.insert(tech.id).second) {
            L.errors.push_back(t->where(r) + ": duplicate technology '" + tech.id + "'");
            continue;
        }
        const auto cls = parse_tech_class(t->field(r, "class"));
        if (!cls) {
            L.errors.push_back(t->where(r) + ": unknown class '" + t->field(r, "class") + "'");
        } else {
            tech.tech_class = *cls;
        }
        tech.efficiency = L.number(*t, r, "ce");
        tech.lifetime = L.number(*t, r, "lifetime_y");
        tech.learning_rate = L.number(*t, r, "learning_rate");
        tech.fuel = t->field(r, "fuel");
        tech.carbon_content = L.number(*t, r, "carbon_kg_per_kwh");
        tech.subsidy_eligible = L.boolean(*t, r, "subsidy_eligible").value_or(false);
        try {
            validate(tech);
        } catch (const ValidationError &e) {
            for (const auto &v : e.violations()) {
                L.errors.push_back(t->where(r) + ": " + v);
            }
        }
        const auto [it, fresh] = carbon.emplace(tech.fuel, tech.carbon_content);
        if (!fresh && it->second != tech.carbon_content) {
            L.errors.push_back(t->where(r) + ": fuel '" + tech.fuel +
                               "' has conflicting carbon contents");
        }
        costs::CostDistribution ic{L.number(*t, r, "ic_eur_per_kw"), L.number(*t, r, "ic_sd")};
        costs::CostDistribution mr{L.number(*t, r, "mr_eur_per_kw_a"), L.number(*t, r, "mr_sd")};
        for (double v : {ic.mean, ic.sd, mr.mean, mr.sd}) {
            if (v < 0.0) {
                L.errors.push_back(t->where(r) + ": cost figures must be >= 0");
                break;
            }
        }
        d.techs.push_back(std::move(tech));
        d.ic.push_back(ic);
        d.mr.push_back(mr);
    }
    if (d.techs.empty()) {
        L.errors.emplace_back("technologies.csv: no technologies");
    }
    d.reference_capacity.assign(d.techs.size(), 0.0);
}

std::optional<std::size_t> find_tech(const Dataset &d, const std::string &id) {
    for (std::size_t k = 0; k < d.techs.size(); ++k) {
        if (d.techs[k].id == id) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> find_region(const Dataset &d, const std::string &id) {
    for (std::size_t k = 0; k < d.regions.size(); ++k) {
        if (d.regions[k].id == id) {
            return k;
        }
    }
    return std::nullopt;
}

/// Resolves the region and technology named on a row, reporting unknown ids.
bool resolve_ids(Loader &L, const Dataset &d, const csv::Table &t, std::size_t r,
                 std::size_t &region, std::size_t *tech) {
    bool ok = true;
    const auto rid = find_region(d, t.field(r, "region"));
    if (!rid) {
        L.errors.push_back(t.where(r) + ": unknown region '" + t.field(r, "region") + "'");
        ok = false;
    } else {
        region = *rid;
    }
    if (tech != nullptr) {
        const auto tid = find_tech(d, t.field(r, "tech_id"));
        if (!tid) {
            L.errors.push_back(t.where(r) + ": unknown technology '" + t.field(r, "tech_id") + "'");
            ok = false;
        } else {
            *tech = *tid;
        }
    }
    return ok;
}

void load_regions(Loader &L, Dataset &d) {
    auto t = L.table("regions.csv", kRegionColumns, true);
    if (!t) {
        return;
    }
    for (std::size_t r = 0; r < t->rows(); ++r) {
        RegionData region;
        region.id = t->field(r, "region");
        if (find_region(d, region.id)) {
            L.errors.push_back(t->where(r) + ": duplicate region '" + region.id + "'");
            continue;
        }
        region.kick_start_eligible = L.boolean(*t, r, "kick_start_eligible").value_or(false);
        region.capacity_factor.assign(d.techs.size(), std::numeric_limits<double>::quiet_NaN());
        region.efficiency.assign(d.techs.size(), std::numeric_limits<double>::quiet_NaN());
        d.regions.push_back(std::move(region));
    }
    if (d.regions.empty()) {
        L.errors.emplace_back("regions.csv: no regions");
    }
}

void load_region_tech(Loader &L, Dataset &d) {
    auto t = L.table("region_tech.csv", kRegionTechColumns, true);
    if (t) {
        for (std::size_t r = 0; r < t->rows(); ++r) {
            std::size_t region = 0;
            std::size_t tech = 0;
            if (!resolve_ids(L, d, *t, r, region, &tech)) {
                continue;
            }
            const double cf = L.number(*t, r, "cf");
            const double ce = L.number(*t, r, "ce");
            if (!(cf > 0.0 && cf <= 1.0)) {
                L.errors.push_back(t->where(r) + ": capacity factor must lie in (0, 1]");
            }
            if (!(ce > 0.0)) {
                L.errors.push_back(t->where(r) + ": conversion efficiency must be > 0");
            }
            d.regions[region].capacity_factor[tech] = cf;
            d.regions[region].efficiency[tech] = ce;
        }
    }
    for (const auto &region : d.regions) {
        for (std::size_t k = 0; k < d.techs.size(); ++k) {
            if (std::isnan(region.capacity_factor[k]) || std::isnan(region.efficiency[k])) {
                L.errors.push_back("region_tech.csv: no row for region '" + region.id +
                                   "' and technology '" + d.techs[k].id + "'");
            }
        }
    }
}

void load_fuels(Loader &L, Dataset &d) {
    auto t = L.table("fuel_prices.csv", kFuelColumns, true);
    if (!t) {
        return;
    }
    std::vector<std::map<std::string, std::pair<YearMap, YearMap>>> raw(d.regions.size());
    const auto fuels = d.fuels();
    for (std::size_t r = 0; r < t->rows(); ++r) {
        std::size_t region = 0;
        if (!resolve_ids(L, d, *t, r, region, nullptr)) {
            continue;
        }
        const auto &fuel = t->field(r, "fuel");
        if (std::find(fuels.begin(), fuels.end(), fuel) == fuels.end()) {
            L.errors.push_back(t->where(r) + ": fuel '" + fuel + "' is used by no technology");
            continue;
        }
        const auto year = L.integer(*t, r, "year");
        const double price = L.number(*t, r, "price_eur_per_kwh");
        const double sd = L.number(*t, r, "sd");
        if (!(price >= 0.0) || !(sd >= 0.0)) {
            L.errors.push_back(t->where(r) + ": price and sd must be >= 0");
        }
        if (!year) {
            continue;
        }
        auto &entry = raw[region][fuel];
        if (!entry.first.emplace(*year, price).second) {
            L.errors.push_back(t->where(r) + ": duplicate price row");
        }
        entry.second.emplace(*year, sd);
    }
    for (std::size_t g = 0; g < d.regions.size(); ++g) {
        for (const auto &fuel : fuels) {
            const auto what = "fuel_prices.csv: region '" + d.regions[g].id + "' fuel '" + fuel + "'";
            const auto it = raw[g].find(fuel);
            if (it == raw[g].end()) {
                L.errors.push_back(what + ": no price rows");
                continue;
            }
            auto price = to_series(it->second.first, what, L.errors);
            auto sd = to_series(it->second.second, what, L.errors);
            if (price && sd) {
                d.regions[g].fuel_prices[fuel] = FuelSeries{*price, *sd};
            }
        }
    }
}

void load_shares(Loader &L, Dataset &d) {
    auto t = L.table("shares.csv", kShareColumns, true);
    if (!t) {
        return;
    }
    std::vector<std::map<int, std::vector<double>>> raw(d.regions.size());
    std::vector<std::map<int, std::vector<char>>> seen(d.regions.size());
    for (std::size_t r = 0; r < t->rows(); ++r) {
        std::size_t region = 0;
        std::size_t tech = 0;
        if (!resolve_ids(L, d, *t, r, region, &tech)) {
            continue;
        }
        const auto year = L.integer(*t, r, "year");
        const double share = L.number(*t, r, "share");
        if (!(share >= 0.0 && share <= 1.0)) {
            L.errors.push_back(t->where(r) + ": share must lie in [0, 1]");
        }
        if (!year) {
            continue;
        }
        auto &row = raw[region][*year];
        auto &flags = seen[region][*year];
        if (row.empty()) {
            row.assign(d.techs.size(), 0.0);
            flags.assign(d.techs.size(), 0);
        }
        if (flags[tech]) {
            L.errors.push_back(t->where(r) + ": duplicate share row");
        }
        flags[tech] = 1;
        row[tech] = share;
    }
    for (std::size_t g = 0; g < d.regions.size(); ++g) {
        auto &region = d.regions[g];
        if (raw[g].empty()) {
            L.errors.push_back("shares.csv: region '" + region.id + "' has no historical shares");
            continue;
        }
        int expected = raw[g].begin()->first;
        bool gap = false;
        for (const auto &[year, row] : raw[g]) {
            if (year != expected) {
                L.errors.push_back("shares.csv: region '" + region.id +
                                   "' has a gap in years before " + std::to_string(year));
                gap = true;
                break;
            }
            ++expected;
            double sum = 0.0;
            for (double v : row) {
                sum += v;
            }
            if (std::abs(sum - 1.0) > kShareSumTolerance) {
                std::ostringstream msg;
                msg << "shares.csv: shares of region '" << region.id << "' in year " << year
                    << " sum to " << std::setprecision(10) << sum;
                L.errors.push_back(msg.str());
            }
        }
        if (gap) {
            continue;
        }
        region.history.assign(d.techs.size(), YearSeries{raw[g].begin()->first, {}});
        for (const auto &[year, row] : raw[g]) {
            for (std::size_t k = 0; k < d.techs.size(); ++k) {
                region.history[k].values.push_back(row[k]);
            }
        }
    }
}

void load_demand(Loader &L, Dataset &d) {
    auto drivers = L.table("demand_drivers.csv", kDriverColumns, false);
    auto trajectory = L.table("demand_trajectory.csv", kTrajectoryColumns, false);
    if (drivers) {
        struct Raw {
            YearMap pop, floor, hdd, intensity, income, nb;
            std::optional<double> sat, half;
        };
        std::vector<Raw> raw(d.regions.size());
        for (std::size_t r = 0; r < drivers->rows(); ++r) {
            std::size_t region = 0;
            if (!resolve_ids(L, d, *drivers, r, region, nullptr)) {
                continue;
            }
            const auto year = L.integer(*drivers, r, "year");
            if (!year) {
                continue;
            }
            auto &x = raw[region];
            x.pop[*year] = L.number(*drivers, r, "population");
            x.floor[*year] = L.number(*drivers, r, "m2_per_cap");
            x.hdd[*year] = L.number(*drivers, r, "hdd");
            x.intensity[*year] = L.number(*drivers, r, "intensity_kj");
            x.income[*year] = L.number(*drivers, r, "income");
            x.nb[*year] = L.number(*drivers, r, "new_build_frac");
            const double sat = L.number(*drivers, r, "water_sat_kwh");
            const double half = L.number(*drivers, r, "water_half_sat_income");
            if ((x.sat && *x.sat != sat) || (x.half && *x.half != half)) {
                L.errors.push_back(drivers->where(r) +
                                   ": water parameters must be constant within a region");
            }
            x.sat = sat;
            x.half = half;
        }
        for (std::size_t g = 0; g < d.regions.size(); ++g) {
            auto &x = raw[g];
            if (x.pop.empty()) {
                continue;
            }
            const auto what = "demand_drivers.csv: region '" + d.regions[g].id + "'";
            demand::DemandDrivers dd;
            auto pop = to_series(x.pop, what, L.errors);
            if (!pop) {
                continue;
            }
            dd.population = *pop;
            dd.floor_per_capita = *to_series(x.floor, what, L.errors);
            dd.hdd = *to_series(x.hdd, what, L.errors);
            dd.heating_intensity = *to_series(x.intensity, what, L.errors);
            dd.income_per_capita = *to_series(x.income, what, L.errors);
            dd.new_build_fraction = *to_series(x.nb, what, L.errors);
            try {
                demand::validate(dd);
            } catch (const ValidationError &e) {
                for (const auto &v : e.violations()) {
                    L.errors.push_back(what + ": " + v);
                }
            }
            d.regions[g].water = {*x.sat, *x.half};
            if (!(*x.sat >= 0.0) || !(*x.half > 0.0)) {
                L.errors.push_back(what + ": water saturation must be >= 0 and half-saturation income > 0");
            }
            d.regions[g].drivers = std::move(dd);
        }
    }
    if (trajectory) {
        std::vector<std::pair<YearMap, YearMap>> raw(d.regions.size());
        for (std::size_t r = 0; r < trajectory->rows(); ++r) {
            std::size_t region = 0;
            if (!resolve_ids(L, d, *trajectory, r, region, nullptr)) {
                continue;
            }
            const auto year = L.integer(*trajectory, r, "year");
            const double ue = L.number(*trajectory, r, "ue_total_kwh");
            const double wf = L.number(*trajectory, r, "water_fraction");
            if (!(ue > 0.0)) {
                L.errors.push_back(trajectory->where(r) + ": ue_total_kwh must be > 0");
            }
            if (!(wf >= 0.0 && wf <= 1.0)) {
                L.errors.push_back(trajectory->where(r) + ": water_fraction must lie in [0, 1]");
            }
            if (year) {
                raw[region].first[*year] = ue;
                raw[region].second[*year] = wf;
            }
        }
        for (std::size_t g = 0; g < d.regions.size(); ++g) {
            if (raw[g].first.empty()) {
                continue;
            }
            const auto what = "demand_trajectory.csv: region '" + d.regions[g].id + "'";
            auto ue = to_series(raw[g].first, what, L.errors);
            auto wf = to_series(raw[g].second, what, L.errors);
            if (ue && wf) {
                d.regions[g].trajectory = demand::DemandTrajectory{*ue, *wf};
            }
        }
    }
    for (const auto &region : d.regions) {
        if (!region.drivers && !region.trajectory) {
            L.errors.push_back("region '" + region.id +
                               "' has neither demand drivers nor an ingested demand trajectory");
        }
    }
}

void load_grid(Loader &L, Dataset &d) {
    auto t = L.table("grid_intensity.csv", kGridColumns, true);
    if (!t) {
        return;
    }
    std::vector<std::map<scenario::PowerVariant, YearMap>> raw(d.regions.size());
    for (std::size_t r = 0; r < t->rows(); ++r) {
        std::size_t region = 0;
        if (!resolve_ids(L, d, *t, r, region, nullptr)) {
            continue;
        }
        scenario::PowerVariant variant{};
        try {
            variant = scenario::parse_power_variant(t->field(r, "variant"));
        } catch (const ValidationError &e) {
            L.errors.push_back(t->where(r) + ": " + e.what());
            continue;
        }
        const auto year = L.integer(*t, r, "year");
        const double v = L.number(*t, r, "kg_per_kwh");
        if (!(v >= 0.0)) {
            L.errors.push_back(t->where(r) + ": grid intensity must be >= 0");
        }
        if (year) {
            raw[region][variant][*year] = v;
        }
    }
    for (std::size_t g = 0; g < d.regions.size(); ++g) {
        for (auto variant : {scenario::PowerVariant::Decarbonisation15C,
                             scenario::PowerVariant::PowerBaseline}) {
            const auto what = "grid_intensity.csv: region '" + d.regions[g].id + "' variant " +
                              std::string{scenario::to_string(variant)};
            const auto it = raw[g].find(variant);
            if (it == raw[g].end()) {
                L.errors.push_back(what + ": no rows");
                continue;
            }
            if (auto s = to_series(it->second, what, L.errors)) {
                d.regions[g].grid_intensity[variant] = *s;
            }
        }
    }
}

void load_learning(Loader &L, Dataset &d) {
    auto t = L.table("learning.csv", kLearningColumns, false);
    if (!t) {
        return;
    }
    for (std::size_t r = 0; r < t->rows(); ++r) {
        const auto tech = find_tech(d, t->field(r, "tech_id"));
        if (!tech) {
            L.errors.push_back(t->where(r) + ": unknown technology '" + t->field(r, "tech_id") + "'");
            continue;
        }
        const double w = L.number(*t, r, "cumulative_capacity_kw");
        if (!(w > 0.0)) {
            L.errors.push_back(t->where(r) + ": cumulative capacity must be > 0");
        }
        d.reference_capacity[*tech] = w;
    }
}

void load_mask(Loader &L, Dataset &d) {
    auto t = L.table("mask.csv", kMaskColumns, false);
    if (!t) {
        return;
    }
    for (std::size_t r = 0; r < t->rows(); ++r) {
        const auto from = parse_tech_class(t->field(r, "from_class"));
        const auto to = parse_tech_class(t->field(r, "to_class"));
        const auto allowed = L.boolean(*t, r, "allowed");
        if (!from || !to) {
            L.errors.push_back(t->where(r) + ": unknown technology class");
            continue;
        }
        if (allowed) {
            d.mask.set(*from, *to, *allowed);
        }
    }
}

void load_gammas(Loader &L, Dataset &d, const fs::path &dir) {
    if (!fs::exists(dir / "gamma.csv")) {
        return;
    }
    try {
        d.gammas = read_gamma_csv(dir / "gamma.csv", d.techs, d.region_ids());
    } catch (const ValidationError &e) {
        for (const auto &v : e.violations()) {
            L.errors.push_back(v);
        }
    }
}

} // namespace

int RegionData::history_first_year() const {
    if (history.empty()) {
        throw ValidationError("region '" + id + "' has no history");
    }
    return history.front().first_year;
}

int RegionData::history_last_year() const {
    if (history.empty()) {
        throw ValidationError("region '" + id + "' has no history");
    }
    return history.front().last_year();
}

double RegionData::historical_share(std::size_t tech, int year) const {
    return history.at(tech).at(year);
}

bool RegionData::historically_present(std::size_t tech) const {
    const auto &v = history.at(tech).values;
    return std::any_of(v.begin(), v.end(), [](double s) { return s > 0.0; });
}

bool RegionData::district_present(const std::vector<Technology> &techs) const {
    for (std::size_t k = 0; k < techs.size() && k < history.size(); ++k) {
        if (techs[k].tech_class == TechClass::DistrictHeat && historically_present(k)) {
            return true;
        }
    }
    return false;
}

std::size_t Dataset::tech_index(const std::string &id) const {
    if (auto k = find_tech(*this, id)) {
        return *k;
    }
    throw NotFoundError("unknown technology '" + id + "'");
}

std::size_t Dataset::region_index(const std::string &id) const {
    if (auto k = find_region(*this, id)) {
        return *k;
    }
    throw NotFoundError("unknown region '" + id + "'");
}

std::vector<std::string> Dataset::region_ids() const {
    std::vector<std::string> out;
    for (const auto &r : regions) {
        out.push_back(r.id);
    }
    return out;
}

std::vector<std::string> Dataset::flagged_regions() const {
    std::vector<std::string> out;
    for (const auto &r : regions) {
        if (r.kick_start_eligible) {
            out.push_back(r.id);
        }
    }
    return out;
}

std::vector<std::string> Dataset::fuels() const {
    std::vector<std::string> out;
    for (const auto &t : techs) {
        if (std::find(out.begin(), out.end(), t.fuel) == out.end()) {
            out.push_back(t.fuel);
        }
    }
    return out;
}

std::map<std::string, double> Dataset::carbon_by_fuel() const {
    std::map<std::string, double> out;
    for (const auto &t : techs) {
        out.emplace(t.fuel, t.carbon_content);
    }
    return out;
}

Technology Dataset::regional_tech(std::size_t region, std::size_t tech) const {
    Technology t = techs.at(tech);
    t.efficiency = regions.at(region).efficiency.at(tech);
    return t;
}

Dataset load_dataset(const fs::path &dir) {
    if (!fs::is_directory(dir)) {
        throw ValidationError(dir.string() + ": not a dataset directory");
    }
    Loader L{dir};
    Dataset d;
    d.name = fs::absolute(dir).lexically_normal().filename().string();
    if (d.name.empty()) {
        d.name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
    }
    load_technologies(L, d);
    load_regions(L, d);
    if (!d.techs.empty() && !d.regions.empty()) {
        load_region_tech(L, d);
        load_fuels(L, d);
        load_shares(L, d);
        load_demand(L, d);
        load_grid(L, d);
        load_learning(L, d);
        load_mask(L, d);
        load_gammas(L, d, dir);
    }
    if (!L.errors.empty()) {
        throw ValidationError(std::move(L.errors));
    }
    d.content_hash = content_hash(dir);
    return d;
}

void write_dataset(const Dataset &d, const fs::path &dir) {
    fs::create_directories(dir);
    write_file(dir / "technologies.csv", [&](std::ostream &out) {
        csv::write_row(out, kTechColumns);
        for (std::size_t k = 0; k < d.techs.size(); ++k) {
            const auto &t = d.techs[k];
            csv::write_row(out, {t.id, std::string{to_string(t.tech_class)}, num(t.efficiency),
                                 num(t.lifetime), num(t.learning_rate), t.fuel,
                                 num(t.carbon_content), num(d.ic[k].mean), num(d.ic[k].sd),
                                 num(d.mr[k].mean), num(d.mr[k].sd),
                                 t.subsidy_eligible ? "true" : "false"});
        }
    });
    write_file(dir / "regions.csv", [&](std::ostream &out) {
        csv::write_row(out, kRegionColumns);
        for (const auto &r : d.regions) {
            csv::write_row(out, {r.id, r.kick_start_eligible ? "true" : "false"});
        }
    });
    write_file(dir / "region_tech.csv", [&](std::ostream &out) {
        csv::write_row(out, kRegionTechColumns);
        for (const auto &r : d.regions) {
            for (std::size_t k = 0; k < d.techs.size(); ++k) {
                csv::write_row(out, {r.id, d.techs[k].id, num(r.capacity_factor[k]),
                                     num(r.efficiency[k])});
            }
        }
    });
    write_file(dir / "fuel_prices.csv", [&](std::ostream &out) {
        csv::write_row(out, kFuelColumns);
        for (const auto &r : d.regions) {
            for (const auto &[fuel, s] : r.fuel_prices) {
                for (int y : s.price.years()) {
                    csv::write_row(out, {r.id, fuel, std::to_string(y), num(s.price.at(y)),
                                         num(s.sd.at(y))});
                }
            }
        }
    });
    write_file(dir / "shares.csv", [&](std::ostream &out) {
        csv::write_row(out, kShareColumns);
        for (const auto &r : d.regions) {
            for (std::size_t k = 0; k < d.techs.size(); ++k) {
                for (int y : r.history[k].years()) {
                    csv::write_row(out, {r.id, d.techs[k].id, std::to_string(y),
                                         num(r.history[k].at(y))});
                }
            }
        }
    });
    const bool any_drivers = std::any_of(d.regions.begin(), d.regions.end(),
                                         [](const RegionData &r) { return r.drivers.has_value(); });
    if (any_drivers) {
        write_file(dir / "demand_drivers.csv", [&](std::ostream &out) {
            csv::write_row(out, kDriverColumns);
            for (const auto &r : d.regions) {
                if (!r.drivers) {
                    continue;
                }
                const auto &x = *r.drivers;
                for (int y : x.population.years()) {
                    csv::write_row(out, {r.id, std::to_string(y), num(x.population.at(y)),
                                         num(x.floor_per_capita.at(y)), num(x.hdd.at(y)),
                                         num(x.heating_intensity.at(y)),
                                         num(x.income_per_capita.at(y)),
                                         num(x.new_build_fraction.at(y)),
                                         num(r.water.saturation_level),
                                         num(r.water.half_saturation_income)});
                }
            }
        });
    }
    const bool any_trajectory = std::any_of(
        d.regions.begin(), d.regions.end(),
        [](const RegionData &r) { return r.trajectory.has_value(); });
    if (any_trajectory) {
        write_file(dir / "demand_trajectory.csv", [&](std::ostream &out) {
            csv::write_row(out, kTrajectoryColumns);
            for (const auto &r : d.regions) {
                if (!r.trajectory) {
                    continue;
                }
                for (int y : r.trajectory->ue_total.years()) {
                    csv::write_row(out, {r.id, std::to_string(y),
                                         num(r.trajectory->ue_total.at(y)),
                                         num(r.trajectory->water_fraction.at(y))});
                }
            }
        });
    }
    write_file(dir / "grid_intensity.csv", [&](std::ostream &out) {
        csv::write_row(out, kGridColumns);
        for (const auto &r : d.regions) {
            for (const auto &[variant, s] : r.grid_intensity) {
                for (int y : s.years()) {
                    csv::write_row(out, {r.id, std::to_string(y),
                                         std::string{scenario::to_string(variant)}, num(s.at(y))});
                }
            }
        }
    });
    if (std::any_of(d.reference_capacity.begin(), d.reference_capacity.end(),
                    [](double w) { return w > 0.0; })) {
        write_file(dir / "learning.csv", [&](std::ostream &out) {
            csv::write_row(out, kLearningColumns);
            for (std::size_t k = 0; k < d.techs.size(); ++k) {
                if (d.reference_capacity[k] > 0.0) {
                    csv::write_row(out, {d.techs[k].id, num(d.reference_capacity[k])});
                }
            }
        });
    }
    write_file(dir / "mask.csv", [&](std::ostream &out) {
        csv::write_row(out, kMaskColumns);
        for (auto from : kAllTechClasses) {
            for (auto to : kAllTechClasses) {
                csv::write_row(out, {std::string{to_string(from)}, std::string{to_string(to)},
                                     d.mask.allowed(from, to) ? "true" : "false"});
            }
        }
    });
    if (d.gammas) {
        write_gamma_csv(*d.gammas, d.techs, dir / "gamma.csv");
    }
}

costs::GammaTable read_gamma_csv(const fs::path &path, const std::vector<Technology> &techs,
                                 const std::vector<std::string> &regions) {
    Loader L{path.parent_path()};
    auto t = L.table(path.filename().string(), kGammaColumns, true);
    costs::GammaTable table;
    for (const auto &r : regions) {
        table[r] = costs::GammaVector(techs.size());
    }
    if (t) {
        for (std::size_t r = 0; r < t->rows(); ++r) {
            const auto &region = t->field(r, "region");
            const auto &tech_id = t->field(r, "tech_id");
            const auto it = table.find(region);
            if (it == table.end()) {
                L.errors.push_back(t->where(r) + ": unknown region '" + region + "'");
                continue;
            }
            const auto tech = std::find_if(techs.begin(), techs.end(),
                                           [&](const Technology &x) { return x.id == tech_id; });
            if (tech == techs.end()) {
                L.errors.push_back(t->where(r) + ": unknown technology '" + tech_id + "'");
                continue;
            }
            const double cents = L.number(*t, r, "gamma_cent_per_kwh");
            costs::GammaEntry entry;
            entry.value = cents / units::kCentPerEuro;
            try {
                entry.provenance = costs::parse_gamma_provenance(t->field(r, "provenance"));
            } catch (const ValidationError &e) {
                L.errors.push_back(t->where(r) + ": " + e.what());
            }
            it->second[static_cast<std::size_t>(tech - techs.begin())] = entry;
        }
    }
    if (!L.errors.empty()) {
        throw ValidationError(std::move(L.errors));
    }
    return table;
}

void write_gamma_csv(const costs::GammaTable &gammas, const std::vector<Technology> &techs,
                     const fs::path &path) {
    write_file(path, [&](std::ostream &out) {
        csv::write_row(out, kGammaColumns);
        for (const auto &[region, vec] : gammas) {
            for (std::size_t k = 0; k < vec.size() && k < techs.size(); ++k) {
                csv::write_row(out, {region, techs[k].id,
                                     num(vec[k].value * units::kCentPerEuro),
                                     std::string{costs::to_string(vec[k].provenance)}});
            }
        }
    });
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(),
                                                                &EVP_MD_CTX_free};
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw Error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int k = 0; k < length; ++k) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
    }
    return hex.str();
}

} // namespace heatshift::io
