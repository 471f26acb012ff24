#include "heatshift/dynamics.hpp"

#include "heatshift/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace heatshift::dynamics {
namespace {

constexpr int kMaxHalvings = 40;

void add_into(SquareMatrix &dst, const SquareMatrix &src) {
    for (std::size_t r = 0; r < dst.size(); ++r) {
        for (std::size_t c = 0; c < dst.size(); ++c) {
            dst(r, c) += src(r, c);
        }
    }
}

bool blocked(const Technology &tech, const RegionConstraints &constraints) {
    return tech.tech_class == TechClass::DistrictHeat && !constraints.district_present;
}

/// Moves `amount` of share into the technologies selected by `eligible`,
/// proportionally to their current shares or evenly when all are zero.
void distribute(std::vector<double> &shares, double amount, const std::vector<char> &eligible) {
    double base = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < shares.size(); ++k) {
        if (eligible[k]) {
            base += shares[k];
            ++count;
        }
    }
    if (count == 0) {
        return;
    }
    for (std::size_t k = 0; k < shares.size(); ++k) {
        if (!eligible[k]) {
            continue;
        }
        shares[k] += base > 0.0 ? amount * shares[k] / base : amount / static_cast<double>(count);
    }
}

void regular_and_scrap(std::span<const double> s, const StepInputs &in, double dt,
                       FlowReport &flows) {
    const std::size_t n = s.size();
    const auto &F = in.preferences.F;
    const auto &G = in.scrapping.G;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            if (in.preferences.permitted(i, j)) {
                flows.regular(j, i) = share_flow(s[i], s[j], F(i, j), in.lifetimes[j], dt);
            }
            if (in.scrapping.permitted(i, j)) {
                flows.scrap(i, j) = s[i] * s[j] * G(i, j) * in.scrap_rates[i] * dt;
            }
        }
    }
}

std::vector<double> apply_flows(std::span<const double> s, const FlowReport &flows) {
    const std::size_t n = s.size();
    std::vector<double> out(s.begin(), s.end());
    for (std::size_t from = 0; from < n; ++from) {
        for (std::size_t to = 0; to < n; ++to) {
            const double moved = flows.regular(from, to) + flows.scrap(from, to);
            out[from] -= moved;
            out[to] += moved;
        }
    }
    return out;
}

void check_inputs(const RegionState &state, const StepInputs &in) {
    const std::size_t n = state.shares.size();
    if (in.preferences.F.size() != n || in.scrapping.G.size() != n || in.lifetimes.size() != n ||
        in.scrap_rates.size() != n || in.techs.size() != n) {
        throw ValidationError("step inputs are inconsistent with the technology list");
    }
}

StepResult single_step(const RegionState &state, const StepInputs &in, double dt, int depth) {
    const std::size_t n = state.shares.size();
    FlowReport flows(n);
    regular_and_scrap(state.shares, in, dt, flows);
    auto shares = apply_flows(state.shares, flows);

    const bool negative = std::any_of(shares.begin(), shares.end(),
                                      [](double v) { return v < -kSimplexTolerance; });
    if (negative) {
        if (depth >= kMaxHalvings) {
            throw Error("share step did not stay on the simplex after repeated halving");
        }
        spdlog::debug("halving dt={} at year {}", dt, state.year);
        auto first = single_step(state, in, dt / 2.0, depth + 1);
        auto second = single_step(first.state, in, dt / 2.0, depth + 1);
        first.flows.accumulate(second.flows);
        first.flows.halvings += 1;
        second.state.year = state.year + dt;
        return {second.state, first.flows};
    }
    for (auto &v : shares) {
        v = std::max(v, 0.0);
    }

    if (in.kick_start != nullptr) {
        flows.kick_start = kick_start(shares, in.techs, *in.kick_start, dt, in.constraints);
        for (std::size_t k = 0; k < n; ++k) {
            shares[k] = std::max(0.0, shares[k] + flows.kick_start[k]);
        }
    }

    flows.solar_overflow = enforce_constraints(shares, in.techs, state.water_fraction,
                                               in.constraints);

    const double total = std::accumulate(shares.begin(), shares.end(), 0.0);
    if (!(total > 0.0)) {
        throw Error("shares vanished during a step");
    }
    for (auto &v : shares) {
        v /= total;
    }

    RegionState next = state;
    next.shares = std::move(shares);
    next.year = state.year + dt;
    return {std::move(next), std::move(flows)};
}

} // namespace

std::vector<double> FlowReport::net_regular() const {
    const std::size_t n = regular.size();
    std::vector<double> net(n, 0.0);
    for (std::size_t from = 0; from < n; ++from) {
        for (std::size_t to = 0; to < n; ++to) {
            net[from] -= regular(from, to);
            net[to] += regular(from, to);
        }
    }
    return net;
}

void FlowReport::accumulate(const FlowReport &other) {
    add_into(regular, other.regular);
    add_into(scrap, other.scrap);
    for (std::size_t k = 0; k < kick_start.size(); ++k) {
        kick_start[k] += other.kick_start[k];
        built_kw[k] += other.built_kw[k];
        scrapped_kw[k] += other.scrapped_kw[k];
    }
    solar_overflow += other.solar_overflow;
    halvings += other.halvings;
}

void validate(const SimConfig &config) {
    std::vector<std::string> errors;
    if (!(config.dt > 0.0 && config.dt <= 1.0)) {
        errors.emplace_back("dt must lie in (0, 1]");
    } else {
        const double steps = 1.0 / config.dt;
        if (std::abs(steps - std::round(steps)) > 1e-9) {
            errors.emplace_back("dt must divide one year");
        }
    }
    if (config.start_year >= config.end_year) {
        errors.emplace_back("start year must precede end year");
    }
    if (!(config.scrap_lifetime_factor > 0.0)) {
        errors.emplace_back("scrap lifetime factor must be > 0");
    }
    if (config.threads < 1) {
        errors.emplace_back("threads must be >= 1");
    }
    if (!errors.empty()) {
        throw ValidationError(std::move(errors));
    }
}

double share_flow(double s_i, double s_j, double f_ij, double lifetime_j, double dt) {
    return s_j * f_ij * s_i * dt / lifetime_j;
}

std::vector<double> share_rates(std::span<const double> shares, const StepInputs &inputs) {
    const std::size_t n = shares.size();
    FlowReport flows(n);
    regular_and_scrap(shares, inputs, 1.0, flows);
    const auto next = apply_flows(shares, flows);
    std::vector<double> rates(n);
    for (std::size_t k = 0; k < n; ++k) {
        rates[k] = next[k] - shares[k];
    }
    return rates;
}

std::vector<double> kick_start(std::span<const double> shares, std::span<const Technology> techs,
                               const KickStartOrder &order, double dt,
                               const RegionConstraints &constraints) {
    const std::size_t n = shares.size();
    std::vector<double> delta(n, 0.0);

    std::size_t source = n;
    for (std::size_t k = 0; k < n; ++k) {
        if (is_fossil(techs[k].tech_class) && shares[k] > 0.0 &&
            (source == n || shares[k] > shares[source])) {
            source = k;
        }
    }
    if (source == n) {
        spdlog::debug("kick-start skipped: no fossil share left");
        return delta;
    }

    std::vector<char> eligible(n, 0);
    double eligible_share = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto cls = techs[k].tech_class;
        if (std::find(order.classes.begin(), order.classes.end(), cls) != order.classes.end() &&
            !blocked(techs[k], constraints)) {
            eligible[k] = 1;
            eligible_share += shares[k];
        }
    }
    if (std::none_of(eligible.begin(), eligible.end(), [](char e) { return e != 0; })) {
        spdlog::debug("kick-start skipped: no eligible technology");
        return delta;
    }

    const double amount = std::min(order.rate_per_year * dt, shares[source]);
    delta[source] -= amount;
    if (eligible_share > 0.0) {
        for (std::size_t k = 0; k < n; ++k) {
            if (eligible[k]) {
                delta[k] += amount * shares[k] / eligible_share;
            }
        }
        return delta;
    }

    std::vector<TechClass> present;
    for (auto cls : order.classes) {
        for (std::size_t k = 0; k < n; ++k) {
            if (eligible[k] && techs[k].tech_class == cls) {
                present.push_back(cls);
                break;
            }
        }
    }
    const double per_class = amount / static_cast<double>(present.size());
    for (auto cls : present) {
        std::size_t members = 0;
        for (std::size_t k = 0; k < n; ++k) {
            members += eligible[k] && techs[k].tech_class == cls ? 1 : 0;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (eligible[k] && techs[k].tech_class == cls) {
                delta[k] += per_class / static_cast<double>(members);
            }
        }
    }
    return delta;
}

double enforce_constraints(std::vector<double> &shares, std::span<const Technology> techs,
                           double water_fraction, const RegionConstraints &constraints) {
    const std::size_t n = shares.size();
    double solar = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (techs[k].tech_class == TechClass::SolarThermal) {
            solar += shares[k];
        }
    }

    double overflow = 0.0;
    std::vector<char> receivers(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        receivers[k] = techs[k].tech_class != TechClass::SolarThermal &&
                       !blocked(techs[k], constraints);
    }
    const bool any_receiver = std::any_of(receivers.begin(), receivers.end(), [](char c) { return c != 0; });
    if (solar > water_fraction && any_receiver) {
        overflow = solar - water_fraction;
        const double scale = solar > 0.0 ? water_fraction / solar : 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (techs[k].tech_class == TechClass::SolarThermal) {
                shares[k] *= scale;
            }
        }
        distribute(shares, overflow, receivers);
    }

    if (!constraints.district_present) {
        double removed = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (techs[k].tech_class == TechClass::DistrictHeat) {
                removed += shares[k];
                shares[k] = 0.0;
            }
        }
        if (removed > 0.0) {
            distribute(shares, removed, receivers);
        }
    }
    return overflow;
}

StepResult step_shares(const RegionState &state, const StepInputs &inputs, double dt) {
    if (!(dt > 0.0)) {
        throw ValidationError("dt must be > 0");
    }
    check_inputs(state, inputs);
    return single_step(state, inputs, dt, 0);
}

void check_simplex(std::span<const double> shares) {
    double total = 0.0;
    for (std::size_t k = 0; k < shares.size(); ++k) {
        if (!(shares[k] >= 0.0)) {
            throw Error("negative share at index " + std::to_string(k));
        }
        total += shares[k];
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
        throw Error("shares sum to " + std::to_string(total));
    }
}

} // namespace heatshift::dynamics
