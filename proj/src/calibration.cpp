#include "heatshift/calibration.hpp"

#include "heatshift/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace heatshift::calibration {
namespace {

struct Problem {
    const io::Dataset &data;
    std::size_t region;
    const RunOptions &options;
    std::vector<std::size_t> free;   // technologies whose gamma is searched
    std::vector<std::size_t> active; // technologies whose slope is matched
    std::vector<double> target;      // historical slopes of the active set
    std::vector<double> bound;       // |gamma| limit per free technology
    std::size_t n = 0;

    std::vector<double> gamma_of(const Eigen::VectorXd &x) const {
        std::vector<double> g(n, 0.0);
        for (std::size_t k = 0; k < free.size(); ++k) {
            g[free[k]] = x[static_cast<Eigen::Index>(k)];
        }
        return g;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd &x) const {
        const auto rates = handover_rates(data, region, gamma_of(x), options);
        Eigen::VectorXd r(static_cast<Eigen::Index>(active.size()));
        for (std::size_t k = 0; k < active.size(); ++k) {
            r[static_cast<Eigen::Index>(k)] = rates[active[k]] - target[k];
        }
        return r;
    }

    void clamp(Eigen::VectorXd &x) const {
        for (std::size_t k = 0; k < free.size(); ++k) {
            auto &v = x[static_cast<Eigen::Index>(k)];
            v = std::clamp(v, -bound[k], bound[k]);
        }
    }
};

struct SolveResult {
    Eigen::VectorXd x;
    double max_abs = 0.0;
    int iterations = 0;
};

SolveResult levenberg_marquardt(const Problem &p, Eigen::VectorXd x, int max_iterations) {
    constexpr double kResidualFloor = 1e-13;
    const auto m = x.size();
    p.clamp(x);
    Eigen::VectorXd r = p.residual(x);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    for (; it < max_iterations && r.cwiseAbs().maxCoeff() > kResidualFloor; ++it) {
        Eigen::MatrixXd J(r.size(), m);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double h = 1e-7 * std::max(1.0, std::abs(x[k]) * 100.0);
            Eigen::VectorXd xh = x;
            xh[k] += h;
            J.col(k) = (p.residual(xh) - r) / h;
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index k = 0; k < m; ++k) {
                A(k, k) += lambda * std::max(JtJ(k, k), 1e-12);
            }
            Eigen::VectorXd step = A.ldlt().solve(g);
            for (Eigen::Index k = 0; k < m; ++k) {
                const double limit = 0.25 * p.bound[static_cast<std::size_t>(k)];
                step[k] = std::clamp(step[k], -limit, limit);
            }
            Eigen::VectorXd next = x - step;
            p.clamp(next);
            const Eigen::VectorXd rn = p.residual(next);
            const double cn = rn.squaredNorm();
            if (cn < cost) {
                x = next;
                r = rn;
                cost = cn;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!improved) {
            break;
        }
    }
    return {x, r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0, it};
}

std::vector<double> zero_policy_lcoh(const io::Dataset &data, std::size_t region, int year,
                                     const RunOptions &options) {
    std::vector<double> ic(data.techs.size());
    for (std::size_t k = 0; k < ic.size(); ++k) {
        ic[k] = data.ic[k].mean;
    }
    const std::vector<double> zero(data.techs.size(), 0.0);
    const auto c = region_costs(data, region, year, ic, costs::PolicyAtTime{}, zero, options);
    std::vector<double> out;
    for (const auto &l : c.lcoh) {
        out.push_back(l.mean);
    }
    return out;
}

} // namespace

double historical_slope(const YearSeries &shares, int end_year, int window) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (int y = end_year - window + 1; y <= end_year; ++y) {
        if (shares.covers(y)) {
            xs.push_back(y);
            ys.push_back(shares.at(y));
        }
    }
    if (xs.size() < 3) {
        throw ValidationError("slope window needs at least 3 data points, found " +
                              std::to_string(xs.size()));
    }
    const double nx = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= nx;
    my /= nx;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    return sxy / sxx;
}

std::vector<double> historical_slopes(const io::Dataset &data, std::size_t region, int window) {
    const auto &rd = data.regions.at(region);
    std::vector<double> out;
    for (std::size_t k = 0; k < data.techs.size(); ++k) {
        out.push_back(historical_slope(rd.history.at(k), rd.history_last_year(), window));
    }
    return out;
}

std::vector<double> handover_rates(const io::Dataset &data, std::size_t region,
                                   std::span<const double> gamma, const RunOptions &options) {
    const auto &rd = data.regions.at(region);
    const std::size_t n = data.techs.size();
    const int year = rd.history_last_year();
    std::vector<double> shares(n);
    std::vector<double> ic(n);
    std::vector<Technology> techs;
    std::vector<double> lifetimes;
    for (std::size_t k = 0; k < n; ++k) {
        shares[k] = rd.historical_share(k, year);
        ic[k] = data.ic[k].mean;
        techs.push_back(data.regional_tech(region, k));
        lifetimes.push_back(techs.back().lifetime);
    }
    const auto c = region_costs(data, region, year, ic, costs::PolicyAtTime{}, gamma, options);
    const auto available = availability(data, region, shares, nullptr);
    const auto F = choice::preference_matrix(c.gcoh, techs, data.mask, available);
    const auto G = options.sim.scrapping_enabled
                       ? choice::scrap_matrix(c.running, c.payback, techs, data.mask, available)
                       : choice::no_scrapping(n);
    const auto kappa = scrap_rates(data, options.sim);
    dynamics::StepInputs inputs{F, G, lifetimes, kappa, techs, nullptr,
                                {rd.district_present(data.techs)}};
    return dynamics::share_rates(shares, inputs);
}

CalibrationResult auto_calibrate(const io::Dataset &data, std::size_t region,
                                 const RunOptions &options, const CalibrationConfig &config) {
    const auto &rd = data.regions.at(region);
    const std::size_t n = data.techs.size();
    const int year = rd.history_last_year();

    CalibrationResult out;
    out.gamma = costs::GammaVector(n);
    out.historical_slopes = historical_slopes(data, region, config.window);
    out.active.assign(n, 0);

    std::size_t gauge = 0;
    for (std::size_t k = 0; k < n; ++k) {
        out.active[k] = rd.historical_share(k, year) > 0.0;
        if (rd.historical_share(k, year) > rd.historical_share(gauge, year)) {
            gauge = k;
        }
    }
    out.gauge_tech = gauge;

    Problem p{data, region, options, {}, {}, {}, {}, n};
    const auto lcoh = zero_policy_lcoh(data, region, year, options);
    for (std::size_t k = 0; k < n; ++k) {
        if (!out.active[k]) {
            continue;
        }
        p.active.push_back(k);
        p.target.push_back(out.historical_slopes[k]);
        if (k != gauge) {
            p.free.push_back(k);
            p.bound.push_back(config.gamma_bound_factor * lcoh[k]);
        }
    }

    Eigen::VectorXd best = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.free.size()));
    double best_err = 0.0;
    int iterations = 0;
    if (!p.free.empty()) {
        auto solved = levenberg_marquardt(p, best, config.max_iterations);
        iterations = solved.iterations;
        best = solved.x;
        best_err = solved.max_abs;
        const auto on_bound = [&](const Eigen::VectorXd &x) {
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                if (std::abs(x[k]) >= p.bound[static_cast<std::size_t>(k)]) {
                    return true;
                }
            }
            return false;
        };
        std::mt19937_64 rng{config.seed};
        const double tight = 1e-3 * config.tolerance;
        for (int restart = 0; restart < 4 && (best_err > tight || on_bound(best)); ++restart) {
            const bool stuck = on_bound(best);
            Eigen::VectorXd start = best;
            for (Eigen::Index k = 0; k < start.size(); ++k) {
                const double b = p.bound[static_cast<std::size_t>(k)];
                std::uniform_real_distribution<double> u(-0.5 * b, 0.5 * b);
                const double draw = u(rng);
                if (!stuck) {
                    start[k] = draw;
                } else if (std::abs(best[k]) >= b) {
                    start[k] = restart == 0 ? 0.0 : draw;
                }
            }
            auto retry = levenberg_marquardt(p, start, config.max_iterations);
            iterations += retry.iterations;
            if (retry.max_abs < best_err || (on_bound(best) && !on_bound(retry.x) &&
                                             retry.max_abs <= config.tolerance)) {
                best = retry.x;
                best_err = retry.max_abs;
            }
        }
    }

    const auto gamma = p.gamma_of(best);
    for (std::size_t k = 0; k < n; ++k) {
        out.gamma[k].value = gamma[k];
        out.gamma[k].provenance =
            out.active[k] ? costs::GammaProvenance::Calibrated : costs::GammaProvenance::Zero;
    }
    out.simulated_slopes = handover_rates(data, region, gamma, options);

    auto &d = out.diagnostics;
    d.iterations = iterations;
    d.residuals.resize(n);
    d.suspect.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        d.residuals[k] = out.simulated_slopes[k] - out.historical_slopes[k];
        if (out.active[k]) {
            d.max_abs_residual = std::max(d.max_abs_residual, std::abs(d.residuals[k]));
        }
    }
    for (std::size_t k = 0; k < p.free.size(); ++k) {
        if (std::abs(std::abs(gamma[p.free[k]]) - p.bound[k]) <= 1e-12 * std::max(1.0, p.bound[k])) {
            d.suspect[p.free[k]] = 1;
        }
    }
    d.converged = d.max_abs_residual <= config.tolerance;
    return out;
}

Projection project(const io::Dataset &data, std::size_t region, const costs::GammaVector &gamma,
                   const RunOptions &options, const CalibrationConfig &config) {
    const auto &rd = data.regions.at(region);
    io::Dataset single = data;
    single.regions = {rd};
    single.gammas.reset();

    RunOptions local = options;
    local.sim.start_year = rd.history_last_year();
    local.sim.end_year = local.sim.start_year + config.projection_years - 1;
    local.sim.threads = 1;

    scenario::ScenarioSpec spec;
    spec.id = "projection";
    spec.demand_variant = demand::DemandVariant::baseline();
    const auto run = simulate_run(single, spec, local, {{rd.id, gamma}});

    Projection p;
    p.years = run.years;
    p.shares = run.regions.front().shares;
    p.simulated_slopes = handover_rates(data, region, gamma.values(), options);
    const auto hist = historical_slopes(data, region, config.window);
    for (std::size_t k = 0; k < hist.size(); ++k) {
        p.residuals.push_back(p.simulated_slopes[k] - hist[k]);
    }
    return p;
}

CalibrationSession::CalibrationSession(std::shared_ptr<const io::Dataset> data, std::size_t region,
                                       costs::GammaVector initial, RunOptions options,
                                       CalibrationConfig config)
    : data_{std::move(data)}, region_{region}, options_{std::move(options)},
      config_{config}, gamma_{std::move(initial)} {
    if (!data_ || region_ >= data_->regions.size()) {
        throw NotFoundError("calibration session needs a loaded dataset and a valid region");
    }
    if (gamma_.size() != data_->techs.size()) {
        throw ValidationError("gamma vector does not match the technology list");
    }
    historical_ = calibration::historical_slopes(*data_, region_, config_.window);
    projection_ = reproject_locked();
}

costs::GammaVector CalibrationSession::gamma() const {
    std::lock_guard lock{mutex_};
    return gamma_;
}

Projection CalibrationSession::projection() const {
    std::lock_guard lock{mutex_};
    return projection_;
}

Diagnostics CalibrationSession::diagnostics() const {
    std::lock_guard lock{mutex_};
    Diagnostics d;
    d.residuals = projection_.residuals;
    d.suspect.assign(d.residuals.size(), 0);
    const auto &rd = data_->regions[region_];
    for (std::size_t k = 0; k < d.residuals.size(); ++k) {
        if (rd.historical_share(k, rd.history_last_year()) > 0.0) {
            d.max_abs_residual = std::max(d.max_abs_residual, std::abs(d.residuals[k]));
        }
    }
    d.converged = d.max_abs_residual <= config_.tolerance;
    return d;
}

Projection CalibrationSession::apply_gamma_override(std::size_t tech, double value) {
    std::lock_guard lock{mutex_};
    require_open();
    if (tech >= gamma_.size()) {
        throw NotFoundError("technology index out of range");
    }
    if (!std::isfinite(value)) {
        throw ValidationError("gamma must be finite");
    }
    gamma_[tech] = {value, costs::GammaProvenance::Manual};
    projection_ = reproject_locked();
    return projection_;
}

CalibrationResult CalibrationSession::auto_calibrate() {
    std::lock_guard lock{mutex_};
    require_open();
    auto result = calibration::auto_calibrate(*data_, region_, options_, config_);
    gamma_ = result.gamma;
    projection_ = reproject_locked();
    return result;
}

void CalibrationSession::close() {
    std::lock_guard lock{mutex_};
    open_ = false;
}

bool CalibrationSession::is_open() const {
    std::lock_guard lock{mutex_};
    return open_;
}

void CalibrationSession::require_open() const {
    if (!open_) {
        throw SessionError("calibration session is closed");
    }
}

Projection CalibrationSession::reproject_locked() {
    return project(*data_, region_, gamma_, options_, config_);
}

} // namespace heatshift::calibration
