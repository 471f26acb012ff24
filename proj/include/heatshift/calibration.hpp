#pragma once

#include "heatshift/costs.hpp"
#include "heatshift/dataset.hpp"
#include "heatshift/results.hpp"
#include "heatshift/simulation.hpp"

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace heatshift::calibration {

/// OLS slope of a share series over the trailing `window` years ending at `end_year`.
double historical_slope(const YearSeries &shares, int end_year, int window = 5);

struct CalibrationConfig {
    int window = 5;
    double tolerance = 1e-4; // per year, per technology
    int max_iterations = 200;
    std::uint64_t seed = 42;
    double gamma_bound_factor = 2.0; // |gamma| <= factor * LCOH
    int projection_years = 8;
};

struct Diagnostics {
    bool converged = false;
    int iterations = 0;
    double max_abs_residual = 0.0;
    std::vector<double> residuals; // simulated minus historical slope, per technology
    std::vector<char> suspect;     // gamma ended on the search bound
};

struct CalibrationResult {
    costs::GammaVector gamma;
    Diagnostics diagnostics;
    std::vector<double> historical_slopes;
    std::vector<double> simulated_slopes;
    std::vector<char> active;
    std::size_t gauge_tech = 0;
};

/// Zero-policy dS/dt at the handover year for a given gamma slice.
std::vector<double> handover_rates(const io::Dataset &data, std::size_t region,
                                   std::span<const double> gamma, const RunOptions &options);

std::vector<double> historical_slopes(const io::Dataset &data, std::size_t region, int window);

/// Finds gamma so the simulated handover slopes meet the historical trend.
/// The largest-share technology is pinned at zero.
CalibrationResult auto_calibrate(const io::Dataset &data, std::size_t region,
                                 const RunOptions &options, const CalibrationConfig &config = {});

struct Projection {
    std::vector<int> years;
    Matrix2D shares;                   // [year][tech]
    std::vector<double> simulated_slopes;
    std::vector<double> residuals;

    bool operator==(const Projection &) const = default;
};

/// Zero-policy projection of one region from the handover year.
Projection project(const io::Dataset &data, std::size_t region, const costs::GammaVector &gamma,
                   const RunOptions &options, const CalibrationConfig &config);

/// Interactive override loop for one region. Single writer: every mutating call
/// takes the session lock.
class CalibrationSession {
public:
    CalibrationSession(std::shared_ptr<const io::Dataset> data, std::size_t region,
                       costs::GammaVector initial, RunOptions options,
                       CalibrationConfig config = {});

    std::size_t region() const noexcept { return region_; }
    costs::GammaVector gamma() const;
    Projection projection() const;
    Diagnostics diagnostics() const;
    std::vector<double> historical_slopes() const { return historical_; }

    /// Replaces one technology's gamma (EUR/kWh), re-projects, marks it manual.
    Projection apply_gamma_override(std::size_t tech, double value);
    /// Runs the automatic solver and adopts its gamma.
    CalibrationResult auto_calibrate();

    void close();
    bool is_open() const;

private:
    void require_open() const;
    Projection reproject_locked();

    std::shared_ptr<const io::Dataset> data_;
    std::size_t region_;
    RunOptions options_;
    CalibrationConfig config_;
    std::vector<double> historical_;
    mutable std::mutex mutex_;
    costs::GammaVector gamma_;
    Projection projection_;
    bool open_ = true;
};

} // namespace heatshift::calibration
