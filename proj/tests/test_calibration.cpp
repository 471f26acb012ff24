#include "heatshift/calibration.hpp"
#include "heatshift/errors.hpp"
#include "heatshift/synthetic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

using namespace heatshift;
using namespace heatshift::calibration;

namespace {

YearSeries linear(double start, double slope, int first = 2008, int last = 2014) {
    YearSeries s{first, {}};
    for (int y = first; y <= last; ++y) {
        s.values.push_back(start + slope * (y - first));
    }
    return s;
}

std::shared_ptr<const io::Dataset> shared_synthetic() {
    static const auto data = std::make_shared<const io::Dataset>(testing::synthetic());
    return data;
}

} // namespace

TEST_SUITE("calibration") {

TEST_CASE("historical slope") {
    CHECK(historical_slope(linear(0.3, 0.0), 2014) == 0.0);
    CHECK(historical_slope(linear(0.2, 0.01), 2014) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(historical_slope(linear(0.2, -0.004), 2014, 3) == doctest::Approx(-0.004).epsilon(1e-12));
    CHECK_THROWS_AS(historical_slope(linear(0.2, 0.01, 2013, 2014), 2014), ValidationError);
    CHECK_THROWS_AS(historical_slope(linear(0.2, 0.01), 2030), ValidationError);
}

TEST_CASE("noisy slopes land within one standard error at the t-distribution rate") {
    std::mt19937_64 rng{7};
    std::normal_distribution<double> noise(0.0, 0.002);
    const int trials = 4000;
    int within = 0;
    double mean_error = 0.0;
    for (int t = 0; t < trials; ++t) {
        YearSeries s = linear(0.3, 0.01);
        for (auto &v : s.values) {
            v += noise(rng);
        }
        const double slope = historical_slope(s, 2014);
        const double intercept_year = 2012.0;
        double sse = 0.0;
        double sxx = 0.0;
        double my = 0.0;
        for (int y = 2010; y <= 2014; ++y) {
            my += s.at(y) / 5.0;
        }
        for (int y = 2010; y <= 2014; ++y) {
            const double fit = my + slope * (y - intercept_year);
            sse += (s.at(y) - fit) * (s.at(y) - fit);
            sxx += (y - intercept_year) * (y - intercept_year);
        }
        const double se = std::sqrt(sse / 3.0 / sxx);
        within += std::abs(slope - 0.01) <= se;
        mean_error += (slope - 0.01) / trials;
    }
    // Student t with 3 degrees of freedom: P(|T| <= 1) = 0.6090
    CHECK(static_cast<double>(within) / trials == doctest::Approx(0.6090).epsilon(0.04));
    CHECK(std::abs(mean_error) < 2e-4);
}

TEST_CASE("self-consistency: model-generated history gives back its gammas") {
    auto data = synthetic::base_dataset();
    const auto truth = synthetic::reference_gammas(data);
    const RunOptions options;
    synthetic::generate_history(data, truth, options);
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        const auto result = auto_calibrate(data, r, options);
        CHECK(result.diagnostics.converged);
        const auto &expected = truth.at(data.regions[r].id);
        const double shift = result.gamma[result.gauge_tech].value - expected[result.gauge_tech].value;
        double worst = 0.0;
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            if (result.active[k]) {
                worst = std::max(worst, std::abs(result.gamma[k].value - expected[k].value - shift));
            }
        }
        MESSAGE(data.regions[r].id << ": largest gamma error " << worst * 100.0 << " ct/kWh");
        CHECK(worst < 0.001);
        for (std::size_t k = 0; k < data.techs.size(); ++k) {
            if (result.active[k]) {
                CHECK(std::abs(result.diagnostics.residuals[k]) <= CalibrationConfig{}.tolerance);
                CHECK_FALSE(result.diagnostics.suspect[k]);
            }
        }
    }
}

TEST_CASE("calibration is deterministic") {
    const auto &data = testing::synthetic();
    const auto a = auto_calibrate(data, 2, RunOptions{});
    const auto b = auto_calibrate(data, 2, RunOptions{});
    CHECK(a.gamma == b.gamma);
    CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
}

TEST_CASE("a single-technology region has nothing to fit") {
    io::Dataset data = testing::synthetic();
    auto &region = data.regions[0];
    const auto gas = data.tech_index("gas");
    for (std::size_t k = 0; k < data.techs.size(); ++k) {
        for (auto &v : region.history[k].values) {
            v = k == gas ? 1.0 : 0.0;
        }
    }
    const auto result = auto_calibrate(data, 0, RunOptions{});
    CHECK(result.diagnostics.converged);
    CHECK(result.gauge_tech == gas);
    for (std::size_t k = 0; k < data.techs.size(); ++k) {
        CHECK(result.gamma[k].value == 0.0);
    }
}

TEST_CASE("gauge invariance") {
    const auto &data = testing::synthetic();
    const RunOptions options;
    for (std::size_t r = 0; r < data.regions.size(); ++r) {
        const auto gamma = data.gammas->at(data.regions[r].id).values();
        auto shifted = gamma;
        for (auto &g : shifted) {
            g += 0.013;
        }
        const auto a = handover_rates(data, r, gamma, options);
        const auto b = handover_rates(data, r, shifted, options);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(std::abs(a[k] - b[k]) < 1e-13);
        }
    }
}

TEST_CASE("session: override idempotence, revert and monotonicity") {
    const auto data = shared_synthetic();
    const std::size_t region = 1;
    CalibrationSession session{data, region, costs::GammaVector(data->techs.size()), RunOptions{}};
    const auto automatic = session.auto_calibrate();
    const auto after_auto = session.projection();
    CHECK(session.diagnostics().converged);

    const auto hp = data->tech_index("hp_air_water");
    const auto same = session.apply_gamma_override(hp, automatic.gamma[hp].value);
    CHECK(same == after_auto);
    CHECK(session.gamma()[hp].provenance == costs::GammaProvenance::Manual);

    const auto start = std::chrono::steady_clock::now();
    const auto raised = session.apply_gamma_override(hp, automatic.gamma[hp].value + 0.05);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    MESSAGE("override round trip: " << std::chrono::duration<double, std::milli>(elapsed).count() << " ms");
    CHECK(elapsed < std::chrono::milliseconds(200));
    CHECK(raised.simulated_slopes[hp] < after_auto.simulated_slopes[hp]);
    CHECK(raised.shares.back()[hp] < after_auto.shares.back()[hp]);
    CHECK(raised.years.size() == 8);

    const auto reverted = session.apply_gamma_override(hp, automatic.gamma[hp].value);
    CHECK(reverted == after_auto);
}

TEST_CASE("session errors") {
    const auto data = shared_synthetic();
    CalibrationSession session{data, 0, data->gammas->at("north"), RunOptions{}};
    CHECK_THROWS_AS(session.apply_gamma_override(99, 0.0), NotFoundError);
    CHECK_THROWS_AS(session.apply_gamma_override(0, NAN), ValidationError);
    session.close();
    CHECK_FALSE(session.is_open());
    CHECK_THROWS_AS(session.apply_gamma_override(0, 0.0), SessionError);
    CHECK_THROWS_AS(session.auto_calibrate(), SessionError);
    CHECK_THROWS_AS((CalibrationSession{data, 7, costs::GammaVector(data->techs.size()), RunOptions{}}), NotFoundError);
    CHECK_THROWS_AS((CalibrationSession{data, 0, costs::GammaVector(2), RunOptions{}}), ValidationError);
}

}
