#include "support.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace heatshift::testing {

double choice_integral(double mean_i, double sd_i, double mean_j, double sd_j) {
    const auto survival_j = [&](double x) {
        if (sd_j == 0.0) {
            return x < mean_j ? 1.0 : (x == mean_j ? 0.5 : 0.0);
        }
        return 0.5 * std::erfc((x - mean_j) / (sd_j * std::numbers::sqrt2));
    };
    if (sd_i == 0.0) {
        return survival_j(mean_i);
    }
    const double lo = mean_i - 12.0 * sd_i;
    const double hi = mean_i + 12.0 * sd_i;
    const int n = 20000;
    const double h = (hi - lo) / n;
    const double norm = 1.0 / (sd_i * std::sqrt(2.0 * std::numbers::pi));
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double x = lo + h * k;
        const double z = (x - mean_i) / sd_i;
        const double f = norm * std::exp(-0.5 * z * z) * survival_j(x);
        const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        sum += w * f;
    }
    return sum * h / 3.0;
}

double household_draws(double mean_i, double sd_i, double mean_j, double sd_j,
                       std::uint64_t draws, std::uint64_t seed) {
    std::mt19937_64 rng{seed};
    std::normal_distribution<double> ci(mean_i, sd_i);
    std::normal_distribution<double> cj(mean_j, sd_j);
    std::uint64_t wins = 0;
    for (std::uint64_t k = 0; k < draws; ++k) {
        if (ci(rng) < cj(rng)) {
            ++wins;
        }
    }
    return static_cast<double>(wins) / static_cast<double>(draws);
}

std::vector<std::vector<double>> agent_simulation(const SquareMatrix &F,
                                                  const std::vector<double> &lifetimes,
                                                  const std::vector<double> &initial,
                                                  std::size_t agents, double dt, int years,
                                                  std::uint64_t seed) {
    const std::size_t n = initial.size();
    std::vector<std::size_t> owner(agents);
    std::size_t next = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto count = static_cast<std::size_t>(std::llround(initial[t] * static_cast<double>(agents)));
        for (std::size_t k = 0; k < count && next < agents; ++k) {
            owner[next++] = t;
        }
    }
    for (; next < agents; ++next) {
        owner[next] = n - 1;
    }

    std::mt19937_64 rng{seed};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, agents - 1);
    const auto shares = [&] {
        std::vector<double> s(n, 0.0);
        for (const auto t : owner) {
            s[t] += 1.0;
        }
        for (auto &v : s) {
            v /= static_cast<double>(agents);
        }
        return s;
    };

    std::vector<std::vector<double>> out{shares()};
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int y = 0; y < years; ++y) {
        for (int s = 0; s < steps; ++s) {
            const auto before = owner;
            for (std::size_t a = 0; a < agents; ++a) {
                const auto j = before[a];
                if (u(rng) >= dt / lifetimes[j]) {
                    continue;
                }
                const auto i = before[pick(rng)];
                if (i != j && u(rng) < F(i, j)) {
                    owner[a] = i;
                }
            }
        }
        out.push_back(shares());
    }
    return out;
}

double logistic(double s0, double rate, double t) {
    return 1.0 / (1.0 + (1.0 - s0) / s0 * std::exp(-rate * t));
}

double spreadsheet_lcoh(double ic, double mr, double fuel_price, double efficiency, double cf,
                        double r, int lifetime) {
    const double hours = 8766.0 * cf;
    double cost = 0.0;
    double energy = 0.0;
    for (int t = 0; t <= lifetime; ++t) {
        const double discount = 1.0 / std::pow(1.0 + r, t);
        double cash = mr + fuel_price * hours / efficiency;
        if (t == 0) {
            cash += ic;
        }
        cost += cash * discount;
        energy += hours * discount;
    }
    return cost / energy;
}

std::filesystem::path data_dir() { return HEATSHIFT_DATA_DIR; }

const io::Dataset &synthetic() {
    static const io::Dataset data = io::load_dataset(data_dir());
    return data;
}

std::filesystem::path temp_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("heatshift-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace heatshift::testing
