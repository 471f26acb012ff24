#pragma once

#include "heatshift/dataset.hpp"
#include "heatshift/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Independent reference implementations and shared fixtures for the test suites.

namespace heatshift::testing {

/// P(C_i < C_j) for independent Normal costs by composite Simpson quadrature of
/// ∫ f_i(x) P(C_j > x) dx.
double choice_integral(double mean_i, double sd_i, double mean_j, double sd_j);

/// Share of `draws` simulated households whose cost of i undercuts j.
double household_draws(double mean_i, double sd_i, double mean_j, double sd_j,
                       std::uint64_t draws, std::uint64_t seed);

/// Discrete-agent replacement model: each owner of j reaches end of life with
/// probability dt/τ_j, meets a random peer's technology i and switches with
/// probability F(i, j). Returns shares at every whole year, year 0 included.
std::vector<std::vector<double>> agent_simulation(const SquareMatrix &F,
                                                  const std::vector<double> &lifetimes,
                                                  const std::vector<double> &initial,
                                                  std::size_t agents, double dt, int years,
                                                  std::uint64_t seed);

/// Solution of S' = r S (1 - S).
double logistic(double s0, double rate, double t);

/// Year-by-year discounted cash-flow LCOH per kWh_th over t = 0..lifetime.
double spreadsheet_lcoh(double ic, double mr, double fuel_price, double efficiency, double cf,
                        double r, int lifetime);

/// The shipped synthetic dataset, loaded once.
const io::Dataset &synthetic();

std::filesystem::path data_dir();

/// Fresh empty directory under the system temp path.
std::filesystem::path temp_dir(const std::string &name);

std::string read_file(const std::filesystem::path &path);

} // namespace heatshift::testing
