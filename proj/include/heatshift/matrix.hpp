#pragma once

#include <cstddef>
#include <vector>

namespace heatshift {

/// Dense row-major n x n matrix of doubles.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_{n}, data_(n * n, fill) {}

    std::size_t size() const noexcept { return n_; }
    double &operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
    double operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }
    const std::vector<double> &data() const noexcept { return data_; }

    bool operator==(const SquareMatrix &) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

} // namespace heatshift
