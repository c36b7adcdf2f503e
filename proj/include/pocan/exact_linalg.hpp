#pragma once

#include "pocan/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace pocan {

/// Dense row-major matrix of rationals.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RatMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<Rational> operator*(const std::vector<Rational>& x) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Solves a square system by Gaussian elimination; nullopt if singular.
std::optional<std::vector<Rational>> solve_exact(RatMatrix a, std::vector<Rational> b);

std::size_t rank_exact(RatMatrix a);

}  // namespace pocan
