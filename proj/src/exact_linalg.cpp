#include "pocan/exact_linalg.hpp"

#include <stdexcept>
#include <utility>

namespace pocan {

RatMatrix RatMatrix::identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

std::vector<Rational> RatMatrix::operator*(const std::vector<Rational>& x) const {
    if (x.size() != cols_) throw std::invalid_argument("RatMatrix: dimension mismatch");
    std::vector<Rational> y(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        Rational acc;
        for (std::size_t c = 0; c < cols_; ++c) {
            if (sgn((*this)(r, c)) != 0) acc += (*this)(r, c) * x[c];
        }
        y[r] = acc;
    }
    return y;
}

std::optional<std::vector<Rational>> solve_exact(RatMatrix a, std::vector<Rational> b) {
    const auto n = a.rows();
    if (a.cols() != n || b.size() != n) throw std::invalid_argument("solve_exact: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && sgn(a(pivot, col)) == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        const Rational inv = 1 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (sgn(a(r, col)) == 0) continue;
            const Rational factor = a(r, col) * inv;
            for (std::size_t c = col; c < n; ++c) {
                if (sgn(a(col, c)) != 0) a(r, c) -= factor * a(col, c);
            }
            b[r] -= factor * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = n; i-- > 0;) {
        Rational acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            if (sgn(a(i, c)) != 0) acc -= a(i, c) * x[c];
        }
        x[i] = acc / a(i, i);
    }
    return x;
}

std::size_t rank_exact(RatMatrix a) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < a.cols() && rank < a.rows(); ++col) {
        std::size_t pivot = rank;
        while (pivot < a.rows() && sgn(a(pivot, col)) == 0) ++pivot;
        if (pivot == a.rows()) continue;
        for (std::size_t c = 0; c < a.cols(); ++c) std::swap(a(pivot, c), a(rank, c));
        for (std::size_t r = rank + 1; r < a.rows(); ++r) {
            if (sgn(a(r, col)) == 0) continue;
            const Rational factor = a(r, col) / a(rank, col);
            for (std::size_t c = col; c < a.cols(); ++c) a(r, c) -= factor * a(rank, c);
        }
        ++rank;
    }
    return rank;
}

}  // namespace pocan
