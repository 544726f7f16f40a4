#pragma once

// Small dense containers and Gaussian elimination, templated over the scalar
// so the same solver runs on plain doubles and on jets (exact derivatives of
// g^{-1} through the elimination).

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "finh/jet.hpp"

namespace finh {

using Vec = std::vector<double>;

// Rank-R tensor over an n-dimensional chart, stored flat, 0-based indices.
template <class T>
struct Matrix {
    int n = 0;
    std::vector<T> v;

    Matrix() = default;
    Matrix(int n, const T& init) : n(n), v(static_cast<size_t>(n) * n, init) {}
    T& operator()(int i, int j) { return v[static_cast<size_t>(i) * n + j]; }
    const T& operator()(int i, int j) const { return v[static_cast<size_t>(i) * n + j]; }
    double max_abs() const {
        double m = 0;
        for (const auto& a : v) m = std::max(m, std::abs(a));
        return m;
    }
};

using Mat = Matrix<double>;

struct Tensor3 {
    int n = 0;
    Vec v;
    explicit Tensor3(int n = 0) : n(n), v(static_cast<size_t>(n) * n * n, 0.0) {}
    double& operator()(int i, int j, int k) {
        return v[(static_cast<size_t>(i) * n + j) * n + k];
    }
    double operator()(int i, int j, int k) const {
        return v[(static_cast<size_t>(i) * n + j) * n + k];
    }
    double max_abs() const {
        double m = 0;
        for (double a : v) m = std::max(m, std::abs(a));
        return m;
    }
};

struct Tensor4 {
    int n = 0;
    Vec v;
    explicit Tensor4(int n = 0) : n(n), v(static_cast<size_t>(n) * n * n * n, 0.0) {}
    double& operator()(int i, int j, int k, int h) {
        return v[((static_cast<size_t>(i) * n + j) * n + k) * n + h];
    }
    double operator()(int i, int j, int k, int h) const {
        return v[((static_cast<size_t>(i) * n + j) * n + k) * n + h];
    }
    double max_abs() const {
        double m = 0;
        for (double a : v) m = std::max(m, std::abs(a));
        return m;
    }
};

struct Tensor5 {
    int n = 0;
    Vec v;
    explicit Tensor5(int n = 0) : n(n), v(static_cast<size_t>(n) * n * n * n * n, 0.0) {}
    double& operator()(int i, int j, int k, int h, int r) {
        return v[(((static_cast<size_t>(i) * n + j) * n + k) * n + h) * n + r];
    }
    double operator()(int i, int j, int k, int h, int r) const {
        return v[(((static_cast<size_t>(i) * n + j) * n + k) * n + h) * n + r];
    }
};

namespace detail {

inline double pivot_magnitude(double a) { return std::abs(a); }
inline double pivot_magnitude(const Jet& a) { return std::abs(a.value()); }

}  // namespace detail

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError() : std::runtime_error("singular matrix in linear solve") {}
};

// Solves A X = B in place for multiple right-hand sides; partial pivoting on
// the magnitude of the value part.
template <class T>
std::vector<std::vector<T>> solve(Matrix<T> a, std::vector<std::vector<T>> rhs) {
    int n = a.n;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = detail::pivot_magnitude(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            double m = detail::pivot_magnitude(a(r, col));
            if (m > best) { best = m; piv = r; }
        }
        if (best == 0.0) throw SingularMatrixError();
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a(piv, c), a(col, c));
            for (auto& b : rhs) std::swap(b[piv], b[col]);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            T f = a(r, col) / a(col, col);
            for (int c = col; c < n; ++c) a(r, c) = a(r, c) - f * a(col, c);
            for (auto& b : rhs) b[r] = b[r] - f * b[col];
        }
    }
    for (auto& b : rhs)
        for (int r = 0; r < n; ++r) b[r] = b[r] / a(r, r);
    return rhs;
}

template <class T>
std::vector<T> solve(const Matrix<T>& a, std::vector<T> b) {
    return solve(a, std::vector<std::vector<T>>{std::move(b)})[0];
}

inline Mat inverse(const Mat& a) {
    int n = a.n;
    std::vector<std::vector<double>> cols(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) cols[i][i] = 1.0;
    auto sol = solve(a, std::move(cols));
    Mat inv(n, 0.0);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) inv(r, c) = sol[c][r];
    return inv;
}

inline double norm1(const Mat& a) {
    double best = 0;
    for (int c = 0; c < a.n; ++c) {
        double s = 0;
        for (int r = 0; r < a.n; ++r) s += std::abs(a(r, c));
        best = std::max(best, s);
    }
    return best;
}

// 1-norm condition number; infinity when the matrix is numerically singular.
inline double condition_number(const Mat& a) {
    try {
        return norm1(a) * norm1(inverse(a));
    } catch (const SingularMatrixError&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace finh
