#pragma once

// Truncated polynomial arithmetic over nilpotent tagged infinitesimals
// (hyper-dual style). A jet with k tags carries 2^k coefficients indexed by
// subsets of the tag set; every tag squares to zero, so the coefficient of
// subset S in the lift of f equals the exact mixed partial of f along the
// seed directions of the tags in S.

#include <array>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "finh/expr.hpp"  // DomainError

namespace finh {

class Jet {
public:
    static constexpr int max_tags = 6;
    static constexpr int max_coeffs = 1 << max_tags;

    Jet() : tags_(0) { c_.fill(0.0); }
    explicit Jet(int tags, double value = 0.0) : tags_(tags) {
        assert(tags >= 0 && tags <= max_tags);
        c_.fill(0.0);
        c_[0] = value;
    }

    int tags() const { return tags_; }
    int size() const { return 1 << tags_; }

    double value() const { return c_[0]; }
    double coeff(unsigned mask) const { return c_[mask]; }
    double& coeff(unsigned mask) { return c_[mask]; }

    // Restriction to a tag subset: keep coefficients whose mask is contained
    // in `keep_mask` (bits relative to this jet), renumbering tags to the
    // bits of keep_mask in ascending order.
    Jet restricted(unsigned keep_mask) const {
        int kept = 0;
        std::array<int, max_tags> bits{};
        for (int t = 0; t < tags_; ++t)
            if (keep_mask & (1u << t)) bits[kept++] = t;
        Jet r(kept);
        for (unsigned m = 0; m < (1u << kept); ++m) {
            unsigned src = 0;
            for (int b = 0; b < kept; ++b)
                if (m & (1u << b)) src |= 1u << bits[b];
            r.c_[m] = c_[src];
        }
        return r;
    }

    // Slice: fix the tags of `fixed_mask` as present and drop them, leaving a
    // jet over the remaining tags. coeff(m) of the result is the coefficient
    // of (m-expanded | fixed_mask) in this jet. Extracts e.g. the jet of a
    // mixed partial over the remaining seed directions.
    Jet sliced(unsigned fixed_mask) const {
        int kept = 0;
        std::array<int, max_tags> bits{};
        for (int t = 0; t < tags_; ++t)
            if (!(fixed_mask & (1u << t))) bits[kept++] = t;
        Jet r(kept);
        for (unsigned m = 0; m < (1u << kept); ++m) {
            unsigned src = fixed_mask;
            for (int b = 0; b < kept; ++b)
                if (m & (1u << b)) src |= 1u << bits[b];
            r.c_[m] = c_[src];
        }
        return r;
    }

    Jet& operator+=(const Jet& o) {
        assert(tags_ == o.tags_);
        for (int i = 0; i < size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        assert(tags_ == o.tags_);
        for (int i = 0; i < size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        for (int i = 0; i < size(); ++i) c_[i] *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) {
        for (int i = 0; i < a.size(); ++i) a.c_[i] = -a.c_[i];
        return a;
    }
    friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

    // Subset-convolution product: c[m] = sum over s subset of m of a[s]*b[m\s].
    friend Jet operator*(const Jet& a, const Jet& b) {
        assert(a.tags_ == b.tags_);
        Jet r(a.tags_);
        int sz = a.size();
        for (unsigned m = 0; m < static_cast<unsigned>(sz); ++m) {
            double acc = 0.0;
            unsigned s = m;
            for (;;) {
                acc += a.c_[s] * b.c_[m ^ s];
                if (s == 0) break;
                s = (s - 1) & m;
            }
            r.c_[m] = acc;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
    friend Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

    // f(value + h) for nilpotent h, given the Taylor coefficients
    // f^(j)(value)/j! in `taylor[0..tags]`.
    static Jet apply_taylor(const Jet& a, const std::array<double, max_tags + 1>& taylor) {
        Jet h = a;
        h.c_[0] = 0.0;
        Jet r(a.tags_, taylor[a.tags_]);
        for (int j = a.tags_ - 1; j >= 0; --j) {
            r = r * h;
            r.c_[0] += taylor[j];
        }
        return r;
    }

    friend Jet reciprocal(const Jet& b) {
        double b0 = b.value();
        if (b0 == 0.0) throw DomainError("division by a jet with zero value part");
        std::array<double, max_tags + 1> t{};
        double p = 1.0 / b0;
        for (int j = 0; j <= b.tags_; ++j) {
            t[j] = p;
            p = -p / b0;
        }
        return apply_taylor(b, t);
    }

    friend Jet sqrt(const Jet& a) {
        double a0 = a.value();
        if (a0 <= 0.0)
            throw DomainError("sqrt of a jet with non-positive value part");
        std::array<double, max_tags + 1> t{};
        double c = std::sqrt(a0);
        double e = 0.5;
        for (int j = 0; j <= a.tags_; ++j) {
            t[j] = c;
            c = c * (e - j) / ((j + 1) * a0);
        }
        return apply_taylor(a, t);
    }

    // Integer power via binary exponentiation (valid for any value part).
    friend Jet powi(const Jet& a, long long e) {
        if (e < 0) return powi(reciprocal(a), -e);
        Jet r(a.tags_, 1.0);
        Jet base = a;
        while (e > 0) {
            if (e & 1) r = r * base;
            base = base * base;
            e >>= 1;
        }
        return r;
    }

    // Rational power a^(num/den); fractional exponents need a positive value
    // part.
    friend Jet pow_rational(const Jet& a, long long num, long long den) {
        if (den == 1) return powi(a, num);
        double a0 = a.value();
        if (a0 <= 0.0)
            throw DomainError("fractional power of a jet with non-positive value part");
        double e = static_cast<double>(num) / static_cast<double>(den);
        std::array<double, max_tags + 1> t{};
        double c = std::pow(a0, e);
        for (int j = 0; j <= a.tags_; ++j) {
            t[j] = c;
            c = c * (e - j) / ((j + 1) * a0);
        }
        return apply_taylor(a, t);
    }

private:
    int tags_;
    std::array<double, max_coeffs> c_;
};

}  // namespace finh
