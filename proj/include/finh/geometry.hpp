#pragma once

// Pointwise evaluation of every tensor built from a Finsler metric F at a
// chart point: metric tensor, Cartan ladder, geodesic spray, nonlinear and
// Berwald connections, the covariant-coefficient ladder H_i..H_ijkh, the
// Landsberg functions, and the scalar candidates. Everything is numeric;
// closed forms live in the spherical module and the test oracles.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finh/eval.hpp"
#include "finh/expr.hpp"
#include "finh/linalg.hpp"

namespace finh {

class NotFinslerPointError : public std::runtime_error {
public:
    explicit NotFinslerPointError(double cond)
        : std::runtime_error("not a Finsler point: metric tensor condition number " +
                             std::to_string(cond)),
          condition(cond) {}
    double condition;
};

struct MetricContext {
    int n = 0;
    Expr F;
    Expr F2;  // pow_of(F, 2)
    Params params;
    std::optional<Expr> domain;  // sample sites must make this positive

    static MetricContext from_text(const std::string& metric_text, int n,
                                   Params params = {},
                                   std::optional<std::string> domain_text = {}) {
        MetricContext ctx;
        ctx.n = n;
        ctx.F = parse_metric(metric_text, n);
        ctx.F2 = pow_of(ctx.F, 2);
        ctx.params = std::move(params);
        if (domain_text) ctx.domain = parse_metric(*domain_text, n);
        return ctx;
    }
};

inline bool point_in_domain(const MetricContext& ctx, const ChartPoint& p) {
    double y2 = 0;
    for (double v : p.y) y2 += v * v;
    if (y2 == 0) return false;
    if (ctx.domain) {
        try {
            if (evaluate(*ctx.domain, make_env(p, ctx.params)) <= 0) return false;
        } catch (const DomainError&) {
            return false;
        }
    }
    return true;
}

// Scaled residual: |residual| / max(1, largest constituent magnitude).
inline double scaled_residual(double resid, std::initializer_list<double> terms) {
    double scale = 1.0;
    for (double t : terms) scale = std::max(scale, std::abs(t));
    return std::abs(resid) / scale;
}

// ---- cached mixed partials of one expression at one point ------------------

// pos: kNoPos for none, 0..n-1 for a unit position direction, kSprayDir for
// the y^r dx_r contraction (the position tag seeded along y).
class PartialCache {
public:
    static constexpr int kNoPos = -1;
    static constexpr int kSprayDir = -2;

    PartialCache(const Expr& e, const ChartPoint& p, const Params& params)
        : e_(&e), p_(&p), params_(&params) {}

    // fiber: 0-based fiber indices (a multiset, any order).
    double operator()(std::vector<int> fiber, int pos = kNoPos) const {
        std::sort(fiber.begin(), fiber.end());
        auto key = std::make_pair(fiber, pos);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        int k = static_cast<int>(fiber.size()) + (pos != kNoPos ? 1 : 0);
        JetPoint jp(*p_, *params_, k);
        int t = 0;
        for (int f : fiber) jp.seed(t++, VarRef{VarKind::fiber, f + 1});
        if (pos == kSprayDir) {
            jp.seed_position_direction(t++, p_->y);
        } else if (pos != kNoPos) {
            jp.seed(t++, VarRef{VarKind::position, pos + 1});
        }
        double v = jet_evaluate(*e_, jp).coeff((1u << k) - 1);
        cache_.emplace(std::move(key), v);
        return v;
    }

private:
    const Expr* e_;
    const ChartPoint* p_;
    const Params* params_;
    mutable std::map<std::pair<std::vector<int>, int>, double> cache_;
};

// ---- evaluated tensors -----------------------------------------------------

struct PointGeometry {
    int n = 0;
    ChartPoint point;

    double F = 0;
    double E = 0;
    Vec ell;           // l_i = dF/dy^i
    Mat g;             // g_ij
    Mat ginv;          // g^ij
    double g_condition = 0;
    Vec y_flat_g;      // g_ij y^j
    Vec y_flat_delta;  // delta_ij y^j

    Tensor3 C3;  // C_ijk
    Tensor4 C4;  // C_ijkh
    Tensor5 C5;  // C_ijkhr

    Vec G;        // spray coefficients G^i
    Mat N;        // N^i_j
    Tensor3 Gc;   // Berwald connection G^i_jk
    Tensor4 Gb;   // Berwald curvature functions G^i_jkh

    Vec H;        // covariant coefficients H_i
    Mat Hij;
    Tensor3 Hijk;
    Tensor4 Hijkh;
    Tensor3 Hup;  // H^i_jk = g^{ri} H_rjk
    Tensor3 L;    // Landsberg functions y^i H_ijkh

    Tensor3 gamma;  // formal Christoffel symbols of g

    double H_scalar_candidate = 0;  // (1/12) y^i dF^2/dx^i
    double K_candidate = 0;         // -2 H_scalar_candidate

    double P = 0;  // projective factor candidate (y^i dF/dx^i) / (2F)
    Vec Pj;
    Mat Pjk;
};

struct GeometryOptions {
    double cond_max = 1e12;
    bool with_connections = true;  // jet solves for N, G^i_jk, G^i_jkh, P_j, P_jk
};

namespace detail {

// Jet of y^r at a point where fiber tags are seeded along unit directions.
inline Jet fiber_component_jet(const ChartPoint& p, int r,
                               const std::vector<int>& seeded_fibers) {
    Jet j(static_cast<int>(seeded_fibers.size()), p.y[r]);
    for (size_t t = 0; t < seeded_fibers.size(); ++t)
        if (seeded_fibers[t] == r) j.coeff(1u << t) += 1.0;
    return j;
}

}  // namespace detail

// Spray and covariant coefficients only (used for homogeneity-scaling checks
// and the sampler's degeneracy probe).
struct SprayData {
    double F = 0;
    Mat g;
    double g_condition = 0;
    Vec H;
    Vec G;
};

inline SprayData compute_spray(const MetricContext& ctx, const ChartPoint& p,
                               const GeometryOptions& opts = {}) {
    int n = ctx.n;
    PartialCache dF2(ctx.F2, p, ctx.params);
    SprayData s;
    s.F = evaluate(ctx.F, make_env(p, ctx.params));
    s.g = Mat(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            s.g(i, j) = s.g(j, i) = 0.5 * dF2({i, j});
    s.g_condition = condition_number(s.g);
    if (!(s.g_condition < opts.cond_max)) throw NotFinslerPointError(s.g_condition);
    s.H.resize(n);
    for (int i = 0; i < n; ++i)
        s.H[i] = 0.25 * (dF2({i}, PartialCache::kSprayDir) - dF2({}, i));
    s.G = solve(s.g, s.H);
    return s;
}

inline PointGeometry compute_geometry(const MetricContext& ctx, const ChartPoint& p,
                                      const GeometryOptions& opts = {}) {
    const int n = ctx.n;
    if (p.dimension() != n)
        throw DimensionError("point dimension does not match metric dimension");
    PartialCache dF2(ctx.F2, p, ctx.params);
    PartialCache dF(ctx.F, p, ctx.params);

    PointGeometry geo;
    geo.n = n;
    geo.point = p;
    geo.F = evaluate(ctx.F, make_env(p, ctx.params));
    geo.E = 0.5 * geo.F * geo.F;

    geo.ell.resize(n);
    for (int i = 0; i < n; ++i) geo.ell[i] = dF({i});

    geo.g = Mat(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            geo.g(i, j) = geo.g(j, i) = 0.5 * dF2({i, j});
    geo.g_condition = condition_number(geo.g);
    if (!(geo.g_condition < opts.cond_max)) throw NotFinslerPointError(geo.g_condition);
    geo.ginv = inverse(geo.g);

    geo.y_flat_g.resize(n);
    geo.y_flat_delta = p.y;
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += geo.g(i, j) * p.y[j];
        geo.y_flat_g[i] = s;
    }

    // Cartan ladder (totally symmetric: fill from sorted index tuples).
    geo.C3 = Tensor3(n);
    geo.C4 = Tensor4(n);
    geo.C5 = Tensor5(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                double c = 0.25 * dF2({i, j, k});
                int idx[3] = {i, j, k};
                std::sort(idx, idx + 3);
                do geo.C3(idx[0], idx[1], idx[2]) = c;
                while (std::next_permutation(idx, idx + 3));
                for (int h = k; h < n; ++h) {
                    double c4 = 0.25 * dF2({i, j, k, h});
                    int id4[4] = {i, j, k, h};
                    do geo.C4(id4[0], id4[1], id4[2], id4[3]) = c4;
                    while (std::next_permutation(id4, id4 + 4));
                    for (int r = h; r < n; ++r) {
                        double c5 = 0.25 * dF2({i, j, k, h, r});
                        int id5[5] = {i, j, k, h, r};
                        do geo.C5(id5[0], id5[1], id5[2], id5[3], id5[4]) = c5;
                        while (std::next_permutation(id5, id5 + 5));
                    }
                }
            }

    // H-ladder straight from the defining formula
    //   H_i = (1/4)(y^r d/dx^r dF2/dy^i - dF2/dx^i)
    // and its fiber derivatives (the y^r coefficient differentiates too).
    geo.H.resize(n);
    geo.Hij = Mat(n, 0.0);
    geo.Hijk = Tensor3(n);
    geo.Hijkh = Tensor4(n);
    constexpr int SD = PartialCache::kSprayDir;
    for (int i = 0; i < n; ++i) {
        geo.H[i] = 0.25 * (dF2({i}, SD) - dF2({}, i));
        for (int j = 0; j < n; ++j) {
            geo.Hij(i, j) = 0.25 * (dF2({i}, j) + dF2({i, j}, SD) - dF2({j}, i));
            for (int k = j; k < n; ++k) {
                double hijk = 0.25 * (dF2({i, k}, j) + dF2({i, j}, k) +
                                      dF2({i, j, k}, SD) - dF2({j, k}, i));
                geo.Hijk(i, j, k) = geo.Hijk(i, k, j) = hijk;
                for (int h = k; h < n; ++h) {
                    double v = 0.25 * (dF2({i, k, h}, j) + dF2({i, j, h}, k) +
                                       dF2({i, j, k}, h) + dF2({i, j, k, h}, SD) -
                                       dF2({j, k, h}, i));
                    int idx[3] = {j, k, h};
                    do geo.Hijkh(i, idx[0], idx[1], idx[2]) = v;
                    while (std::next_permutation(idx, idx + 3));
                }
            }
        }
    }

    geo.L = Tensor3(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
            for (int h = k; h < n; ++h) {
                double s = 0;
                for (int i = 0; i < n; ++i) s += p.y[i] * geo.Hijkh(i, j, k, h);
                int idx[3] = {j, k, h};
                do geo.L(idx[0], idx[1], idx[2]) = s;
                while (std::next_permutation(idx, idx + 3));
            }

    geo.G = solve(geo.g, geo.H);

    // H^i_jk = g^{ri} H_rjk  (solve g X = H_.jk columnwise)
    geo.Hup = Tensor3(n);
    {
        std::vector<std::vector<double>> cols;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::vector<double> col(n);
                for (int r = 0; r < n; ++r) col[r] = geo.Hijk(r, j, k);
                cols.push_back(std::move(col));
            }
        auto sols = solve(geo.g, std::move(cols));
        int c = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k, ++c)
                for (int i = 0; i < n; ++i) geo.Hup(i, j, k) = sols[c][i];
    }

    // Formal Christoffel symbols of g.
    geo.gamma = Tensor3(n);
    {
        Tensor3 dg(n);  // dg(r,i,j) = d g_ij / dx^r
        for (int r = 0; r < n; ++r)
            for (int i = 0; i < n; ++i)
                for (int j = i; j < n; ++j)
                    dg(r, i, j) = dg(r, j, i) = 0.5 * dF2({i, j}, r);
        std::vector<std::vector<double>> cols;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                std::vector<double> col(n);
                for (int r = 0; r < n; ++r)
                    col[r] = 0.5 * (dg(j, k, r) + dg(k, r, j) - dg(r, j, k));
                cols.push_back(std::move(col));
            }
        auto sols = solve(geo.g, std::move(cols));
        int c = 0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k, ++c)
                for (int i = 0; i < n; ++i) geo.gamma(i, j, k) = sols[c][i];
    }

    geo.H_scalar_candidate = dF2({}, SD) / 12.0;
    geo.K_candidate = -2.0 * geo.H_scalar_candidate;
    geo.P = dF({}, SD) / (2.0 * geo.F);

    if (!opts.with_connections) return geo;

    // Fiber derivatives of G^i = g^{ih} H_h through the linear solve, via jet
    // arithmetic: three outer tags seeded along y-directions (j, k, h), g and
    // H lifted to jets over those tags, Gaussian elimination over the jet
    // ring. Coefficients of tag subsets give N^i_j, G^i_jk, G^i_jkh exactly.
    geo.N = Mat(n, 0.0);
    geo.Gc = Tensor3(n);
    geo.Gb = Tensor4(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
            for (int h = k; h < n; ++h) {
                std::vector<int> dirs = {j, k, h};
                auto lifted = [&](std::vector<int> extra_fiber, int pos) {
                    int tags = 3 + static_cast<int>(extra_fiber.size()) +
                               (pos >= 0 ? 1 : 0);
                    JetPoint jp(p, ctx.params, tags);
                    for (int t = 0; t < 3; ++t)
                        jp.seed(t, VarRef{VarKind::fiber, dirs[t] + 1});
                    unsigned fixed = 0;
                    int t = 3;
                    for (int f : extra_fiber) {
                        jp.seed(t, VarRef{VarKind::fiber, f + 1});
                        fixed |= 1u << t;
                        ++t;
                    }
                    if (pos >= 0) {
                        jp.seed(t, VarRef{VarKind::position, pos + 1});
                        fixed |= 1u << t;
                    }
                    return jet_evaluate(ctx.F2, jp).sliced(fixed);
                };

                Matrix<Jet> gj(n, Jet(3));
                for (int a = 0; a < n; ++a)
                    for (int b = a; b < n; ++b)
                        gj(a, b) = gj(b, a) = 0.5 * lifted({a, b}, -1);

                std::vector<Jet> Hj(n, Jet(3));
                for (int a = 0; a < n; ++a) {
                    Jet contraction(3);
                    for (int r = 0; r < n; ++r)
                        contraction += detail::fiber_component_jet(p, r, dirs) *
                                       lifted({a}, r);
                    Hj[a] = 0.25 * (contraction - lifted({}, a));
                }

                auto Gj = solve(gj, std::move(Hj));
                for (int i = 0; i < n; ++i) {
                    for (int t = 0; t < 3; ++t)
                        geo.N(i, dirs[t]) = Gj[i].coeff(1u << t);
                    for (int t = 0; t < 3; ++t)
                        for (int u = t + 1; u < 3; ++u) {
                            double v = Gj[i].coeff((1u << t) | (1u << u));
                            geo.Gc(i, dirs[t], dirs[u]) = v;
                            geo.Gc(i, dirs[u], dirs[t]) = v;
                        }
                    double v = Gj[i].coeff(0b111);
                    int idx[3] = {j, k, h};
                    std::sort(idx, idx + 3);
                    do geo.Gb(i, idx[0], idx[1], idx[2]) = v;
                    while (std::next_permutation(idx, idx + 3));
                }
            }

    // P_j, P_jk through the quotient (y^i dF/dx^i) / (2F), same jet trick.
    geo.Pj.assign(n, 0.0);
    geo.Pjk = Mat(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            std::vector<int> dirs = {j, k};
            auto liftedF = [&](int pos) {
                int tags = 2 + (pos >= 0 ? 1 : 0);
                JetPoint jp(p, ctx.params, tags);
                for (int t = 0; t < 2; ++t)
                    jp.seed(t, VarRef{VarKind::fiber, dirs[t] + 1});
                unsigned fixed = 0;
                if (pos >= 0) {
                    jp.seed(2, VarRef{VarKind::position, pos + 1});
                    fixed = 0b100;
                }
                return jet_evaluate(ctx.F, jp).sliced(fixed);
            };
            Jet A(2);
            for (int r = 0; r < n; ++r)
                A += detail::fiber_component_jet(p, r, dirs) * liftedF(r);
            Jet Pjet = A / (2.0 * liftedF(-1));
            geo.Pj[j] = Pjet.coeff(0b01);
            geo.Pj[k] = Pjet.coeff(0b10);
            geo.Pjk(j, k) = geo.Pjk(k, j) = Pjet.coeff(0b11);
        }

    return geo;
}

// ---- derived residuals used by classification ------------------------------

// Dual-flatness residual D_i = y^k d/dx^k dF2/dy^i - 2 dF2/dx^i, scaled.
inline Vec dually_flat_residual(const MetricContext& ctx, const ChartPoint& p) {
    PartialCache dF2(ctx.F2, p, ctx.params);
    Vec d(ctx.n);
    for (int i = 0; i < ctx.n; ++i) {
        double a = dF2({i}, PartialCache::kSprayDir);
        double b = dF2({}, i);
        d[i] = scaled_residual(a - 2 * b, {a, 2 * b});
    }
    return d;
}

// Projective-flatness residual y^k d/dx^k dF/dy^i - dF/dx^i, scaled.
inline Vec projectively_flat_residual(const MetricContext& ctx, const ChartPoint& p) {
    PartialCache dF(ctx.F, p, ctx.params);
    Vec d(ctx.n);
    for (int i = 0; i < ctx.n; ++i) {
        double a = dF({i}, PartialCache::kSprayDir);
        double b = dF({}, i);
        d[i] = scaled_residual(a - b, {a, b});
    }
    return d;
}

// S-scalar existence residual: d/dy^i of (1/12) y^k dF2/dx^k minus H_i.
inline Vec s_scalar_residual(const MetricContext& ctx, const ChartPoint& p) {
    PartialCache dF2(ctx.F2, p, ctx.params);
    Vec d(ctx.n);
    for (int i = 0; i < ctx.n; ++i) {
        double grad = (dF2({}, i) + dF2({i}, PartialCache::kSprayDir)) / 12.0;
        double hi = 0.25 * (dF2({i}, PartialCache::kSprayDir) - dF2({}, i));
        d[i] = scaled_residual(grad - hi, {grad, hi});
    }
    return d;
}

// I-condition residual (free indices i, j, k, h; cyclic sum over j, k, h):
//   C_{irjkh} G^r + S_{jkh} { C_{irjk} G^r_h + C_{irj} G^r_{kh} }
inline double condition_I_residual(const PointGeometry& geo) {
    int n = geo.n;
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = j; k < n; ++k)
                for (int h = k; h < n; ++h) {
                    double total = 0, scale = 1;
                    int cyc[3][3] = {{j, k, h}, {k, h, j}, {h, j, k}};
                    for (int r = 0; r < n; ++r) {
                        double t = geo.C5(i, r, j, k, h) * geo.G[r];
                        total += t;
                        scale = std::max(scale, std::abs(t));
                        for (auto& c : cyc) {
                            double t1 = geo.C4(i, r, c[0], c[1]) * geo.N(r, c[2]);
                            double t2 = geo.C3(i, r, c[0]) * geo.Gc(r, c[1], c[2]);
                            total += t1 + t2;
                            scale = std::max({scale, std::abs(t1), std::abs(t2)});
                        }
                    }
                    worst = std::max(worst, std::abs(total) / scale);
                }
    return worst;
}

// II-condition residual: C_{rjkh} G^r + S_{jkh} { C_{rjk} G^r_h }.
inline double condition_II_residual(const PointGeometry& geo) {
    int n = geo.n;
    double worst = 0;
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k)
            for (int h = k; h < n; ++h) {
                double total = 0, scale = 1;
                int cyc[3][3] = {{j, k, h}, {k, h, j}, {h, j, k}};
                for (int r = 0; r < n; ++r) {
                    double t = geo.C4(r, j, k, h) * geo.G[r];
                    total += t;
                    scale = std::max(scale, std::abs(t));
                    for (auto& c : cyc) {
                        double t1 = geo.C3(r, c[0], c[1]) * geo.N(r, c[2]);
                        total += t1;
                        scale = std::max(scale, std::abs(t1));
                    }
                }
                worst = std::max(worst, std::abs(total) / scale);
            }
    return worst;
}

// Classical Landsberg functions via the standard contraction
// -(1/2) g_{is} y^s G^i_jkh; used for the II-condition side of the
// classification diagram.
inline Tensor3 classical_landsberg(const PointGeometry& geo) {
    Tensor3 L(geo.n);
    for (int j = 0; j < geo.n; ++j)
        for (int k = 0; k < geo.n; ++k)
            for (int h = 0; h < geo.n; ++h) {
                double s = 0;
                for (int i = 0; i < geo.n; ++i)
                    s += geo.y_flat_g[i] * geo.Gb(i, j, k, h);
                L(j, k, h) = -0.5 * s;
            }
    return L;
}

}  // namespace finh
