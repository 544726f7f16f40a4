#pragma once

// Closed forms for spherically symmetric metrics F = u phi(r, s) with
// u = |y|, r = |x|, s = <x,y>/|y|: the sigma-decomposition of g, the P/Q
// spray factors, the covariant coefficients H_j, and the projectively plus
// dually flat family together with its spray scalar. These serve as an
// independent oracle against the general pipeline.
//
// Index lowering in this module is the delta convention: y_i and x_i are the
// plain components (y_i != F dF/dy^i here).

#include <cmath>
#include <string>
#include <vector>

#include "finh/expr.hpp"
#include "finh/geometry.hpp"

namespace finh {

// Profile functions phi(r, s) are expressions over two position slots:
// "r" is x1 and "s" is x2.
inline const std::map<std::string, VarRef>& phi_aliases() {
    static const std::map<std::string, VarRef> aliases = {
        {"r", VarRef{VarKind::position, 1}},
        {"s", VarRef{VarKind::position, 2}},
    };
    return aliases;
}

inline Expr parse_phi(const std::string& text) {
    return parse_with_aliases(text, 2, phi_aliases());
}

struct SphericalMetric {
    Expr phi;
    int n = 0;
    double r0 = 1.0;  // domain radius
    Params params;

    // symbolic derivatives of phi, built once
    Expr phi_r, phi_s, phi_ss, phi_rs;

    SphericalMetric(Expr phi_expr, int dimension, double radius = 1.0,
                    Params parameters = {})
        : phi(std::move(phi_expr)), n(dimension), r0(radius),
          params(std::move(parameters)) {
        VarRef r{VarKind::position, 1}, s{VarKind::position, 2};
        phi_r = differentiate(phi, r);
        phi_s = differentiate(phi, s);
        phi_ss = differentiate(phi_s, s);
        phi_rs = differentiate(phi_r, s);
    }
};

struct PhiJet {
    double phi = 0, phi_r = 0, phi_s = 0, phi_ss = 0, phi_rs = 0;
};

inline PhiJet phi_jet(const SphericalMetric& m, double r, double s) {
    Environment env;
    env.n = 2;
    env.x = {r, s};
    env.y = {0, 0};
    env.params = m.params;
    PhiJet j;
    j.phi = evaluate(m.phi, env);
    j.phi_r = evaluate(m.phi_r, env);
    j.phi_s = evaluate(m.phi_s, env);
    j.phi_ss = evaluate(m.phi_ss, env);
    j.phi_rs = evaluate(m.phi_rs, env);
    return j;
}

// (u, r, s) decomposition of a chart point.
struct SphericalSite {
    double u = 0, r = 0, s = 0;
};

inline SphericalSite spherical_site(const ChartPoint& p) {
    SphericalSite site;
    double u2 = 0, r2 = 0, xy = 0;
    for (size_t i = 0; i < p.y.size(); ++i) {
        u2 += p.y[i] * p.y[i];
        r2 += p.x[i] * p.x[i];
        xy += p.x[i] * p.y[i];
    }
    site.u = std::sqrt(u2);
    site.r = std::sqrt(r2);
    if (site.u == 0) throw DomainError("spherical site with y = 0");
    site.s = xy / site.u;
    return site;
}

// ---- sigma coefficients ----------------------------------------------------

struct SigmaSet {
    double sigma0 = 0, sigma1 = 0, sigma2 = 0, sigma3 = 0;
};

inline SigmaSet sigma(const PhiJet& j, double s) {
    SigmaSet out;
    out.sigma0 = j.phi * (j.phi - s * j.phi_s);
    out.sigma1 = j.phi_s * j.phi_s + j.phi * j.phi_ss;
    out.sigma2 = (j.phi - s * j.phi_s) * j.phi_s - s * j.phi * j.phi_ss;
    out.sigma3 = s * s * j.phi * j.phi_ss - s * (j.phi - s * j.phi_s) * j.phi_s;
    return out;
}

// g_ij = sigma0 d_ij + sigma1 x_i x_j + (sigma2/u)(x_i y_j + x_j y_i)
//        + (sigma3/u^2) y_i y_j
inline Mat spherical_metric_tensor(const SphericalMetric& m, const ChartPoint& p) {
    auto site = spherical_site(p);
    auto sig = sigma(phi_jet(m, site.r, site.s), site.s);
    Mat g(m.n, 0.0);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            g(i, j) = sig.sigma0 * (i == j ? 1.0 : 0.0) +
                      sig.sigma1 * p.x[i] * p.x[j] +
                      sig.sigma2 / site.u * (p.x[i] * p.y[j] + p.x[j] * p.y[i]) +
                      sig.sigma3 / (site.u * site.u) * p.y[i] * p.y[j];
    return g;
}

// ---- spray factors ---------------------------------------------------------

struct SprayFactors {
    double P = 0, Q = 0;
};

inline SprayFactors pq(const PhiJet& j, double r, double s) {
    if (r < 1e-12)
        throw DomainError("P/Q factors need r > 0 (sample away from the origin)");
    double den = j.phi - s * j.phi_s + (r * r - s * s) * j.phi_ss;
    if (den == 0) throw DomainError("degenerate spherical denominator");
    SprayFactors f;
    f.Q = (1.0 / (2.0 * r)) * (-j.phi_r + s * j.phi_rs + r * j.phi_ss) / den;
    f.P = -(f.Q / j.phi) * (s * j.phi + (r * r - s * s) * j.phi_s) +
          (1.0 / (2.0 * r * j.phi)) * (s * j.phi_r + r * j.phi_s);
    return f;
}

// G^i = u P y^i + u^2 Q x^i
inline Vec spherical_spray(const SphericalMetric& m, const ChartPoint& p) {
    auto site = spherical_site(p);
    auto f = pq(phi_jet(m, site.r, site.s), site.r, site.s);
    Vec G(m.n);
    for (int i = 0; i < m.n; ++i)
        G[i] = site.u * f.P * p.y[i] + site.u * site.u * f.Q * p.x[i];
    return G;
}

// H_j = u (P sigma0 + (r^2 - s^2) sigma2 Q) y_j
//     + u^2 (P phi phi_s + (phi^2 + (r^2 - s^2) sigma1) Q) x_j
inline Vec spherical_H(const SphericalMetric& m, const ChartPoint& p) {
    auto site = spherical_site(p);
    PhiJet j = phi_jet(m, site.r, site.s);
    SigmaSet sig = sigma(j, site.s);
    SprayFactors f = pq(j, site.r, site.s);
    double rs2 = site.r * site.r - site.s * site.s;
    double ycoef = site.u * (f.P * sig.sigma0 + rs2 * sig.sigma2 * f.Q);
    double xcoef = site.u * site.u *
                   (f.P * j.phi * j.phi_s + (j.phi * j.phi + rs2 * sig.sigma1) * f.Q);
    Vec H(m.n);
    for (int i = 0; i < m.n; ++i) H[i] = ycoef * p.y[i] + xcoef * p.x[i];
    return H;
}

// ---- the projectively + dually flat family ---------------------------------

// phi(r, s) = (sqrt((k^2 - c^2 r^2) + c^2 s^2) + c s) / (k^2 - c^2 r^2),
// with parameters k and c bound at evaluation time.
inline Expr najafi_phi() {
    return parse_phi(
        "(sqrt((k^2 - c^2*r^2) + c^2*s^2) + c*s) / (k^2 - c^2*r^2)");
}

// Closed-form spray scalar of the family:
// H = -(1/6) c u^3 (sqrt(-c^2 r^2 + c^2 s^2 + k^2) + c s)^3 / (c^2 r^2 - k^2)^3
inline double najafi_s_scalar(double k, double c, const ChartPoint& p) {
    auto site = spherical_site(p);
    double disc = -c * c * site.r * site.r + c * c * site.s * site.s + k * k;
    if (disc <= 0) throw DomainError("site outside the family's domain");
    double den = c * c * site.r * site.r - k * k;
    double num = std::sqrt(disc) + c * site.s;
    return -(1.0 / 6.0) * c * site.u * site.u * site.u * num * num * num /
           (den * den * den);
}

// ---- composition into a full chart expression ------------------------------

// F = u phi(r, s) as an n-dimensional expression:
//   u = sqrt(sum y_i^2), r = sqrt(sum x_i^2), s = (sum x_i y_i) / u.
inline Expr compose_spherical(const Expr& phi, int n) {
    Expr u2 = constant(0), r2 = constant(0), xy = constant(0);
    for (int i = 1; i <= n; ++i) {
        u2 = u2 + pow_of(fiber(i), 2);
        r2 = r2 + pow_of(position(i), 2);
        xy = xy + position(i) * fiber(i);
    }
    Expr u = sqrt_of(u2);
    std::map<VarRef, Expr> bindings = {
        {VarRef{VarKind::position, 1}, sqrt_of(r2)},
        {VarRef{VarKind::position, 2}, xy / u},
    };
    return u * substitute(phi, bindings);
}

// Context for either kind of metric definition file.
inline MetricContext make_context(const MetricDefinition& def) {
    MetricContext ctx;
    ctx.n = def.dimension;
    if (def.spherical()) {
        ctx.F = compose_spherical(parse_phi(def.phi_text), def.dimension);
    } else {
        ctx.F = parse_metric(def.metric_text, def.dimension);
    }
    ctx.F2 = pow_of(ctx.F, 2);
    ctx.params = def.params;
    if (def.domain_text)
        ctx.domain = parse_metric(*def.domain_text, def.dimension);
    return ctx;
}

}  // namespace finh
