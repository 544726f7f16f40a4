#pragma once

// Classification of a metric over a deterministic sample of chart sites:
// per-predicate verdicts with scaled residuals and witnesses, consistency
// audits between predicates, the covariant-coefficient transformation law,
// and a deterministic report serializer.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "finh/library.hpp"

namespace finh {

enum class Verdict { holds, fails, inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::fails: return "fails";
        default: return "inconclusive";
    }
}

struct Witness {
    ChartPoint site;
    double residual = 0;
};

struct PredicateVerdict {
    std::string name;
    Verdict verdict = Verdict::inconclusive;
    double max_residual = 0;
    int sites_tested = 0;
    double tolerance = 0;
    std::optional<Witness> witness;  // site realizing max_residual
    std::string note;
};

struct AuditResult {
    std::string name;
    bool consistent = true;
    std::string detail;
};

struct ClassifyOptions {
    uint64_t seed = 42;
    int sites = 50;
    double tol = 1e-9;
    int redraw_cap = 100;
    double cond_max = 1e12;
};

struct ClassificationReport {
    std::string metric_name;
    std::string definition_hash;  // FNV-1a of the definition text, hex
    int dimension = 0;
    uint64_t seed = 0;
    int sites = 0;
    double tolerance = 0;
    std::string error;  // nonempty when classification aborted
    std::vector<PredicateVerdict> predicates;
    std::vector<AuditResult> audits;

    std::string to_json() const;

    Verdict verdict(const std::string& predicate) const {
        for (const auto& p : predicates)
            if (p.name == predicate) return p.verdict;
        throw std::invalid_argument("no predicate named '" + predicate + "'");
    }
};

namespace detail {

inline std::string fnv1a_hex(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Reports must be byte-identical across runs; print every number with a
// fixed round-trippable format.
inline std::string json_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; out += c; }
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out + "\"";
}

inline std::string json_vector(const Vec& v) {
    std::string out = "[";
    for (size_t i = 0; i < v.size(); ++i)
        out += (i ? ", " : "") + json_number(v[i]);
    return out + "]";
}

// One predicate accumulator: track the worst scaled residual and its site.
struct ResidualTracker {
    double worst = 0;
    std::optional<Witness> witness;
    int sites = 0;

    void add(const ChartPoint& p, double r) {
        if (!witness || r > worst) {
            worst = r;
            witness = Witness{p, r};
        }
    }
    void next_site() { ++sites; }

    PredicateVerdict finish(std::string name, double tol, std::string note = "") const {
        PredicateVerdict v;
        v.name = std::move(name);
        v.max_residual = worst;
        v.sites_tested = sites;
        v.tolerance = tol;
        v.witness = witness;
        v.note = std::move(note);
        v.verdict = sites == 0 ? Verdict::inconclusive
                               : (worst < tol ? Verdict::holds : Verdict::fails);
        return v;
    }
};

}  // namespace detail

inline std::string ClassificationReport::to_json() const {
    using detail::json_number;
    using detail::json_string;
    std::string out = "{\n";
    out += "  \"metric\": " + json_string(metric_name) + ",\n";
    out += "  \"definition_hash\": " + json_string(definition_hash) + ",\n";
    out += "  \"dimension\": " + std::to_string(dimension) + ",\n";
    out += "  \"seed\": " + std::to_string(seed) + ",\n";
    out += "  \"sites\": " + std::to_string(sites) + ",\n";
    out += "  \"tolerance\": " + json_number(tolerance) + ",\n";
    if (!error.empty()) out += "  \"error\": " + json_string(error) + ",\n";
    out += "  \"predicates\": [";
    for (size_t i = 0; i < predicates.size(); ++i) {
        const auto& p = predicates[i];
        out += std::string(i ? "," : "") + "\n    {\"name\": " + json_string(p.name) +
               ", \"verdict\": " + json_string(to_string(p.verdict)) +
               ", \"max_residual\": " + json_number(p.max_residual) +
               ", \"sites\": " + std::to_string(p.sites_tested) +
               ", \"tolerance\": " + json_number(p.tolerance);
        if (p.witness)
            out += ", \"witness\": {\"x\": " + detail::json_vector(p.witness->site.x) +
                   ", \"y\": " + detail::json_vector(p.witness->site.y) +
                   ", \"residual\": " + json_number(p.witness->residual) + "}";
        else
            out += ", \"witness\": null";
        if (!p.note.empty()) out += ", \"note\": " + json_string(p.note);
        out += "}";
    }
    out += predicates.empty() ? "],\n" : "\n  ],\n";
    out += "  \"audits\": [";
    for (size_t i = 0; i < audits.size(); ++i) {
        const auto& a = audits[i];
        out += std::string(i ? "," : "") + "\n    {\"name\": " + json_string(a.name) +
               ", \"consistent\": " + (a.consistent ? "true" : "false") +
               ", \"detail\": " + json_string(a.detail) + "}";
    }
    out += audits.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

// ---- per-site predicate residuals ------------------------------------------

namespace detail {

inline double berwald_residual(const PointGeometry& geo) {
    double scale = std::max({1.0, geo.N.max_abs(), geo.Gc.max_abs()});
    return geo.Gb.max_abs() / scale;
}

inline double h_berwald_residual(const PointGeometry& geo) {
    double scale = std::max({1.0, geo.Hij.max_abs(), geo.Hijk.max_abs()});
    return geo.Hijkh.max_abs() / scale;
}

inline double h_landsberg_residual(const PointGeometry& geo) {
    int n = geo.n;
    double worst = 0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int h = 0; h < n; ++h) {
                double total = 0, scale = 1;
                for (int i = 0; i < n; ++i) {
                    double t = geo.point.y[i] * geo.Hijkh(i, j, k, h);
                    total += t;
                    scale = std::max(scale, std::abs(t));
                }
                worst = std::max(worst, std::abs(total) / scale);
            }
    return worst;
}

inline double classical_landsberg_residual(const PointGeometry& geo) {
    int n = geo.n;
    double worst = 0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int h = 0; h < n; ++h) {
                double total = 0, scale = 1;
                for (int i = 0; i < n; ++i) {
                    double t = geo.y_flat_g[i] * geo.Gb(i, j, k, h);
                    total += t;
                    scale = std::max(scale, std::abs(t));
                }
                worst = std::max(worst, 0.5 * std::abs(total) / scale);
            }
    return worst;
}

inline double max_of(const Vec& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

// ---- classification --------------------------------------------------------

inline ClassificationReport classify_metric(const LibraryEntry& entry,
                                            const ClassifyOptions& opts = {}) {
    ClassificationReport rep;
    rep.metric_name = entry.name;
    rep.definition_hash = detail::fnv1a_hex(entry.definition);
    rep.seed = opts.seed;
    rep.sites = opts.sites;
    rep.tolerance = opts.tol;

    MetricContext ctx;
    std::vector<ChartPoint> sites;
    try {
        ctx = entry.context();
        rep.dimension = ctx.n;
        sites = sample_sites(entry, opts.seed, opts.sites, opts.redraw_cap,
                             opts.cond_max);
    } catch (const std::exception& e) {
        rep.error = e.what();
        for (const char* name :
             {"dually_flat", "projectively_flat", "s_scalar_exists", "berwald",
              "h_berwald", "h_landsberg", "landsberg_classical", "condition_I",
              "condition_II"}) {
            PredicateVerdict v;
            v.name = name;
            v.verdict = Verdict::inconclusive;
            v.tolerance = opts.tol;
            v.note = "no sites evaluated";
            rep.predicates.push_back(std::move(v));
        }
        return rep;
    }

    detail::ResidualTracker dually, proj, sscal, berwald, hberwald, hlands,
        classical, cond1, cond2;
    // Extra residuals recorded for the projective-factor audit.
    double proj_factor_worst = 0;
    GeometryOptions gopts;
    gopts.cond_max = opts.cond_max;
    for (const ChartPoint& p : sites) {
        PointGeometry geo = compute_geometry(ctx, p, gopts);
        dually.next_site();
        dually.add(p, detail::max_of(dually_flat_residual(ctx, p)));
        proj.next_site();
        proj.add(p, detail::max_of(projectively_flat_residual(ctx, p)));
        sscal.next_site();
        sscal.add(p, detail::max_of(s_scalar_residual(ctx, p)));
        berwald.next_site();
        berwald.add(p, detail::berwald_residual(geo));
        hberwald.next_site();
        hberwald.add(p, detail::h_berwald_residual(geo));
        hlands.next_site();
        hlands.add(p, detail::h_landsberg_residual(geo));
        classical.next_site();
        classical.add(p, detail::classical_landsberg_residual(geo));
        cond1.next_site();
        cond1.add(p, condition_I_residual(geo));
        cond2.next_site();
        cond2.add(p, condition_II_residual(geo));

        // When the metric is projectively flat the spray must reduce to
        // G^i = P y^i with H_i = P g_ir y^r.
        for (int i = 0; i < ctx.n; ++i) {
            double a = geo.G[i], b = geo.P * p.y[i];
            proj_factor_worst = std::max(proj_factor_worst,
                                         scaled_residual(a - b, {a, b}));
            double c = geo.H[i], d = geo.P * geo.y_flat_g[i];
            proj_factor_worst = std::max(proj_factor_worst,
                                         scaled_residual(c - d, {c, d}));
        }
    }

    rep.predicates.push_back(dually.finish("dually_flat", opts.tol));
    rep.predicates.push_back(proj.finish("projectively_flat", opts.tol));
    rep.predicates.push_back(sscal.finish("s_scalar_exists", opts.tol));
    rep.predicates.push_back(berwald.finish("berwald", opts.tol));
    rep.predicates.push_back(hberwald.finish("h_berwald", opts.tol));
    rep.predicates.push_back(hlands.finish("h_landsberg", opts.tol));
    rep.predicates.push_back(classical.finish(
        "landsberg_classical", opts.tol,
        "classical contraction -(1/2) g_is y^s G^i_jkh"));
    rep.predicates.push_back(cond1.finish("condition_I", opts.tol));
    rep.predicates.push_back(cond2.finish("condition_II", opts.tol));

    auto holds = [&](const char* name) { return rep.verdict(name) == Verdict::holds; };

    auto audit = [&](std::string name, bool consistent, std::string detail) {
        rep.audits.push_back({std::move(name), consistent, std::move(detail)});
    };
    audit("s_scalar_iff_dually_flat",
          holds("s_scalar_exists") == holds("dually_flat"),
          std::string("s_scalar_exists=") + to_string(rep.verdict("s_scalar_exists")) +
              " dually_flat=" + to_string(rep.verdict("dually_flat")));
    audit("h_berwald_implies_h_landsberg",
          !holds("h_berwald") || holds("h_landsberg"),
          std::string("h_berwald=") + to_string(rep.verdict("h_berwald")) +
              " h_landsberg=" + to_string(rep.verdict("h_landsberg")));
    audit("s_scalar_implies_h_landsberg",
          !holds("s_scalar_exists") || holds("h_landsberg"),
          std::string("s_scalar_exists=") + to_string(rep.verdict("s_scalar_exists")) +
              " h_landsberg=" + to_string(rep.verdict("h_landsberg")));
    audit("condition_I_links_berwald_classes",
          !holds("condition_I") || holds("h_berwald") == holds("berwald"),
          std::string("condition_I=") + to_string(rep.verdict("condition_I")) +
              " h_berwald=" + to_string(rep.verdict("h_berwald")) +
              " berwald=" + to_string(rep.verdict("berwald")));
    audit("condition_II_links_landsberg_classes",
          !holds("condition_II") ||
              holds("h_landsberg") == holds("landsberg_classical"),
          std::string("condition_II=") + to_string(rep.verdict("condition_II")) +
              " h_landsberg=" + to_string(rep.verdict("h_landsberg")) +
              " landsberg_classical=" + to_string(rep.verdict("landsberg_classical")));
    audit("projective_factor",
          !holds("projectively_flat") || proj_factor_worst < opts.tol,
          "max residual of G^i - P y^i and H_i - P g_ir y^r: " +
              detail::json_number(proj_factor_worst));

    return rep;
}

// Wrap a metric-definition file in an ad-hoc entry with a default sampling
// region so file-based metrics classify the same way builtins do.
inline LibraryEntry entry_from_definition(const std::string& name,
                                          const std::string& definition) {
    LibraryEntry e;
    e.name = name;
    e.definition = definition;
    MetricDefinition def = parse_metric_file(definition);
    e.xbox.assign(def.dimension, {-0.5, 0.5});
    return e;
}

// ---- transformation law of the covariant coefficients ----------------------

// Check, at each tilde-chart site, that
//   Htilde_i = (dx^h/dxtilde^i) H_h
//              - (1/2) (d^2 xtilde^r / dx^h dx^j) y^h y^j gtilde_ir
// where the second derivative of the inverse map is expressed through the
// Hessians of psi. psi maps tilde coordinates to original coordinates.
inline PredicateVerdict transformation_law_check(
    const MetricContext& ctx, const std::vector<Expr>& psi,
    const std::vector<ChartPoint>& tilde_sites, double tol = 1e-9) {
    int n = ctx.n;
    if (static_cast<int>(psi.size()) != n)
        throw DimensionError("coordinate map arity does not match dimension");

    MetricContext tctx;
    tctx.n = n;
    tctx.F = change_coordinates(ctx.F, psi);
    tctx.F2 = pow_of(tctx.F, 2);
    tctx.params = ctx.params;

    // Symbolic first and second derivatives of psi.
    std::vector<std::vector<Expr>> dpsi;     // dpsi[h][i] = d psi_h / d xt_i
    std::vector<std::vector<std::vector<Expr>>> d2psi;
    for (int h = 0; h < n; ++h) {
        dpsi.push_back({});
        d2psi.push_back({});
        for (int i = 0; i < n; ++i) {
            dpsi[h].push_back(differentiate(psi[h], VarRef{VarKind::position, i + 1}));
            d2psi[h].push_back({});
            for (int j = 0; j < n; ++j)
                d2psi[h][i].push_back(
                    differentiate(dpsi[h][i], VarRef{VarKind::position, j + 1}));
        }
    }

    detail::ResidualTracker tracker;
    for (const ChartPoint& tp : tilde_sites) {
        tracker.next_site();
        Environment tenv = make_env(tp, ctx.params);
        Mat J(n, n);  // J(h,i) = d x^h / d xt^i
        Tensor3 Hess(n);
        ChartPoint p;
        p.x.resize(n);
        p.y.assign(n, 0.0);
        for (int h = 0; h < n; ++h) {
            p.x[h] = evaluate(psi[h], tenv);
            for (int i = 0; i < n; ++i) {
                J(h, i) = evaluate(dpsi[h][i], tenv);
                for (int j = 0; j < n; ++j)
                    Hess(h, i, j) = evaluate(d2psi[h][i][j], tenv);
            }
        }
        for (int h = 0; h < n; ++h)
            for (int i = 0; i < n; ++i) p.y[h] += J(h, i) * tp.y[i];

        Mat Jt = inverse(J);  // Jt(r,h) = d xt^r / d x^h
        SprayData orig = compute_spray(ctx, p);
        SprayData tilde = compute_spray(tctx, tp);

        // d^2 xt^r / dx^h dx^j = - Jt(r,a) Hess(a,b,c) Jt(b,h) Jt(c,j)
        for (int i = 0; i < n; ++i) {
            double rhs = 0, scale = 1;
            for (int h = 0; h < n; ++h) {
                double t = J(h, i) * orig.H[h];
                rhs += t;
                scale = std::max(scale, std::abs(t));
            }
            for (int r = 0; r < n; ++r) {
                double contraction = 0;
                for (int h = 0; h < n; ++h)
                    for (int j = 0; j < n; ++j) {
                        double d2 = 0;
                        for (int a = 0; a < n; ++a)
                            for (int b = 0; b < n; ++b)
                                for (int c = 0; c < n; ++c)
                                    d2 -= Jt(r, a) * Hess(a, b, c) * Jt(b, h) * Jt(c, j);
                        contraction += d2 * p.y[h] * p.y[j];
                    }
                double t = -0.5 * contraction * tilde.g(i, r);
                rhs += t;
                scale = std::max(scale, std::abs(t));
            }
            tracker.add(tp, std::abs(tilde.H[i] - rhs) / scale);
        }
    }
    return tracker.finish("transformation_law", tol);
}

// The defect of H^i_jk under the transformation law of a linear connection's
// coefficients. The covariant coefficients do not come from a connection, so
// this is generically far from zero; returns the max scaled defect.
inline double non_connection_witness(const MetricContext& ctx,
                                     const std::vector<Expr>& psi,
                                     const ChartPoint& tilde_site) {
    int n = ctx.n;
    MetricContext tctx;
    tctx.n = n;
    tctx.F = change_coordinates(ctx.F, psi);
    tctx.F2 = pow_of(tctx.F, 2);
    tctx.params = ctx.params;

    Environment tenv = make_env(tilde_site, ctx.params);
    Mat J(n, n);
    Tensor3 Hess(n);
    ChartPoint p;
    p.x.resize(n);
    p.y.assign(n, 0.0);
    for (int h = 0; h < n; ++h) {
        Expr ph = psi[h];
        p.x[h] = evaluate(ph, tenv);
        for (int i = 0; i < n; ++i) {
            Expr d1 = differentiate(ph, VarRef{VarKind::position, i + 1});
            J(h, i) = evaluate(d1, tenv);
            for (int j = 0; j < n; ++j)
                Hess(h, i, j) = evaluate(
                    differentiate(d1, VarRef{VarKind::position, j + 1}), tenv);
        }
    }
    for (int h = 0; h < n; ++h)
        for (int i = 0; i < n; ++i) p.y[h] += J(h, i) * tilde_site.y[i];
    Mat Jt = inverse(J);

    PointGeometry orig = compute_geometry(ctx, p);
    PointGeometry tilde = compute_geometry(tctx, tilde_site);

    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double pred = 0, scale = 1;
                for (int a = 0; a < n; ++a) {
                    double inhom = Jt(i, a) * Hess(a, j, k);
                    pred += inhom;
                    scale = std::max(scale, std::abs(inhom));
                    for (int b = 0; b < n; ++b)
                        for (int c = 0; c < n; ++c) {
                            double t = Jt(i, a) * J(b, j) * J(c, k) * orig.Hup(a, b, c);
                            pred += t;
                            scale = std::max(scale, std::abs(t));
                        }
                }
                scale = std::max(scale, std::abs(tilde.Hup(i, j, k)));
                worst = std::max(worst, std::abs(tilde.Hup(i, j, k) - pred) / scale);
            }
    return worst;
}

}  // namespace finh
