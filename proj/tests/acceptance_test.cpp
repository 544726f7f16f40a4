// End-to-end acceptance checks. Each criterion prints exactly one
// "pass"/"fail" line; the exit status is the number of failed criteria.
#include <finh/classify.hpp>
#include <finh/geometry.hpp>
#include <finh/library.hpp>
#include <finh/spherical.hpp>
#include <finh/verify.hpp>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace finh;

namespace {

int failures = 0;

void report(int number, const std::string& label, bool pass,
            const std::string& detail = "") {
    std::string suffix =
        (!pass && !detail.empty()) ? "  (" + detail + ")" : "";
    std::printf("criterion %2d  %-52s %s%s\n", number, label.c_str(),
                pass ? "pass" : "fail", suffix.c_str());
    if (!pass) ++failures;
}

double max_abs(const Vec& v) {
    double m = 0;
    for (double a : v) m = std::max(m, std::abs(a));
    return m;
}

// 1. quartic-root metric: closed-form spray and covariant coefficients at
//    100 seeded sites, plus the H-Berwald verdict.
void criterion_1() {
    const LibraryEntry& entry = builtin("ex37");
    MetricContext ctx = entry.context();
    double worst_closed = 0, worst_rest = 0;
    for (const ChartPoint& p : sample_sites(entry, 42, 100)) {
        SprayData s = compute_spray(ctx, p);
        double x4 = p.x[3], y4 = p.y[3];
        worst_closed = std::max(
            worst_closed,
            scaled_residual(s.G[3] - 0.25 * y4 * y4 / x4, {s.G[3]}));
        worst_closed = std::max(
            worst_closed, scaled_residual(s.H[3] - 0.25 * y4 * y4, {s.H[3]}));
        for (int i = 0; i < 3; ++i)
            worst_rest = std::max(worst_rest,
                                  std::max(std::abs(s.G[i]), std::abs(s.H[i])));
    }
    ClassifyOptions opts;
    ClassificationReport rep = classify_metric(entry, opts);
    bool pass = worst_closed < 1e-9 && worst_rest < 1e-10 &&
                rep.verdict("h_berwald") == Verdict::holds;
    report(1, "quartic-root metric closed-form spray / H-Berwald", pass,
           "closed-form residual " + std::to_string(worst_closed));
}

// 2. Randers-type flat family: projective flatness, closed-form H_i,
//    vanishing L_jkh, and H-Landsberg-but-not-H-Berwald at 50 sites.
void criterion_2() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"ex51_2d", "ex51_2d_a", "ex51_3d", "ex51_3d_a"}) {
        const LibraryEntry& entry = builtin(name);
        MetricContext ctx = entry.context();
        double a_base = entry.name.back() == 'a' ? 0.1 : 0.0;
        int big_sites = 0, total = 0;
        for (const ChartPoint& p : sample_sites(entry, 42, 50)) {
            ++total;
            if (max_abs(projectively_flat_residual(ctx, p)) >= 1e-9)
                pass = false;
            PointGeometry geo = compute_geometry(ctx, p);
            double u = 0;
            for (double yi : p.y) u += yi * yi;
            double norm = std::sqrt(u);
            for (int i = 0; i < ctx.n; ++i) {
                double ai = a_base > 0 ? 0.1 * (i + 1) : 0.0;
                double closed = 0.5 * norm * p.y[i] +
                                0.5 * u * (ai + p.x[i]);
                if (scaled_residual(geo.H[i] - closed, {geo.H[i], closed}) >=
                    1e-9)
                    pass = false;
            }
            if (geo.L.max_abs() >= 1e-9) pass = false;
            if (geo.Hijkh.max_abs() > 1e-3) ++big_sites;
        }
        if (big_sites < 45) {
            pass = false;
            detail = std::string(name) + " had only " +
                     std::to_string(big_sites) + "/50 sites with large H_ijkh";
        }
    }
    report(2, "Randers-type family closed-form H_i / H-Landsberg", pass, detail);
}

// 3. projectively + dually flat spherically symmetric family: verdicts,
//    closed-form spray scalar, and the H-Berwald failure witness.
void criterion_3() {
    bool pass = true;
    std::string detail;
    for (const char* name :
         {"najafi_2d_c01", "najafi_2d_c03", "najafi_3d_c01", "najafi_3d_c03"}) {
        const LibraryEntry& entry = builtin(name);
        MetricContext ctx = entry.context();
        double c = std::string(name).ends_with("c01") ? 0.1 : 0.3;
        for (const ChartPoint& p : sample_sites(entry, 42, 25)) {
            if (max_abs(dually_flat_residual(ctx, p)) >= 1e-9) pass = false;
            if (max_abs(projectively_flat_residual(ctx, p)) >= 1e-9)
                pass = false;
            PointGeometry geo = compute_geometry(ctx, p);
            double closed = najafi_s_scalar(1.0, c, p);
            if (scaled_residual(geo.H_scalar_candidate - closed, {closed}) >=
                1e-9)
                pass = false;
        }
        ClassificationReport rep = classify_metric(entry);
        if (rep.verdict("s_scalar_exists") != Verdict::holds) pass = false;
        if (rep.verdict("h_landsberg") != Verdict::holds) pass = false;
        if (rep.verdict("h_berwald") != Verdict::fails) pass = false;
        for (const auto& pv : rep.predicates)
            if (pv.name == "h_berwald" &&
                (!pv.witness || pv.witness->residual <= 1e-3)) {
                pass = false;
                detail = std::string(name) + " lacks an H-Berwald witness";
            }
    }
    // spot value of the closed-form spray scalar
    ChartPoint p0{{0, 0}, {1, 0}};
    if (std::abs(najafi_s_scalar(1.0, 0.3, p0) - 0.05) >= 1e-12) pass = false;
    report(3, "spherically symmetric family: H-unicorn behaviour", pass, detail);
}

// 4. rational quartic metric: closed-form H_i and the H-Berwald verdict.
void criterion_4() {
    const LibraryEntry& entry = builtin("ex52");
    MetricContext ctx = entry.context();
    double worst = 0;
    for (const ChartPoint& p : sample_sites(entry, 42, 50)) {
        PointGeometry geo = compute_geometry(ctx, p);
        double x3 = p.x[2], y1 = p.y[0], y2 = p.y[1], y3 = p.y[2];
        double f1p = 2 * x3, f2p = 3 * x3 * x3;
        Vec closed = {0.5 * f1p * y1 * y3, 0.5 * f2p * y2 * y3,
                      -0.25 * (f1p * y1 * y1 + f2p * y2 * y2)};
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, scaled_residual(geo.H[i] - closed[i],
                                                    {geo.H[i], closed[i]}));
    }
    ClassificationReport rep = classify_metric(entry);
    bool pass = worst < 1e-9 && rep.verdict("h_berwald") == Verdict::holds;
    report(4, "rational quartic metric closed-form H_i / H-Berwald", pass,
           "worst residual " + std::to_string(worst));
}

// 5. two metrics sharing a spray are separated by their covariant
//    coefficients.
void criterion_5() {
    SuiteResult r = pair_suite();
    report(5, "shared-spray pair: equal G^i, distinct H_i", r.pass, r.witness);
}

// 6. identity suites across the whole library.
void criterion_6() {
    bool pass = true;
    std::string detail;
    for (const LibraryEntry& entry : builtin_entries()) {
        SuiteResult r = identity_suite(entry);
        if (!r.pass) {
            pass = false;
            detail = entry.name + ": " + r.witness;
        }
    }
    report(6, "identity suites on every library metric", pass, detail);
}

// 7. the S-scalar existence criterion and the implication audits.
void criterion_7() {
    bool pass = true;
    std::string detail;
    for (const LibraryEntry& entry : builtin_entries()) {
        ClassificationReport rep = classify_metric(entry);
        if (!rep.error.empty() ||
            rep.verdict("s_scalar_exists") != rep.verdict("dually_flat"))
            pass = false;
        for (const auto& audit : rep.audits)
            if (!audit.consistent) {
                pass = false;
                detail = entry.name + ": " + audit.name;
            }
    }
    report(7, "S-scalar iff dually flat; implication audits", pass, detail);
}

// 8. exact derivatives vs. the finite-difference oracle.
void criterion_8() {
    bool pass = true;
    std::string detail;
    for (const LibraryEntry& entry : builtin_entries()) {
        SuiteResult r = fd_suite(entry);
        if (!r.pass) {
            pass = false;
            detail = entry.name + ": " + r.witness;
        }
    }
    report(8, "exact partials vs finite-difference oracle", pass, detail);
}

// 9. transformation law of H_i under chart changes.
void criterion_9() {
    SuiteResult r = transformation_suite();
    report(9, "H_i transformation law (quadratic and affine charts)", r.pass,
           r.witness);
}

// 10. spherically symmetric closed forms vs. the general pipeline.
void criterion_10() {
    bool pass = true;
    std::string detail;
    for (const char* name :
         {"euclidean_2d", "najafi_2d_c03", "najafi_3d_c01", "sphsym_generic"}) {
        SuiteResult r = spherical_suite(builtin(name));
        if (!r.pass) {
            pass = false;
            detail = std::string(name) + ": " + r.witness;
        }
    }
    report(10, "spherical closed forms vs general pipeline", pass, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0)
        std::printf("acceptance: all 10 criteria passed\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", failures);
    return failures;
}
