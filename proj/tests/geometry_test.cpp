#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <finh/classify.hpp>
#include <finh/geometry.hpp>
#include <finh/library.hpp>

#include <cmath>

using namespace finh;

TEST_CASE("quartic-root metric reproduces its closed-form spray") {
    MetricContext ctx = builtin("ex37").context();
    ChartPoint p{{0, 0, 0, 1}, {1, 1, 1, 2}};
    CHECK(evaluate(ctx.F, make_env(p, ctx.params)) ==
          doctest::Approx(2.3941701709713277).epsilon(1e-14));
    PointGeometry geo = compute_geometry(ctx, p);
    CHECK(geo.g(3, 3) == doctest::Approx(1.0).epsilon(1e-12));  // g_44 = x4
    // G^4 = y4^2/(4 x4) = 1, all other components vanish
    CHECK(geo.G[3] == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(geo.G[i]) < 1e-10);
    // H_4 = y4^2/4 = 1
    CHECK(geo.H[3] == doctest::Approx(1.0).epsilon(1e-10));
    // N^4_4 = y4/(2 x4) = 1
    CHECK(geo.N(3, 3) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Randers-type flat metric has the expected covariant coefficients") {
    MetricContext ctx = builtin("ex51_2d").context();
    ChartPoint p{{0, 0}, {3, 4}};
    PointGeometry geo = compute_geometry(ctx, p);
    // H_i = (1/2)|y| y_i at x = 0 with a = 0: (7.5, 10)
    CHECK(geo.H[0] == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(geo.H[1] == doctest::Approx(10.0).epsilon(1e-12));
    // projective factor P = |y|/2 = 2.5
    CHECK(geo.P == doctest::Approx(2.5).epsilon(1e-12));
    // away from x = 0 the Cartan tensor is nonzero (not Riemannian)
    ChartPoint q{{0.2, -0.1}, {3, 4}};
    CHECK(compute_geometry(ctx, q).C3.max_abs() > 1e-3);
}

TEST_CASE("core identities hold pointwise") {
    MetricContext ctx = builtin("ex52").context();
    ChartPoint p{{0.1, -0.2, 1.0}, {0.9, 0.7, 1.2}};
    PointGeometry geo = compute_geometry(ctx, p);
    int n = ctx.n;
    // Euler: y^i l_i = F and g_ij y^i y^j = F^2
    double yl = 0, ygy = 0;
    for (int i = 0; i < n; ++i) {
        yl += p.y[i] * geo.ell[i];
        for (int j = 0; j < n; ++j) ygy += p.y[i] * geo.g(i, j) * p.y[j];
    }
    CHECK(yl == doctest::Approx(geo.F).epsilon(1e-12));
    CHECK(ygy == doctest::Approx(geo.F * geo.F).epsilon(1e-12));
    // H_i = g_ir G^r
    for (int i = 0; i < n; ++i) {
        double gi = 0;
        for (int r = 0; r < n; ++r) gi += geo.g(i, r) * geo.G[r];
        CHECK(geo.H[i] == doctest::Approx(gi).epsilon(1e-10));
    }
    // y^j H_ij = 2 H_i
    for (int i = 0; i < n; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += p.y[j] * geo.Hij(i, j);
        CHECK(s == doctest::Approx(2 * geo.H[i]).epsilon(1e-10));
    }
    // Cartan tensor annihilates y
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = 0;
            for (int i = 0; i < n; ++i) s += p.y[i] * geo.C3(i, j, k);
            CHECK(std::abs(s) < 1e-12);
        }
}

TEST_CASE("rational quartic metric matches its closed-form H_i") {
    // With f1 = x3^2, f2 = x3^3:
    // H_1 = (1/2) f1' y1 y3, H_2 = (1/2) f2' y2 y3,
    // H_3 = -(1/4)(f1' y1^2 + f2' y2^2)
    const LibraryEntry& entry = builtin("ex52");
    MetricContext ctx = entry.context();
    for (const ChartPoint& p : sample_sites(entry, 7, 10)) {
        PointGeometry geo = compute_geometry(ctx, p);
        double x3 = p.x[2], y1 = p.y[0], y2 = p.y[1], y3 = p.y[2];
        double f1p = 2 * x3, f2p = 3 * x3 * x3;
        CHECK(std::abs(geo.H[0] - 0.5 * f1p * y1 * y3) < 1e-10);
        CHECK(std::abs(geo.H[1] - 0.5 * f2p * y2 * y3) < 1e-10);
        CHECK(std::abs(geo.H[2] + 0.25 * (f1p * y1 * y1 + f2p * y2 * y2)) <
              1e-10);
    }
}

TEST_CASE("spray data agrees with the full geometry pass") {
    const LibraryEntry& entry = builtin("najafi_2d_c03");
    MetricContext ctx = entry.context();
    for (const ChartPoint& p : sample_sites(entry, 11, 5)) {
        SprayData s = compute_spray(ctx, p);
        PointGeometry geo = compute_geometry(ctx, p);
        for (int i = 0; i < ctx.n; ++i) {
            CHECK(s.G[i] == doctest::Approx(geo.G[i]).epsilon(1e-10));
            CHECK(s.H[i] == doctest::Approx(geo.H[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("degenerate points are rejected") {
    // F = |y1| alone is degenerate in two dimensions.
    MetricContext ctx = MetricContext::from_text("sqrt(y1^2)", 2);
    ChartPoint p{{0, 0}, {1, 0.5}};
    CHECK_THROWS_AS(compute_geometry(ctx, p), NotFinslerPointError);
}

TEST_CASE("flatness residuals separate the library metrics") {
    MetricContext najafi = builtin("najafi_2d_c03").context();
    ChartPoint p{{0.3, 0.1}, {0.8, -0.5}};
    for (double r : dually_flat_residual(najafi, p)) CHECK(std::abs(r) < 1e-9);
    for (double r : projectively_flat_residual(najafi, p))
        CHECK(std::abs(r) < 1e-9);
    MetricContext curved = builtin("riemannian_curved").context();
    ChartPoint q{{0.5, 0.2}, {0.9, 0.6}};
    double worst = 0;
    for (double r : projectively_flat_residual(curved, q))
        worst = std::max(worst, std::abs(r));
    CHECK(worst > 1e-3);
}
