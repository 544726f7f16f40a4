#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <finh/eval.hpp>
#include <finh/expr.hpp>
#include <finh/jet.hpp>

#include <cmath>

using namespace finh;

TEST_CASE("tags are nilpotent") {
    Jet a(2, 3.0);
    a.coeff(0b01) = 1.0;  // 3 + t0
    Jet sq = a * a;       // 9 + 6 t0; the t0*t0 term vanishes
    CHECK(sq.value() == doctest::Approx(9));
    CHECK(sq.coeff(0b01) == doctest::Approx(6));
    CHECK(sq.coeff(0b10) == doctest::Approx(0));
    CHECK(sq.coeff(0b11) == doctest::Approx(0));
}

TEST_CASE("products expand by subset convolution") {
    // (1 + t0)(2 + 3 t1) = 2 + 2 t0 + 3 t1 + 3 t0 t1
    Jet a(2, 1.0), b(2, 2.0);
    a.coeff(0b01) = 1.0;
    b.coeff(0b10) = 3.0;
    Jet p = a * b;
    CHECK(p.value() == doctest::Approx(2));
    CHECK(p.coeff(0b01) == doctest::Approx(2));
    CHECK(p.coeff(0b10) == doctest::Approx(3));
    CHECK(p.coeff(0b11) == doctest::Approx(3));
}

TEST_CASE("division and sqrt invert multiplication") {
    Jet a(3, 2.0);
    a.coeff(0b001) = 0.5;
    a.coeff(0b010) = -1.0;
    a.coeff(0b110) = 0.25;
    Jet r = sqrt(a);
    Jet back = r * r;
    for (unsigned m = 0; m < 8; ++m)
        CHECK(back.coeff(m) == doctest::Approx(a.coeff(m)).epsilon(1e-12));
    Jet q = a / a;
    CHECK(q.value() == doctest::Approx(1));
    for (unsigned m = 1; m < 8; ++m)
        CHECK(q.coeff(m) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("mixed partials match hand-computed derivatives") {
    // f = x1 y1^2 y2 + sqrt(y1^2 + y2^2)
    Expr f = parse_metric("x1*y1^2*y2 + sqrt(y1^2 + y2^2)", 2);
    ChartPoint p{{0.7, -0.3}, {0.6, 0.8}};
    // d^2 f / dy1 dy2 = 2 x1 y1 - y1 y2 / |y|^3
    double expect = 2 * 0.7 * 0.6 - 0.6 * 0.8 / 1.0;
    double got = mixed_partial(
        f, {p, {{VarKind::fiber, 1}, {VarKind::fiber, 2}}});
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
    // d^2 f / dx1 dy1 = 2 y1 y2
    double got_x = mixed_partial(
        f, {p, {{VarKind::position, 1}, {VarKind::fiber, 1}}});
    CHECK(got_x == doctest::Approx(2 * 0.6 * 0.8).epsilon(1e-12));
}

TEST_CASE("repeated variables give higher-order derivatives") {
    Expr f = parse_metric("y1^5", 1);
    ChartPoint p{{0.0}, {1.3}};
    DerivativeRequest req{p, {}};
    for (int k = 0; k < 5; ++k) req.vars.push_back({VarKind::fiber, 1});
    CHECK(mixed_partial(f, req) == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("request limits are enforced") {
    Expr f = parse_metric("y1", 1);
    ChartPoint p{{0.0}, {1.0}};
    DerivativeRequest too_many_fibers{p, {}};
    for (int k = 0; k < 6; ++k)
        too_many_fibers.vars.push_back({VarKind::fiber, 1});
    CHECK_THROWS_AS(mixed_partial(f, too_many_fibers), std::invalid_argument);
    DerivativeRequest two_positions{
        p, {{VarKind::position, 1}, {VarKind::position, 1}}};
    CHECK_THROWS_AS(mixed_partial(f, two_positions), std::invalid_argument);
}

TEST_CASE("exact partials agree with the finite-difference oracle") {
    Expr f = parse_metric("sqrt((1 + x1^2)*y1^2 + y2^2) + x2*y1*y2", 2);
    Expr f2 = pow_of(f, 2);
    ChartPoint p{{0.4, -0.2}, {1.1, 0.9}};
    DerivativeRequest req{
        p,
        {{VarKind::fiber, 1}, {VarKind::fiber, 2}, {VarKind::position, 1}}};
    double ad = mixed_partial(f2, req);
    double fd = fd_partial_richardson(f2, req, 5e-3, 1);
    CHECK(ad == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("gradients agree with symbolic differentiation") {
    Expr f = parse_metric("sqrt(y1^2 + y2^2) + x1*y1", 2);
    ChartPoint p{{0.25, -0.5}, {0.6, 0.8}};
    auto gy = gradient_y(f, p);
    auto gx = gradient_x(f, p);
    Environment env = make_env(p, {});
    for (int i = 1; i <= 2; ++i) {
        CHECK(gy[i - 1] ==
              doctest::Approx(evaluate(differentiate(f, {VarKind::fiber, i}), env)));
        CHECK(gx[i - 1] ==
              doctest::Approx(
                  evaluate(differentiate(f, {VarKind::position, i}), env)));
    }
}
