#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <finh/expr.hpp>

#include <cmath>
#include <map>

using namespace finh;

namespace {

Environment env2(double x1, double x2, double y1, double y2,
                 Params params = {}) {
    Environment e;
    e.n = 2;
    e.x = {x1, x2};
    e.y = {y1, y2};
    e.params = std::move(params);
    return e;
}

}  // namespace

TEST_CASE("parser handles precedence and unary minus") {
    Expr e = parse_metric("-y1 + 2*y2^2", 2);
    CHECK(evaluate(e, env2(0, 0, 3, 2)) == doctest::Approx(-3 + 8));
    Expr g = parse_metric("(y1 + y2)/(y1 - y2)", 2);
    CHECK(evaluate(g, env2(0, 0, 3, 1)) == doctest::Approx(2));
}

TEST_CASE("parser accepts sqrt, parameters, and fractional powers") {
    Expr e = parse_metric("c*sqrt(y1^2 + y2^2) + a1*y1", 2);
    Environment env = env2(0, 0, 3, 4, {{"c", 2.0}, {"a1", 0.5}});
    CHECK(evaluate(e, env) == doctest::Approx(2 * 5 + 1.5));
    Expr f = parse_metric("(y1^4 + y2^4)^(1/2)", 2);
    CHECK(evaluate(f, env2(0, 0, 1, 1)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("parse errors carry a location") {
    try {
        parse_metric("y1 + + y2", 2);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.line == 1);
        CHECK(err.column >= 6);
    }
    CHECK_THROWS_AS(parse_metric("y3", 2), ParseError);       // out of range
    CHECK_THROWS_AS(parse_metric("y1 + (y2", 2), ParseError);  // unbalanced
}

TEST_CASE("evaluation reports domain violations") {
    Expr e = parse_metric("sqrt(y1)", 1);
    Environment env;
    env.n = 1;
    env.x = {0};
    env.y = {-1};
    CHECK_THROWS_AS(evaluate(e, env), DomainError);
    Expr f = parse_metric("y1/x1", 1);
    Environment env0;
    env0.n = 1;
    env0.x = {0};
    env0.y = {1};
    CHECK_THROWS_AS(evaluate(f, env0), DomainError);
    Expr g = parse_metric("c*y1", 1);
    Environment envp;
    envp.n = 1;
    envp.x = {0};
    envp.y = {1};
    CHECK_THROWS_AS(evaluate(g, envp), DomainError);  // missing parameter
}

TEST_CASE("symbolic differentiation matches hand results") {
    Expr e = parse_metric("x1*y1^3 + sqrt(y1^2 + y2^2)", 2);
    Expr d = differentiate(e, {VarKind::fiber, 1});
    Environment env = env2(2, 0, 3, 4);
    // d/dy1 = 3 x1 y1^2 + y1/|y|
    CHECK(evaluate(d, env) == doctest::Approx(3 * 2 * 9 + 3.0 / 5.0));
    Expr dx = differentiate(e, {VarKind::position, 1});
    CHECK(evaluate(dx, env) == doctest::Approx(27));
}

TEST_CASE("substitution and coordinate change compose correctly") {
    // x1 -> xt1 + xt1^2 pulls y1 -> (1 + 2 xt1) yt1.
    Expr F = parse_metric("x1*y1", 1);
    Expr psi = position(1) + pow_of(position(1), 2);
    Expr Ft = change_coordinates(F, {psi});
    Environment env;
    env.n = 1;
    env.x = {0.5};
    env.y = {2.0};
    double expect = (0.5 + 0.25) * (1 + 2 * 0.5) * 2.0;
    CHECK(evaluate(Ft, env) == doctest::Approx(expect));
}

TEST_CASE("to_string round-trips through the parser") {
    Expr e = parse_metric("sqrt((1 + x1^2)*y1^2 + y2^2) + c*y1", 2);
    Expr back = parse_metric(to_string(e), 2);
    Environment env = env2(0.3, -0.2, 1.1, 0.7, {{"c", 0.25}});
    CHECK(evaluate(back, env) == doctest::Approx(evaluate(e, env)));
}

TEST_CASE("metric definition files parse all keys") {
    std::string text =
        "# comment line\n"
        "dimension = 3\n"
        "metric = \"sqrt(y1^2 + y2^2 + y3^2)\"  # trailing comment\n"
        "param a = 0.25\n"
        "domain = \"x3 - 0.1\"\n";
    MetricDefinition def = parse_metric_file(text);
    CHECK(def.dimension == 3);
    CHECK(def.metric_text == "sqrt(y1^2 + y2^2 + y3^2)");
    CHECK(def.params.at("a") == doctest::Approx(0.25));
    REQUIRE(def.domain_text.has_value());
    CHECK(!def.spherical());
}

TEST_CASE("metric definition files validate structure") {
    CHECK_THROWS_AS(parse_metric_file("metric = \"y1\"\n"), ParseError);
    CHECK_THROWS_AS(parse_metric_file("dimension = 2\n"), ParseError);
    CHECK_THROWS_AS(
        parse_metric_file("dimension = 2\nmetric = \"y1\"\nspherical_phi = \"1\"\n"),
        ParseError);
    CHECK_THROWS_AS(parse_metric_file("dimension = 2\nbogus = \"y1\"\n"),
                    ParseError);
    MetricDefinition sph = parse_metric_file(
        "dimension = 2\nspherical_phi = \"1 + s/4\"\n");
    CHECK(sph.spherical());
}
