#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <finh/geometry.hpp>
#include <finh/library.hpp>
#include <finh/spherical.hpp>

#include <cmath>

using namespace finh;

namespace {

SphericalMetric najafi_metric(int n, double c) {
    return SphericalMetric(najafi_phi(), n, 1.0, {{"k", 1.0}, {"c", c}});
}

double eval_phi(const SphericalMetric& m, double r, double s) {
    Environment env;
    env.n = 2;
    env.x = {r, s};
    env.y = {0, 0};
    env.params = m.params;
    return evaluate(m.phi, env);
}

}  // namespace

TEST_CASE("projectively and dually flat family: phi spot values") {
    SphericalMetric m = najafi_metric(2, 0.3);
    CHECK(eval_phi(m, 0.5, 0.1) ==
          doctest::Approx(1.0425995309567868).epsilon(1e-14));
    // at r = s = 0: phi = 1/k = 1, phi_s = c/k^2 = 0.3, phi_ss = c^2/k^3
    PhiJet j = phi_jet(m, 0, 0);
    CHECK(j.phi == doctest::Approx(1.0));
    CHECK(j.phi_s == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(j.phi_ss == doctest::Approx(0.09).epsilon(1e-12));
    SigmaSet sig = sigma(j, 0);
    CHECK(sig.sigma0 == doctest::Approx(1.0));
    CHECK(sig.sigma1 == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(sig.sigma2 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(sig.sigma3 == doctest::Approx(0.0));
}

TEST_CASE("sigma coefficients satisfy their algebraic identities") {
    SphericalMetric m(parse_phi("1 + s/4 + r^2/10"), 3);
    for (auto [r, s] : {std::pair{0.3, 0.1}, {0.7, -0.4}, {0.9, 0.6}}) {
        PhiJet j = phi_jet(m, r, s);
        SigmaSet sig = sigma(j, s);
        CHECK(std::abs(s * sig.sigma2 + sig.sigma3) < 1e-12);
        CHECK(std::abs(s * sig.sigma1 + sig.sigma2 - j.phi_s * j.phi) < 1e-12);
    }
}

TEST_CASE("closed-form tensors agree with the general pipeline") {
    const LibraryEntry& entry = builtin("najafi_3d_c03");
    MetricContext ctx = entry.context();
    SphericalMetric m = najafi_metric(3, 0.3);
    for (const ChartPoint& p : sample_sites(entry, 5, 10)) {
        PointGeometry geo = compute_geometry(ctx, p);
        Mat g = spherical_metric_tensor(m, p);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(g(i, j) == doctest::Approx(geo.g(i, j)).epsilon(1e-8));
        Vec G = spherical_spray(m, p);
        Vec H = spherical_H(m, p);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(G[i] - geo.G[i]) < 1e-8);
            CHECK(std::abs(H[i] - geo.H[i]) < 1e-8);
        }
    }
}

TEST_CASE("closed-form spray scalar matches the pipeline candidate") {
    // spot value: k = 1, c = 0.3, x = 0, y = (1, 0) gives H = c/(6 k^3) * ... = 0.05
    ChartPoint p0{{0, 0}, {1, 0}};
    CHECK(najafi_s_scalar(1.0, 0.3, p0) == doctest::Approx(0.05).epsilon(1e-15));
    const LibraryEntry& entry = builtin("najafi_2d_c03");
    MetricContext ctx = entry.context();
    for (const ChartPoint& p : sample_sites(entry, 9, 10)) {
        PointGeometry geo = compute_geometry(ctx, p);
        CHECK(geo.H_scalar_candidate ==
              doctest::Approx(najafi_s_scalar(1.0, 0.3, p)).epsilon(1e-9));
        // H_i = (1/3) d(y^i H_i)/dy — equivalently y^i H_i = 3H
        double yH = 0;
        for (int i = 0; i < 2; ++i) yH += p.y[i] * geo.H[i];
        CHECK(yH == doctest::Approx(3 * geo.H_scalar_candidate).epsilon(1e-9));
    }
}

TEST_CASE("spray factors are rejected at the coordinate origin") {
    SphericalMetric m = najafi_metric(2, 0.1);
    CHECK_THROWS_AS(pq(phi_jet(m, 0, 0), 0, 0), DomainError);
    ChartPoint origin{{0, 0}, {1, 0.2}};
    CHECK_THROWS_AS(spherical_spray(m, origin), DomainError);
}

TEST_CASE("spherical definition files compose into full charts") {
    MetricDefinition def = parse_metric_file(
        "dimension = 2\nspherical_phi = \"1 + s/4\"\n");
    MetricContext ctx = make_context(def);
    // F = |y| + <x,y>/4
    ChartPoint p{{0.4, 0.2}, {0.6, 0.8}};
    double expect = 1.0 + (0.4 * 0.6 + 0.2 * 0.8) / 4.0;
    CHECK(evaluate(ctx.F, make_env(p, ctx.params)) ==
          doctest::Approx(expect).epsilon(1e-14));
}
