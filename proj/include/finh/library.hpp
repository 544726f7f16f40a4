#pragma once

// Builtin metric definitions: every worked example from the source material
// plus two baselines, each with a sampling region and the classification
// flags the entry is expected to reproduce. Entries are stored as
// metric-definition file content, so they are exportable as-is.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "finh/geometry.hpp"
#include "finh/spherical.hpp"

namespace finh {

struct LibraryEntry {
    std::string name;
    std::string definition;  // metric-definition file content
    std::string description;
    std::vector<std::pair<double, double>> xbox;  // per-coordinate x ranges
    double ymin = 0.3;
    double ymax = 1.5;
    // predicate name -> expected verdict (true = holds); only populated
    // where the expected outcome is established
    std::map<std::string, bool> expected;

    MetricContext context() const {
        return make_context(parse_metric_file(definition));
    }
};

inline std::vector<LibraryEntry> builtin_entries() {
    std::vector<LibraryEntry> v;

    v.push_back({
        "euclidean_2d",
        "dimension = 2\nmetric = \"sqrt(y1^2 + y2^2)\"\n",
        "Euclidean baseline",
        {{-1, 1}, {-1, 1}},
        0.3, 1.5,
        {{"dually_flat", true}, {"projectively_flat", true}, {"berwald", true},
         {"h_berwald", true}, {"h_landsberg", true}, {"s_scalar_exists", true},
         {"condition_I", true}, {"condition_II", true}},
    });

    v.push_back({
        "riemannian_curved",
        "dimension = 2\nmetric = \"sqrt((1 + x1^2)*y1^2 + y2^2)\"\n",
        "curved Riemannian baseline (nonzero spray, zero Cartan tensor)",
        {{-1, 1}, {-1, 1}},
        0.3, 1.5,
        {{"dually_flat", true}, {"projectively_flat", false}, {"berwald", true},
         {"h_berwald", true}, {"h_landsberg", true}, {"s_scalar_exists", true},
         {"condition_I", true}, {"condition_II", true}},
    });

    v.push_back({
        "ex37",
        "dimension = 4\n"
        "metric = \"sqrt(sqrt(y1^4 + y2^4 + y3^4) + x4*y4^2)\"\n"
        "domain = \"sqrt(y1^4 + y2^4 + y3^4) + x4*y4^2\"\n",
        "quartic-root metric with quadratic covariant coefficients",
        {{-1, 1}, {-1, 1}, {-1, 1}, {0.1, 2}},
        0.3, 1.5,
        {{"dually_flat", true}, {"projectively_flat", false}, {"berwald", true},
         {"h_berwald", true}, {"h_landsberg", true}, {"s_scalar_exists", true}},
    });

    auto ex51 = [](const std::string& name, int n, std::vector<double> a) {
        std::string metric = "c*sqrt(";
        for (int i = 1; i <= n; ++i)
            metric += "y" + std::to_string(i) + "^2" + (i < n ? " + " : "");
        metric += ")";
        for (int i = 1; i <= n; ++i)
            metric += " + (a" + std::to_string(i) + " + x" + std::to_string(i) +
                      ")*y" + std::to_string(i);
        std::string def = "dimension = " + std::to_string(n) + "\nmetric = \"" +
                          metric + "\"\nparam c = 1\n";
        for (int i = 1; i <= n; ++i)
            def += "param a" + std::to_string(i) + " = " +
                   detail::format_double(a[i - 1]) + "\n";
        LibraryEntry e;
        e.name = name;
        e.definition = def;
        e.description = "norm plus inner-product family, H-Landsberg but not H-Berwald";
        e.xbox.assign(n, {-0.25, 0.25});
        e.expected = {{"dually_flat", false}, {"projectively_flat", true},
                      {"berwald", false}, {"h_berwald", false},
                      {"h_landsberg", true}, {"s_scalar_exists", false}};
        return e;
    };
    v.push_back(ex51("ex51_2d", 2, {0, 0}));
    v.push_back(ex51("ex51_2d_a", 2, {0.1, 0.2}));
    v.push_back(ex51("ex51_3d", 3, {0, 0, 0}));
    v.push_back(ex51("ex51_3d_a", 3, {0.1, 0.2, 0.3}));

    v.push_back({
        "ex52",
        "dimension = 3\n"
        "metric = \"sqrt((a1*y1^4 + a2*y1^2*y3^2 + a3*y2^2*y3^2)"
        "/(b1*y1^2 + b2*y2^2 + b3*y3^2) + x3^2*y1^2 + x3^3*y2^2)\"\n"
        "param a1 = 1\nparam a2 = 1\nparam a3 = 1\n"
        "param b1 = 1\nparam b2 = 1\nparam b3 = 1\n",
        "rational-quartic family with quadratic covariant coefficients "
        "(f1 = x3^2, f2 = x3^3)",
        {{-1, 1}, {-1, 1}, {0.5, 1.5}},
        0.3, 1.5,
        {{"dually_flat", false}, {"s_scalar_exists", false},
         {"h_berwald", true}, {"h_landsberg", true}},
    });

    // Two essentially different metrics sharing one geodesic spray
    // (a1 = 0, a2 = a). Sampling needs <a,y> = a*y2 > 0.
    auto ex33 = [](const std::string& name, bool with_one) {
        std::string z1 = "((1 + a*x2)*y1 - (a*y2)*x1)/(a*y2)";
        std::string z2 = "((1 + a*x2)*y2 - (a*y2)*x2)/(a*y2)";
        std::string inner = std::string(with_one ? "1 + " : "") + "(" + z1 +
                            ")^2 + (" + z2 + ")^2";
        LibraryEntry e;
        e.name = name;
        e.definition = "dimension = 2\nmetric = \"(a*y2)*sqrt(" + inner +
                       ")/(1 + a*x2)^2\"\nparam a = 0.5\ndomain = \"y2 - 0.05\"\n";
        e.description = "metrizability pair: shared spray, different covariant "
                       "coefficients";
        e.xbox = {{-0.3, 0.3}, {-0.3, 0.3}};
        return e;
    };
    v.push_back(ex33("ex33_f", false));
    v.push_back(ex33("ex33_fbar", true));

    auto najafi = [](const std::string& name, int n, double c) {
        LibraryEntry e;
        e.name = name;
        std::string r2;
        for (int i = 1; i <= n; ++i)
            r2 += "x" + std::to_string(i) + "^2" + (i < n ? " + " : "");
        e.definition =
            "dimension = " + std::to_string(n) +
            "\nspherical_phi = \"(sqrt((k^2 - c^2*r^2) + c^2*s^2) + c*s)"
            " / (k^2 - c^2*r^2)\"\n"
            "param k = 1\nparam c = " + detail::format_double(c) + "\n"
            "domain = \"" + r2 + " - 0.01\"\n";
        e.description = "projectively and dually flat spherically symmetric family";
        e.xbox.assign(n, {-0.5, 0.5});
        e.expected = {{"dually_flat", true}, {"projectively_flat", true},
                      {"berwald", false}, {"h_berwald", false},
                      {"h_landsberg", true}, {"s_scalar_exists", true}};
        return e;
    };
    v.push_back(najafi("najafi_2d_c01", 2, 0.1));
    v.push_back(najafi("najafi_2d_c03", 2, 0.3));
    v.push_back(najafi("najafi_3d_c01", 3, 0.1));
    v.push_back(najafi("najafi_3d_c03", 3, 0.3));

    v.push_back({
        "sphsym_generic",
        "dimension = 2\nspherical_phi = \"1 + s/4\"\n"
        "domain = \"x1^2 + x2^2 - 0.01\"\n",
        "generic spherically symmetric profile (oracle cross-checks)",
        {{-0.5, 0.5}, {-0.5, 0.5}},
        0.3, 1.5,
        {{"projectively_flat", true}, {"h_landsberg", true}, {"h_berwald", false}},
    });
    v.push_back({
        "sphsym_generic2",
        "dimension = 2\nspherical_phi = \"1 + s/4 + r^2/10\"\n"
        "domain = \"x1^2 + x2^2 - 0.01\"\n",
        "second generic profile with r-dependence (oracle cross-checks)",
        {{-0.5, 0.5}, {-0.5, 0.5}},
        0.3, 1.5,
        {},
    });

    return v;
}

inline const LibraryEntry& builtin(const std::string& name) {
    static const std::vector<LibraryEntry> entries = builtin_entries();
    static const std::map<std::string, std::string> aliases = {
        {"euclidean", "euclidean_2d"},
        {"ex51", "ex51_2d"},
        {"najafi", "najafi_2d_c03"},
    };
    std::string wanted = name;
    auto al = aliases.find(name);
    if (al != aliases.end()) wanted = al->second;
    for (const auto& e : entries)
        if (e.name == wanted) return e;
    throw std::invalid_argument("unknown builtin metric '" + name + "'");
}

// The two entries of the shared-spray pair.
inline std::pair<const LibraryEntry*, const LibraryEntry*> ex33_pair() {
    return {&builtin("ex33_f"), &builtin("ex33_fbar")};
}

// ---- deterministic site sampling -------------------------------------------

class SamplingError : public std::runtime_error {
public:
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

// Implementation-defined distributions would break cross-platform
// determinism; draw uniforms from the raw 64-bit stream instead.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace detail

inline std::vector<ChartPoint> sample_sites(const LibraryEntry& entry,
                                            uint64_t seed, int count,
                                            int redraw_cap = 100,
                                            double cond_max = 1e12) {
    MetricContext ctx = entry.context();
    int n = ctx.n;
    std::mt19937_64 rng(seed);
    std::vector<ChartPoint> sites;
    sites.reserve(count);
    int domain_rejects = 0, degenerate_rejects = 0, eval_rejects = 0;
    for (int s = 0; s < count; ++s) {
        bool found = false;
        for (int attempt = 0; attempt < redraw_cap && !found; ++attempt) {
            ChartPoint p;
            p.x.resize(n);
            p.y.resize(n);
            for (int i = 0; i < n; ++i)
                p.x[i] = detail::uniform(rng, entry.xbox[i].first, entry.xbox[i].second);
            double norm = 0;
            for (int i = 0; i < n; ++i) {
                p.y[i] = detail::uniform(rng, -entry.ymax, entry.ymax);
                norm += p.y[i] * p.y[i];
            }
            if (std::sqrt(norm) < entry.ymin) { ++domain_rejects; continue; }
            if (!point_in_domain(ctx, p)) { ++domain_rejects; continue; }
            try {
                GeometryOptions opts;
                opts.cond_max = cond_max;
                compute_spray(ctx, p, opts);
            } catch (const NotFinslerPointError&) {
                ++degenerate_rejects;
                continue;
            } catch (const DomainError&) {
                ++eval_rejects;
                continue;
            }
            sites.push_back(std::move(p));
            found = true;
        }
        if (!found) {
            std::string worst = "domain constraint";
            int w = domain_rejects;
            if (degenerate_rejects > w) { worst = "metric nondegeneracy"; w = degenerate_rejects; }
            if (eval_rejects > w) worst = "expression domain";
            throw SamplingError("redraw cap exceeded for '" + entry.name +
                                "'; most violated: " + worst);
        }
    }
    return sites;
}

}  // namespace finh
