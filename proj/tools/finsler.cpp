// Command-line front end: classify metrics from files or the builtin
// library, evaluate individual tensors at chart points, and run the full
// verification suites.
//
// Exit codes: classify exits 0 whenever a report was produced (verdicts are
// data, not errors) and 2 on hard errors; eval exits 2 on invalid points or
// definitions; verify exits 0 iff every gating suite passes, 1 otherwise.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "finh/verify.hpp"

namespace {

struct Source {
    std::string metric_path;
    std::string builtin_name;
};

finh::LibraryEntry resolve(const Source& src) {
    if (!src.builtin_name.empty()) return finh::builtin(src.builtin_name);
    std::ifstream in(src.metric_path);
    if (!in) throw std::runtime_error("cannot read metric file: " + src.metric_path);
    std::ostringstream text;
    text << in.rdbuf();
    return finh::entry_from_definition(src.metric_path, text.str());
}

void add_source_flags(CLI::App* cmd, Source& src) {
    auto* m = cmd->add_option("--metric", src.metric_path,
                              "path to a metric definition file");
    auto* b = cmd->add_option("--builtin", src.builtin_name,
                              "name of a builtin library metric");
    m->excludes(b);
}

std::vector<double> parse_csv(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        out.push_back(std::stod(item, &used));
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_vec(const finh::Vec& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s + ")";
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
}

std::string human_report(const finh::ClassificationReport& rep) {
    std::string out = "metric: " + rep.metric_name + "  (dimension " +
                      std::to_string(rep.dimension) + ", seed " +
                      std::to_string(rep.seed) + ", " + std::to_string(rep.sites) +
                      " sites)\n";
    if (!rep.error.empty()) out += "error: " + rep.error + "\n";
    char line[256];
    for (const auto& p : rep.predicates) {
        std::snprintf(line, sizeof line, "  %-22s %-13s max residual %s\n",
                      p.name.c_str(), finh::to_string(p.verdict),
                      fmt(p.max_residual).c_str());
        out += line;
    }
    for (const auto& a : rep.audits) {
        std::snprintf(line, sizeof line, "  audit %-28s %-5s %s\n", a.name.c_str(),
                      a.consistent ? "ok" : "VIOLATED", a.detail.c_str());
        out += line;
    }
    return out;
}

int cmd_classify(const Source& src, const finh::ClassifyOptions& opts,
                 const std::string& out_path, const std::string& format) {
    finh::LibraryEntry entry = resolve(src);
    finh::ClassificationReport rep = finh::classify_metric(entry, opts);
    write_out(out_path, format == "report" ? rep.to_json() : human_report(rep));
    return rep.error.empty() ? 0 : 2;
}

int cmd_eval(const Source& src, const std::string& xs, const std::string& ys,
             const std::string& quantity, const std::string& out_path) {
    finh::LibraryEntry entry = resolve(src);
    finh::MetricContext ctx = entry.context();
    finh::ChartPoint p{parse_csv(xs), parse_csv(ys)};
    if (static_cast<int>(p.x.size()) != ctx.n ||
        static_cast<int>(p.y.size()) != ctx.n)
        throw finh::DimensionError("point does not match metric dimension " +
                                   std::to_string(ctx.n));
    if (!finh::point_in_domain(ctx, p))
        throw finh::DomainError("point violates the metric domain (or y = 0)");

    std::string out;
    if (quantity == "sigma" || quantity == "PQ") {
        finh::MetricDefinition def = finh::parse_metric_file(entry.definition);
        if (!def.spherical())
            throw finh::DomainError("quantity '" + quantity +
                                    "' needs a spherically symmetric metric");
        finh::SphericalMetric sm(finh::parse_phi(def.phi_text), def.dimension, 1.0,
                                 def.params);
        auto site = finh::spherical_site(p);
        finh::PhiJet j = finh::phi_jet(sm, site.r, site.s);
        if (quantity == "sigma") {
            finh::SigmaSet s = finh::sigma(j, site.s);
            out = "sigma = (" + fmt(s.sigma0) + ", " + fmt(s.sigma1) + ", " +
                  fmt(s.sigma2) + ", " + fmt(s.sigma3) + ")\n";
        } else {
            finh::SprayFactors f = finh::pq(j, site.r, site.s);
            out = "P = " + fmt(f.P) + "\nQ = " + fmt(f.Q) + "\n";
        }
    } else if (quantity == "F") {
        out = "F = " + fmt(finh::compute_spray(ctx, p).F) + "\n";
    } else if (quantity == "g") {
        finh::Mat g = finh::compute_spray(ctx, p).g;
        out = "g =\n";
        for (int i = 0; i < ctx.n; ++i) {
            finh::Vec row(ctx.n);
            for (int j = 0; j < ctx.n; ++j) row[j] = g(i, j);
            out += "  " + fmt_vec(row) + "\n";
        }
    } else if (quantity == "G") {
        out = "G = " + fmt_vec(finh::compute_spray(ctx, p).G) + "\n";
    } else if (quantity == "H") {
        out = "H = " + fmt_vec(finh::compute_spray(ctx, p).H) + "\n";
    } else if (quantity == "s_scalar") {
        out = "s_scalar_candidate = " +
              fmt(finh::compute_geometry(ctx, p).H_scalar_candidate) + "\n";
    } else if (quantity == "H_ladder" || quantity == "L") {
        finh::PointGeometry geo = finh::compute_geometry(ctx, p);
        if (quantity == "H_ladder") {
            out = "H = " + fmt_vec(geo.H) + "\n";
            out += "H_ij:\n";
            for (int i = 0; i < ctx.n; ++i) {
                finh::Vec row(ctx.n);
                for (int j = 0; j < ctx.n; ++j) row[j] = geo.Hij(i, j);
                out += "  " + fmt_vec(row) + "\n";
            }
            out += "max|H_ijk|  = " + fmt(geo.Hijk.max_abs()) + "\n";
            out += "max|H_ijkh| = " + fmt(geo.Hijkh.max_abs()) + "\n";
        } else {
            out = "max|L_jkh| = " + fmt(geo.L.max_abs()) + "\nL_jkh:\n";
            for (int j = 0; j < ctx.n; ++j)
                for (int k = 0; k < ctx.n; ++k) {
                    finh::Vec row(ctx.n);
                    for (int h = 0; h < ctx.n; ++h) row[h] = geo.L(j, k, h);
                    out += "  [" + std::to_string(j + 1) + "," +
                           std::to_string(k + 1) + ",*] = " + fmt_vec(row) + "\n";
                }
        }
    } else {
        throw std::runtime_error(
            "unknown quantity '" + quantity +
            "' (expected F, g, G, H, H_ladder, L, sigma, PQ, s_scalar)");
    }
    write_out(out_path, out);
    return 0;
}

int cmd_verify(const finh::VerifyOptions& opts, const std::string& out_path) {
    auto results = finh::run_all_suites(opts);
    std::string out;
    char line[512];
    bool all_pass = true;
    std::string first_witness;
    for (const auto& r : results) {
        const char* status = r.gating ? (r.pass ? "pass" : "FAIL") : "info";
        std::snprintf(line, sizeof line, "  %-34s %-5s worst residual %s\n",
                      r.name.c_str(), status, fmt(r.worst).c_str());
        out += line;
        if (r.gating && !r.pass) {
            all_pass = false;
            if (first_witness.empty())
                first_witness = r.name + ": " + (r.witness.empty() ? "residual above tolerance" : r.witness);
        }
    }
    out += all_pass ? "verify: all suites passed\n"
                    : "verify: FAILED — " + first_witness + "\n";
    write_out(out_path, out);
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finsler metric geometry: classify, evaluate, verify"};
    app.require_subcommand(1);

    Source src;
    uint64_t seed = 42;
    int sites = 50;
    double tol = 1e-9;
    std::string out_path, format = "human", xs, ys, quantity = "F";

    CLI::App* classify = app.add_subcommand("classify",
        "classify a metric (flatness, Berwald/Landsberg classes, audits)");
    add_source_flags(classify, src);
    classify->add_option("--seed", seed, "sampling seed");
    classify->add_option("--sites", sites, "number of sample sites")
        ->check(CLI::PositiveNumber);
    classify->add_option("--tol", tol, "identity tolerance")
        ->check(CLI::PositiveNumber);
    classify->add_option("--out", out_path, "output path (default stdout)");
    classify->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"human", "report"}));

    CLI::App* eval = app.add_subcommand("eval",
        "evaluate one quantity at a chart point");
    add_source_flags(eval, src);
    eval->add_option("--x", xs, "position coordinates a,b,...")->required();
    eval->add_option("--y", ys, "fiber coordinates a,b,...")->required();
    eval->add_option("--q", quantity,
                     "quantity: F, g, G, H, H_ladder, L, sigma, PQ, s_scalar");
    eval->add_option("--out", out_path, "output path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify",
        "run the identity, regression, oracle and FD suites");
    verify->add_option("--seed", seed, "sampling seed");
    verify->add_option("--sites", sites, "sites per suite")
        ->check(CLI::PositiveNumber);
    verify->add_option("--tol", tol, "identity tolerance")
        ->check(CLI::PositiveNumber);
    verify->add_option("--out", out_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(classify)) {
            finh::ClassifyOptions opts;
            opts.seed = seed;
            opts.sites = sites;
            opts.tol = tol;
            return cmd_classify(src, opts, out_path, format);
        }
        if (app.got_subcommand(eval))
            return cmd_eval(src, xs, ys, quantity, out_path);
        finh::VerifyOptions vopts;
        vopts.seed = seed;
        vopts.sites = std::min(sites, 25);
        vopts.tol = tol;
        // keep the FD tolerance at its default ratio to the identity
        // tolerance so --tol tightens (or relaxes) both suites together
        vopts.fd_tol = tol * 1e4;
        return cmd_verify(vopts, out_path);
    } catch (const finh::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
