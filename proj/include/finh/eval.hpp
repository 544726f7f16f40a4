#pragma once

// Jet lifting of expression evaluation, mixed partial derivatives up to
// total order 6 (at most 5 fiber + 1 position direction), and the
// finite-difference oracle used to cross-check them.

#include <algorithm>
#include <cmath>
#include <vector>

#include "finh/expr.hpp"
#include "finh/jet.hpp"

namespace finh {

struct ChartPoint {
    std::vector<double> x;
    std::vector<double> y;

    int dimension() const { return static_cast<int>(x.size()); }
};

inline Environment make_env(const ChartPoint& p, const Params& params) {
    Environment env;
    env.n = p.dimension();
    env.x = p.x;
    env.y = p.y;
    env.params = params;
    return env;
}

// A chart point whose coordinates carry jet seeds. Each tag is a first-order
// infinitesimal seeded along a direction in the (x, y) chart variables;
// directions may be unit vectors or arbitrary combinations (used for the
// y^r dx_r contractions in the geometry pipeline).
class JetPoint {
public:
    JetPoint(const ChartPoint& p, const Params& params, int tags)
        : n_(p.dimension()), tags_(tags), params_(&params) {
        x_.reserve(n_);
        y_.reserve(n_);
        for (int i = 0; i < n_; ++i) x_.emplace_back(tags, p.x[i]);
        for (int i = 0; i < n_; ++i) y_.emplace_back(tags, p.y[i]);
    }

    int dimension() const { return n_; }
    int tags() const { return tags_; }

    void seed(int tag, VarRef var, double weight = 1.0) {
        Jet& j = var.kind == VarKind::position ? x_[var.index - 1] : y_[var.index - 1];
        j.coeff(1u << tag) += weight;
    }

    // Seed one tag along a direction in the position variables.
    void seed_position_direction(int tag, const std::vector<double>& dir) {
        for (int i = 0; i < n_; ++i) x_[i].coeff(1u << tag) += dir[i];
    }

    const Jet& var(VarRef v) const {
        return v.kind == VarKind::position ? x_[v.index - 1] : y_[v.index - 1];
    }
    const Params& params() const { return *params_; }

private:
    int n_;
    int tags_;
    std::vector<Jet> x_, y_;
    const Params* params_;
};

namespace detail {

inline Jet jet_eval(const Node& n, const JetPoint& p) {
    switch (n.op) {
        case Op::constant: return Jet(p.tags(), n.value);
        case Op::variable:
            if (n.var.index < 1 || n.var.index > p.dimension())
                throw DimensionError("variable " + n.var.name() +
                                     " out of range for dimension " +
                                     std::to_string(p.dimension()));
            return p.var(n.var);
        case Op::parameter: {
            auto it = p.params().find(n.name);
            if (it == p.params().end())
                throw DomainError("unbound parameter '" + n.name + "'");
            return Jet(p.tags(), it->second);
        }
        case Op::add: return jet_eval(*n.a, p) + jet_eval(*n.b, p);
        case Op::sub: return jet_eval(*n.a, p) - jet_eval(*n.b, p);
        case Op::mul: return jet_eval(*n.a, p) * jet_eval(*n.b, p);
        case Op::div: return jet_eval(*n.a, p) / jet_eval(*n.b, p);
        case Op::neg: return -jet_eval(*n.a, p);
        case Op::sqrt_fn: return sqrt(jet_eval(*n.a, p));
        case Op::pow_fn: return pow_rational(jet_eval(*n.a, p), n.exp_num, n.exp_den);
    }
    throw std::logic_error("unhandled node kind");
}

}  // namespace detail

inline Jet jet_evaluate(const Expr& e, const JetPoint& p) {
    return detail::jet_eval(e.root(), p);
}

// ---- mixed partials --------------------------------------------------------

struct DerivativeRequest {
    ChartPoint base;
    std::vector<VarRef> vars;  // multiset; at most 5 fiber + 1 position

    int fiber_count() const {
        return static_cast<int>(std::count_if(vars.begin(), vars.end(), [](VarRef v) {
            return v.kind == VarKind::fiber;
        }));
    }
    int position_count() const { return static_cast<int>(vars.size()) - fiber_count(); }
};

inline void validate(const DerivativeRequest& req) {
    if (req.vars.size() > 6)
        throw std::invalid_argument("derivative request exceeds total order 6");
    if (req.fiber_count() > 5)
        throw std::invalid_argument("derivative request exceeds 5 fiber derivatives");
    if (req.position_count() > 1)
        throw std::invalid_argument("derivative request exceeds 1 position derivative");
}

// Exact mixed partial at the base point. Repeated variables are handled by
// seeding distinct tags on the same variable.
inline double mixed_partial(const Expr& e, const DerivativeRequest& req,
                            const Params& params = {}) {
    validate(req);
    int k = static_cast<int>(req.vars.size());
    JetPoint p(req.base, params, k);
    for (int t = 0; t < k; ++t) p.seed(t, req.vars[t]);
    return jet_evaluate(e, p).coeff((1u << k) - 1);
}

inline std::vector<double> gradient_y(const Expr& e, const ChartPoint& p,
                                      const Params& params = {}) {
    std::vector<double> g(p.dimension());
    for (int i = 1; i <= p.dimension(); ++i)
        g[i - 1] = mixed_partial(e, {p, {{VarKind::fiber, i}}}, params);
    return g;
}

inline std::vector<double> gradient_x(const Expr& e, const ChartPoint& p,
                                      const Params& params = {}) {
    std::vector<double> g(p.dimension());
    for (int i = 1; i <= p.dimension(); ++i)
        g[i - 1] = mixed_partial(e, {p, {{VarKind::position, i}}}, params);
    return g;
}

// ---- finite-difference oracle ----------------------------------------------

namespace detail {

// Central difference with one Richardson level (the 5-point fourth-order
// stencil), applied recursively per differentiation direction.
inline double fd_recurse(const Expr& e, Environment& env,
                         const std::vector<VarRef>& vars, size_t idx, double step) {
    if (idx == vars.size()) return evaluate(e, env);
    VarRef v = vars[idx];
    double& coord = v.kind == VarKind::position ? env.x[v.index - 1] : env.y[v.index - 1];
    // Fiber directions: the natural length scale of a homogeneous F is |y|,
    // and high-order fiber derivatives vary on that scale; using it keeps the
    // truncation error of high orders under control at small |y|.
    double scale = std::max(1.0, std::abs(coord));
    if (v.kind == VarKind::fiber) {
        double ynorm2 = 0;
        for (double yi : env.y) ynorm2 += yi * yi;
        scale = std::max(std::sqrt(ynorm2), std::abs(coord));
    }
    double h = step * scale;
    double saved = coord;
    auto at = [&](double offset) {
        coord = saved + offset;
        double r = fd_recurse(e, env, vars, idx + 1, step);
        coord = saved;
        return r;
    };
    double d = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
    return d;
}

}  // namespace detail

inline double fd_partial(const Expr& e, const DerivativeRequest& req, double step,
                         const Params& params = {}) {
    validate(req);
    if (step <= 0) throw std::invalid_argument("fd step must be positive");
    Environment env = make_env(req.base, params);
    return detail::fd_recurse(e, env, req.vars, 0, step);
}

// Richardson ladder over the whole stencil: the error of the recursive
// 4th-order stencil scales uniformly with the step, so each halving level
// gains two orders of accuracy. High-order requests need the headroom of a
// large base step plus extrapolation before roundoff takes over.
inline double fd_partial_richardson(const Expr& e, const DerivativeRequest& req,
                                    double step, int levels,
                                    const Params& params = {}) {
    validate(req);
    if (step <= 0) throw std::invalid_argument("fd step must be positive");
    Environment env = make_env(req.base, params);
    std::vector<double> row(levels + 1);
    for (int i = 0; i <= levels; ++i)
        row[i] = detail::fd_recurse(e, env, req.vars, 0, step / (1 << i));
    double factor = 16.0;
    for (int l = 0; l < levels; ++l) {
        for (int i = 0; i < levels - l; ++i)
            row[i] = (factor * row[i + 1] - row[i]) / (factor - 1.0);
        factor *= 4.0;
    }
    return row[0];
}

// Default step from the jets design notes: 1e-3 * max(1, |coordinate|)
// (the coordinate scaling happens inside the stencil).
inline double fd_partial(const Expr& e, const DerivativeRequest& req,
                         const Params& params = {}) {
    return fd_partial(e, req, 1e-3, params);
}

}  // namespace finh
