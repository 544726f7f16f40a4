#pragma once

// Expression trees for Finsler metric definitions: a deliberately small
// grammar (constants, x_i, y_i, + - * /, rational-constant powers, sqrt,
// named parameters) that keeps jet lifting total and exact.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace finh {

enum class VarKind { position, fiber };

struct VarRef {
    VarKind kind;
    int index;  // 1-based

    friend bool operator==(const VarRef& a, const VarRef& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator<(const VarRef& a, const VarRef& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.index < b.index;
    }
    std::string name() const {
        return (kind == VarKind::position ? "x" : "y") + std::to_string(index);
    }
};

using Params = std::map<std::string, double>;

struct Environment {
    int n = 0;
    std::vector<double> x;  // size n
    std::vector<double> y;  // size n
    Params params;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(msg + " at line " + std::to_string(line) +
                             ", column " + std::to_string(column)),
          line(line), column(column) {}
    int line;
    int column;
};

class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class Op {
    constant,
    variable,
    parameter,
    add,
    sub,
    mul,
    div,
    neg,
    sqrt_fn,
    pow_fn,  // rational constant exponent
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    double value = 0.0;            // constant
    VarRef var{VarKind::fiber, 1}; // variable
    std::string name;              // parameter
    long long exp_num = 1;         // pow exponent numerator
    long long exp_den = 1;         // pow exponent denominator (> 0)
    NodePtr a, b;
};

class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr n) : node_(std::move(n)) {}

    const Node& root() const { return *node_; }
    const NodePtr& ptr() const { return node_; }
    bool valid() const { return node_ != nullptr; }

    // Largest variable index referenced.
    int max_index() const { return max_index(node_.get()); }

private:
    static int max_index(const Node* n) {
        if (!n) return 0;
        int m = n->op == Op::variable ? n->var.index : 0;
        if (n->a) m = std::max(m, max_index(n->a.get()));
        if (n->b) m = std::max(m, max_index(n->b.get()));
        return m;
    }
    NodePtr node_;
};

// ---- smart constructors (constant folding only) ----------------------------

inline Expr constant(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::constant;
    n->value = v;
    return Expr(n);
}

inline Expr variable(VarKind k, int index) {
    auto n = std::make_shared<Node>();
    n->op = Op::variable;
    n->var = VarRef{k, index};
    return Expr(n);
}

inline Expr position(int i) { return variable(VarKind::position, i); }
inline Expr fiber(int i) { return variable(VarKind::fiber, i); }

inline Expr parameter(const std::string& name) {
    auto n = std::make_shared<Node>();
    n->op = Op::parameter;
    n->name = name;
    return Expr(n);
}

inline bool is_const(const Expr& e, double v) {
    return e.root().op == Op::constant && e.root().value == v;
}
inline bool is_const(const Expr& e) { return e.root().op == Op::constant; }

inline Expr operator+(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return constant(a.root().value + b.root().value);
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::add;
    n->a = a.ptr();
    n->b = b.ptr();
    return Expr(n);
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return constant(a.root().value - b.root().value);
    if (is_const(b, 0)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::sub;
    n->a = a.ptr();
    n->b = b.ptr();
    return Expr(n);
}

inline Expr operator-(const Expr& a) {
    if (is_const(a)) return constant(-a.root().value);
    if (a.root().op == Op::neg) return Expr(a.root().a);
    auto n = std::make_shared<Node>();
    n->op = Op::neg;
    n->a = a.ptr();
    return Expr(n);
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) return constant(a.root().value * b.root().value);
    if (is_const(a, 0) || is_const(b, 0)) return constant(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::mul;
    n->a = a.ptr();
    n->b = b.ptr();
    return Expr(n);
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b) && b.root().value != 0)
        return constant(a.root().value / b.root().value);
    if (is_const(a, 0) && !is_const(b, 0)) return constant(0);
    if (is_const(b, 1)) return a;
    auto n = std::make_shared<Node>();
    n->op = Op::div;
    n->a = a.ptr();
    n->b = b.ptr();
    return Expr(n);
}

inline Expr sqrt_of(const Expr& a) {
    if (is_const(a) && a.root().value >= 0) return constant(std::sqrt(a.root().value));
    auto n = std::make_shared<Node>();
    n->op = Op::sqrt_fn;
    n->a = a.ptr();
    return Expr(n);
}

inline Expr pow_of(const Expr& a, long long num, long long den = 1) {
    if (den <= 0) throw std::invalid_argument("power denominator must be positive");
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) return constant(1);
    if (num == den) return a;
    if (is_const(a)) {
        double base = a.root().value;
        double e = static_cast<double>(num) / static_cast<double>(den);
        if (base > 0 || (den == 1 && (base != 0 || num > 0)))
            return constant(std::pow(base, e));
    }
    auto n = std::make_shared<Node>();
    n->op = Op::pow_fn;
    n->a = a.ptr();
    n->exp_num = num;
    n->exp_den = den;
    return Expr(n);
}

// ---- structural equality ---------------------------------------------------

inline bool structurally_equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b || a->op != b->op) return false;
    switch (a->op) {
        case Op::constant: return a->value == b->value;
        case Op::variable: return a->var == b->var;
        case Op::parameter: return a->name == b->name;
        case Op::pow_fn:
            if (a->exp_num != b->exp_num || a->exp_den != b->exp_den) return false;
            break;
        default: break;
    }
    if (!!a->a != !!b->a || !!a->b != !!b->b) return false;
    if (a->a && !structurally_equal(a->a.get(), b->a.get())) return false;
    if (a->b && !structurally_equal(a->b.get(), b->b.get())) return false;
    return true;
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    return structurally_equal(a.ptr().get(), b.ptr().get());
}

// ---- printing --------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    if (std::strtod(buf, nullptr) != v) std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// precedence: add/sub 1, mul/div 2, neg 3, pow 4, atom 5
inline int precedence(const Node& n) {
    switch (n.op) {
        case Op::add:
        case Op::sub: return 1;
        case Op::mul:
        case Op::div: return 2;
        case Op::neg: return 3;
        case Op::pow_fn: return 4;
        default: return 5;
    }
}

inline void print_node(const Node& n, std::string& out, int parent_prec) {
    int prec = precedence(n);
    bool parens = prec < parent_prec;
    if (parens) out += '(';
    switch (n.op) {
        case Op::constant: out += format_double(n.value); break;
        case Op::variable: out += n.var.name(); break;
        case Op::parameter: out += n.name; break;
        case Op::add:
            print_node(*n.a, out, 1);
            out += " + ";
            print_node(*n.b, out, 2);
            break;
        case Op::sub:
            print_node(*n.a, out, 1);
            out += " - ";
            print_node(*n.b, out, 2);
            break;
        case Op::mul:
            print_node(*n.a, out, 2);
            out += "*";
            print_node(*n.b, out, 3);
            break;
        case Op::div:
            print_node(*n.a, out, 2);
            out += "/";
            print_node(*n.b, out, 3);
            break;
        case Op::neg:
            out += '-';
            print_node(*n.a, out, 3);
            break;
        case Op::sqrt_fn:
            out += "sqrt(";
            print_node(*n.a, out, 0);
            out += ')';
            break;
        case Op::pow_fn:
            print_node(*n.a, out, 5);
            out += '^';
            if (n.exp_den == 1 && n.exp_num >= 0) {
                out += std::to_string(n.exp_num);
            } else {
                out += '(';
                out += std::to_string(n.exp_num);
                if (n.exp_den != 1) {
                    out += '/';
                    out += std::to_string(n.exp_den);
                }
                out += ')';
            }
            break;
    }
    if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print_node(e.root(), out, 0);
    return out;
}

// ---- parsing ---------------------------------------------------------------

namespace detail {

class Parser {
public:
    Parser(std::string_view text, int dimension,
           const std::map<std::string, VarRef>* aliases)
        : text_(text), n_(dimension), aliases_(aliases) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    Expr parse_sum() {
        Expr e = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+')) e = e + parse_term();
            else if (accept('-')) e = e - parse_term();
            else return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_factor();
        for (;;) {
            skip_ws();
            if (accept('*')) e = e * parse_factor();
            else if (accept('/')) e = e / parse_factor();
            else return e;
        }
    }

    Expr parse_factor() {
        skip_ws();
        if (accept('-')) return -parse_factor();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        skip_ws();
        if (!accept('^')) return base;
        skip_ws();
        auto [num, den] = parse_exponent();
        return pow_of(base, num, den);
    }

    std::pair<long long, long long> parse_exponent() {
        if (accept('(')) {
            long long num = parse_integer();
            long long den = 1;
            skip_ws();
            if (accept('/')) den = parse_integer();
            skip_ws();
            expect(')');
            if (den <= 0) fail("power denominator must be positive");
            return {num, den};
        }
        return {parse_integer(), 1};
    }

    long long parse_integer() {
        skip_ws();
        bool negate = accept('-');
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("expected integer exponent");
        long long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            v = v * 10 + (text_[pos_++] - '0');
        return negate ? -v : v;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            skip_ws();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<size_t>(end - begin);
        return constant(v);
    }

    Expr parse_identifier() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        if (name == "sqrt") {
            skip_ws();
            expect('(');
            Expr arg = parse_sum();
            skip_ws();
            expect(')');
            return sqrt_of(arg);
        }
        if (aliases_) {
            auto it = aliases_->find(name);
            if (it != aliases_->end()) return variable(it->second.kind, it->second.index);
        }
        if ((name[0] == 'x' || name[0] == 'y') && name.size() > 1 &&
            std::isdigit(static_cast<unsigned char>(name[1]))) {
            int idx = std::atoi(name.c_str() + 1);
            if (idx < 1 || idx > n_)
                fail("variable index out of range: " + name + " (dimension " +
                     std::to_string(n_) + ")", start);
            return variable(name[0] == 'x' ? VarKind::position : VarKind::fiber, idx);
        }
        // anything else is a named parameter
        return parameter(name);
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) { fail(msg, pos_); }

    [[noreturn]] void fail(const std::string& msg, size_t at) {
        int line = 1, col = 1;
        for (size_t i = 0; i < at && i < text_.size(); ++i) {
            if (text_[i] == '\n') { ++line; col = 1; }
            else ++col;
        }
        throw ParseError(msg, line, col);
    }

    std::string_view text_;
    int n_;
    const std::map<std::string, VarRef>* aliases_;
    size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_metric(std::string_view text, int dimension) {
    return detail::Parser(text, dimension, nullptr).parse();
}

// Parse an expression with extra identifier->variable aliases. Used for
// spherically symmetric profile functions, where "r" and "s" stand for the
// two slots of a 2-variable function.
inline Expr parse_with_aliases(std::string_view text, int dimension,
                               const std::map<std::string, VarRef>& aliases) {
    return detail::Parser(text, dimension, &aliases).parse();
}

// ---- evaluation ------------------------------------------------------------

// Scalar evaluation; generic jet evaluation lives in eval.hpp and follows
// the same recursion.
inline double evaluate(const Node& n, const Environment& env) {
    switch (n.op) {
        case Op::constant: return n.value;
        case Op::variable: {
            int i = n.var.index;
            if (i < 1 || i > env.n)
                throw DimensionError("variable " + n.var.name() +
                                     " out of range for dimension " + std::to_string(env.n));
            return n.var.kind == VarKind::position ? env.x[i - 1] : env.y[i - 1];
        }
        case Op::parameter: {
            auto it = env.params.find(n.name);
            if (it == env.params.end())
                throw DomainError("unbound parameter '" + n.name + "'");
            return it->second;
        }
        case Op::add: return evaluate(*n.a, env) + evaluate(*n.b, env);
        case Op::sub: return evaluate(*n.a, env) - evaluate(*n.b, env);
        case Op::mul: return evaluate(*n.a, env) * evaluate(*n.b, env);
        case Op::div: {
            double num = evaluate(*n.a, env);
            double den = evaluate(*n.b, env);
            if (den == 0) {
                std::string s;
                detail::print_node(*n.b, s, 0);
                throw DomainError("division by zero in subtree: " + s);
            }
            return num / den;
        }
        case Op::neg: return -evaluate(*n.a, env);
        case Op::sqrt_fn: {
            double v = evaluate(*n.a, env);
            if (v < 0) {
                std::string s;
                detail::print_node(*n.a, s, 0);
                throw DomainError("sqrt of negative value in subtree: " + s);
            }
            return std::sqrt(v);
        }
        case Op::pow_fn: {
            double base = evaluate(*n.a, env);
            if (n.exp_den != 1 && base < 0) {
                std::string s;
                detail::print_node(*n.a, s, 0);
                throw DomainError("fractional power of negative value in subtree: " + s);
            }
            if (base == 0 && n.exp_num < 0) {
                std::string s;
                detail::print_node(*n.a, s, 0);
                throw DomainError("zero raised to negative power in subtree: " + s);
            }
            return std::pow(base, static_cast<double>(n.exp_num) /
                                      static_cast<double>(n.exp_den));
        }
    }
    throw std::logic_error("unhandled node kind");
}

inline double evaluate(const Expr& e, const Environment& env) {
    return evaluate(e.root(), env);
}

// ---- symbolic differentiation ----------------------------------------------

inline Expr differentiate(const Expr& e, VarRef v);

namespace detail {

inline Expr diff_node(const Node& n, VarRef v) {
    switch (n.op) {
        case Op::constant:
        case Op::parameter: return constant(0);
        case Op::variable: return constant(n.var == v ? 1 : 0);
        case Op::add: return differentiate(Expr(n.a), v) + differentiate(Expr(n.b), v);
        case Op::sub: return differentiate(Expr(n.a), v) - differentiate(Expr(n.b), v);
        case Op::mul:
            return differentiate(Expr(n.a), v) * Expr(n.b) +
                   Expr(n.a) * differentiate(Expr(n.b), v);
        case Op::div:
            return (differentiate(Expr(n.a), v) * Expr(n.b) -
                    Expr(n.a) * differentiate(Expr(n.b), v)) /
                   pow_of(Expr(n.b), 2);
        case Op::neg: return -differentiate(Expr(n.a), v);
        case Op::sqrt_fn:
            return differentiate(Expr(n.a), v) / (constant(2) * sqrt_of(Expr(n.a)));
        case Op::pow_fn: {
            double coeff = static_cast<double>(n.exp_num) / static_cast<double>(n.exp_den);
            return constant(coeff) * pow_of(Expr(n.a), n.exp_num - n.exp_den, n.exp_den) *
                   differentiate(Expr(n.a), v);
        }
    }
    throw std::logic_error("unhandled node kind");
}

}  // namespace detail

inline Expr differentiate(const Expr& e, VarRef v) {
    return detail::diff_node(e.root(), v);
}

// ---- substitution ----------------------------------------------------------

inline Expr substitute(const Expr& e, const std::map<VarRef, Expr>& bindings);

namespace detail {

inline Expr subst_node(const Node& n, const std::map<VarRef, Expr>& b) {
    switch (n.op) {
        case Op::constant: return constant(n.value);
        case Op::parameter: return parameter(n.name);
        case Op::variable: {
            auto it = b.find(n.var);
            if (it != b.end()) return it->second;
            return variable(n.var.kind, n.var.index);
        }
        case Op::add: return substitute(Expr(n.a), b) + substitute(Expr(n.b), b);
        case Op::sub: return substitute(Expr(n.a), b) - substitute(Expr(n.b), b);
        case Op::mul: return substitute(Expr(n.a), b) * substitute(Expr(n.b), b);
        case Op::div: return substitute(Expr(n.a), b) / substitute(Expr(n.b), b);
        case Op::neg: return -substitute(Expr(n.a), b);
        case Op::sqrt_fn: return sqrt_of(substitute(Expr(n.a), b));
        case Op::pow_fn: return pow_of(substitute(Expr(n.a), b), n.exp_num, n.exp_den);
    }
    throw std::logic_error("unhandled node kind");
}

}  // namespace detail

inline Expr substitute(const Expr& e, const std::map<VarRef, Expr>& bindings) {
    return detail::subst_node(e.root(), bindings);
}

// ---- coordinate change -----------------------------------------------------

// Given F(x, y) and a position map x = psi(x~), build
// F~(x~, y~) = F(psi(x~), Dpsi(x~) y~). The result lives in the tilde chart
// but uses the same variable names.
inline Expr change_coordinates(const Expr& F, const std::vector<Expr>& psi) {
    int n = static_cast<int>(psi.size());
    if (F.max_index() > n)
        throw DimensionError("coordinate map has " + std::to_string(n) +
                             " components but metric references index " +
                             std::to_string(F.max_index()));
    std::map<VarRef, Expr> bindings;
    for (int i = 1; i <= n; ++i) {
        bindings[VarRef{VarKind::position, i}] = psi[i - 1];
        Expr yi = constant(0);
        for (int j = 1; j <= n; ++j)
            yi = yi + differentiate(psi[i - 1], VarRef{VarKind::position, j}) * fiber(j);
        bindings[VarRef{VarKind::fiber, i}] = yi;
    }
    return substitute(F, bindings);
}

// ---- metric definition files -----------------------------------------------

// Line-oriented UTF-8 format:
//   dimension = <n>
//   metric = "<expression>"          (or spherical_phi = "<expression in r,s>")
//   param <name> = <real>            (repeatable)
//   domain = "<expression>"          (sample sites must make this positive)
//   # comment
struct MetricDefinition {
    int dimension = 0;
    std::string metric_text;   // exactly one of metric_text / phi_text is set
    std::string phi_text;
    Params params;
    std::optional<std::string> domain_text;

    bool spherical() const { return !phi_text.empty(); }
};

namespace detail {

inline std::string trim(std::string s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& s, int line) {
    std::string t = trim(s);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        throw ParseError("expected a double-quoted expression", line, 1);
    return t.substr(1, t.size() - 2);
}

}  // namespace detail

inline MetricDefinition parse_metric_file(const std::string& text) {
    MetricDefinition def;
    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos
                                                                    : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno, 1);
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = line.substr(eq + 1);

        if (key == "dimension") {
            def.dimension = std::atoi(detail::trim(value).c_str());
            if (def.dimension < 1)
                throw ParseError("dimension must be a positive integer", lineno, 1);
        } else if (key == "metric") {
            def.metric_text = detail::unquote(value, lineno);
        } else if (key == "spherical_phi") {
            def.phi_text = detail::unquote(value, lineno);
        } else if (key == "domain") {
            def.domain_text = detail::unquote(value, lineno);
        } else if (key.rfind("param ", 0) == 0 || key.rfind("param\t", 0) == 0) {
            std::string name = detail::trim(key.substr(6));
            if (name.empty()) throw ParseError("param needs a name", lineno, 1);
            def.params[name] = std::strtod(detail::trim(value).c_str(), nullptr);
        } else {
            throw ParseError("unknown key '" + key + "'", lineno, 1);
        }
    }
    if (def.dimension == 0)
        throw ParseError("missing 'dimension = <n>' line", 0, 0);
    if (def.metric_text.empty() == def.phi_text.empty())
        throw ParseError("need exactly one of 'metric' or 'spherical_phi'", 0, 0);
    return def;
}

}  // namespace finh
