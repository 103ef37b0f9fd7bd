#include "noether/expr.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace noether {

bool operator==(const Symbol& a, const Symbol& b) { return compare(a, b) == 0; }

int compare(const Symbol& a, const Symbol& b) {
    if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
    switch (a.kind) {
        case SymbolKind::time:
            return 0;
        case SymbolKind::param:
            return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
        default:
            return a.index < b.index ? -1 : (a.index == b.index ? 0 : 1);
    }
}

const char* fn_name(Fn fn) {
    switch (fn) {
        case Fn::sqrt: return "sqrt";
        case Fn::sin: return "sin";
        case Fn::cos: return "cos";
        case Fn::exp: return "exp";
        case Fn::log: return "log";
    }
    return "?";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t symbol_hash(const Symbol& s) {
    std::size_t h = static_cast<std::size_t>(s.kind);
    if (s.kind == SymbolKind::param) return mix(h, std::hash<std::string>{}(s.name));
    if (s.kind != SymbolKind::time) h = mix(h, static_cast<std::size_t>(s.index));
    return h;
}

}  // namespace

class ExprFactory {
public:
    static Expr make(Node node) {
        std::size_t h = mix(0, static_cast<std::size_t>(node.op));
        switch (node.op) {
            case Op::constant:
                h = mix(h, std::bit_cast<std::uint64_t>(node.value == 0.0 ? 0.0 : node.value));
                break;
            case Op::symbol:
                h = mix(h, symbol_hash(node.symbol));
                break;
            case Op::fn:
                h = mix(h, static_cast<std::size_t>(node.fn));
                break;
            case Op::apply:
                h = mix(h, std::hash<std::string>{}(node.fname));
                for (int o : node.orders) h = mix(h, static_cast<std::size_t>(o + 7));
                break;
            default:
                break;
        }
        for (const Expr& a : node.args) h = mix(h, a.hash());
        node.hash = h;
        return Expr(std::make_shared<const Node>(std::move(node)));
    }
};

namespace {

Expr make_constant(double v) {
    Node n;
    n.op = Op::constant;
    n.value = v == 0.0 ? 0.0 : v;  // no negative zero
    return ExprFactory::make(std::move(n));
}

const Expr& zero_expr() {
    static const Expr z = make_constant(0.0);
    return z;
}

Expr make_node(Op op, std::vector<Expr> args) {
    Node n;
    n.op = op;
    n.args = std::move(args);
    return ExprFactory::make(std::move(n));
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

}  // namespace

Expr::Expr() : Expr(zero_expr()) {}

Expr::Expr(double value) : Expr(value == 0.0 ? zero_expr() : make_constant(value)) {}

Expr::Expr(const Symbol& symbol) {
    Node n;
    n.op = Op::symbol;
    n.symbol = symbol;
    *this = ExprFactory::make(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
const Symbol& Expr::symbol() const { return node_->symbol; }
Fn Expr::fn() const { return node_->fn; }
const std::string& Expr::fname() const { return node_->fname; }
const std::vector<int>& Expr::orders() const { return node_->orders; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::size_t Expr::hash() const { return node_->hash; }

Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    flat.reserve(terms.size());
    double c = 0.0;
    std::function<void(const Expr&)> push = [&](const Expr& e) {
        if (e.op() == Op::add) {
            for (const Expr& a : e.args()) push(a);
        } else if (e.is_constant()) {
            c += e.value();
        } else {
            flat.push_back(e);
        }
    };
    for (const Expr& t : terms) push(t);
    if (c != 0.0 || !std::isfinite(c)) flat.insert(flat.begin(), make_constant(c));
    if (flat.empty()) return zero_expr();
    if (flat.size() == 1) return flat.front();
    return make_node(Op::add, std::move(flat));
}

Expr product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    flat.reserve(factors.size());
    double c = 1.0;
    std::function<void(const Expr&)> push = [&](const Expr& e) {
        if (e.op() == Op::mul) {
            for (const Expr& a : e.args()) push(a);
        } else if (e.is_constant()) {
            c *= e.value();
        } else {
            flat.push_back(e);
        }
    };
    for (const Expr& f : factors) push(f);
    if (c == 0.0) return zero_expr();
    if (c != 1.0) flat.insert(flat.begin(), make_constant(c));
    if (flat.empty()) return make_constant(c);
    if (flat.size() == 1) return flat.front();
    return make_node(Op::mul, std::move(flat));
}

Expr quotient(const Expr& num, const Expr& den) {
    if (den.is_constant() && den.value() != 0.0) {
        if (den.value() == 1.0) return num;
        return product({make_constant(1.0 / den.value()), num});
    }
    if (num.is_zero() && !den.is_zero()) return zero_expr();
    return make_node(Op::div, {num, den});
}

Expr power(const Expr& base, const Expr& exponent) {
    if (exponent.is_constant()) {
        const double e = exponent.value();
        if (e == 0.0) return make_constant(1.0);
        if (e == 1.0) return base;
        if (base.is_constant()) {
            const double b = base.value();
            if ((b > 0.0 || is_integer(e)) && !(b == 0.0 && e < 0.0)) {
                const double r = std::pow(b, e);
                if (std::isfinite(r)) return make_constant(r);
            }
        }
        if (base.is_zero() && e > 0.0) return zero_expr();
    }
    if (base.is_one()) return make_constant(1.0);
    return make_node(Op::pow, {base, exponent});
}

Expr apply_fn(Fn fn, const Expr& arg) {
    if (arg.is_constant()) {
        const double x = arg.value();
        double r = 0.0;
        bool ok = true;
        switch (fn) {
            case Fn::sqrt: ok = x >= 0.0; r = std::sqrt(x); break;
            case Fn::sin: r = std::sin(x); break;
            case Fn::cos: r = std::cos(x); break;
            case Fn::exp: r = std::exp(x); break;
            case Fn::log: ok = x > 0.0; r = std::log(x); break;
        }
        if (ok && std::isfinite(r)) return make_constant(r);
    }
    Node n;
    n.op = Op::fn;
    n.fn = fn;
    n.args = {arg};
    return ExprFactory::make(std::move(n));
}

Expr apply(std::string name, std::vector<int> orders, std::vector<Expr> args) {
    if (orders.size() != args.size())
        throw std::invalid_argument("apply: derivative orders must match argument count for " + name);
    Node n;
    n.op = Op::apply;
    n.fname = std::move(name);
    n.orders = std::move(orders);
    n.args = std::move(args);
    return ExprFactory::make(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return quotient(a, b); }
Expr operator-(const Expr& a) { return product({make_constant(-1.0), a}); }

int compare(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return 0;
    if (a.op() != b.op()) return a.op() < b.op() ? -1 : 1;
    switch (a.op()) {
        case Op::constant:
            if (a.value() == b.value()) return 0;
            return a.value() < b.value() ? -1 : 1;
        case Op::symbol:
            return compare(a.symbol(), b.symbol());
        case Op::fn:
            if (a.fn() != b.fn()) return a.fn() < b.fn() ? -1 : 1;
            break;
        case Op::apply:
            if (int c = a.fname().compare(b.fname()); c != 0) return c < 0 ? -1 : 1;
            if (a.orders() != b.orders()) return a.orders() < b.orders() ? -1 : 1;
            break;
        default:
            break;
    }
    const auto aa = a.args();
    const auto ba = b.args();
    const std::size_t n = std::min(aa.size(), ba.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare(aa[i], ba[i]); c != 0) return c;
    if (aa.size() != ba.size()) return aa.size() < ba.size() ? -1 : 1;
    return 0;
}

bool identical(const Expr& a, const Expr& b) {
    if (a.get() == b.get()) return true;
    if (a.hash() != b.hash()) return false;
    return compare(a, b) == 0;
}

bool contains_symbol(const Expr& e, const Symbol& s) {
    return any_node(e, [&](const Expr& x) { return x.op() == Op::symbol && x.symbol() == s; });
}

bool contains_kind(const Expr& e, SymbolKind kind) {
    return any_node(e, [&](const Expr& x) { return x.op() == Op::symbol && x.symbol().kind == kind; });
}

bool contains_function(const Expr& e, std::string_view name) {
    return any_node(e, [&](const Expr& x) { return x.op() == Op::apply && x.fname() == name; });
}

std::size_t node_count(const Expr& e) {
    std::size_t n = 1;
    for (const Expr& a : e.args()) n += node_count(a);
    return n;
}

Expr dot(const ExprVector& a, const ExprVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    std::vector<Expr> terms;
    terms.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) terms.push_back(a[i] * b[i]);
    return sum(std::move(terms));
}

ExprVector scale(const ExprVector& v, const Expr& s) {
    ExprVector out;
    out.reserve(v.size());
    for (const Expr& e : v) out.push_back(e * s);
    return out;
}

ExprVector add(const ExprVector& a, const ExprVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add: dimension mismatch");
    ExprVector out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
    return out;
}

ExprVector subtract(const ExprVector& a, const ExprVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("subtract: dimension mismatch");
    ExprVector out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Printing
//
// Precedence levels: 1 sum, 2 product/quotient, 3 unary minus, 4 power,
// 5 atom. A child is parenthesized when its level is below what the parent
// position requires.

namespace {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

int level(const Expr& e) {
    switch (e.op()) {
        case Op::constant:
            return e.value() < 0.0 ? 3 : 5;
        case Op::symbol:
        case Op::fn:
        case Op::apply:
            return 5;
        case Op::add:
            return 1;
        case Op::mul:
            return e.args().front().is_constant() && e.args().front().value() < 0.0 ? 3 : 2;
        case Op::div:
            return 2;
        case Op::pow:
            return 4;
    }
    return 5;
}

void print(const Expr& e, std::string& out);

void print_at(const Expr& e, int required, std::string& out) {
    if (level(e) < required) {
        out += '(';
        print(e, out);
        out += ')';
    } else {
        print(e, out);
    }
}

// Product factors after the leading constant; Div factors are wrapped because
// `a*b/c` would re-parse as (a*b)/c.
void print_factors(std::span<const Expr> factors, std::string& out) {
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i > 0) out += '*';
        const Expr& f = factors[i];
        if (f.op() == Op::div)
            print_at(f, 5, out);
        else
            print_at(f, 4, out);
    }
}

// Prints a product with a negative leading coefficient without its sign.
void print_negated_product(const Expr& e, std::string& out) {
    const auto args = e.args();
    const double c = -args.front().value();
    if (c != 1.0) {
        out += format_number(c);
        out += '*';
    }
    print_factors(args.subspan(1), out);
}

void print(const Expr& e, std::string& out) {
    switch (e.op()) {
        case Op::constant:
            out += format_number(e.value());
            return;
        case Op::symbol:
            out += e.symbol().name;
            return;
        case Op::add: {
            bool first = true;
            for (const Expr& t : e.args()) {
                const bool negative_const = t.is_constant() && t.value() < 0.0;
                const bool negative_mul =
                    t.op() == Op::mul && t.args().front().is_constant() && t.args().front().value() < 0.0;
                if (negative_const) {
                    out += first ? "-" : " - ";
                    out += format_number(-t.value());
                } else if (negative_mul) {
                    out += first ? "-" : " - ";
                    print_negated_product(t, out);
                } else {
                    if (!first) out += " + ";
                    print_at(t, 2, out);
                }
                first = false;
            }
            return;
        }
        case Op::mul: {
            const auto args = e.args();
            if (args.front().is_constant()) {
                const double c = args.front().value();
                if (c < 0.0) {
                    out += '-';
                    print_negated_product(e, out);
                    return;
                }
                out += format_number(c);
                out += '*';
                print_factors(args.subspan(1), out);
                return;
            }
            print_factors(args, out);
            return;
        }
        case Op::div:
            print_at(e.args()[0], 2, out);
            out += '/';
            print_at(e.args()[1], 4, out);
            return;
        case Op::pow:
            print_at(e.args()[0], 5, out);
            out += '^';
            print_at(e.args()[1], 5, out);
            return;
        case Op::fn:
            out += fn_name(e.fn());
            out += '(';
            print(e.args()[0], out);
            out += ')';
            return;
        case Op::apply: {
            out += e.fname();
            const auto& ord = e.orders();
            const bool plain = std::all_of(ord.begin(), ord.end(), [](int o) { return o == 0; });
            if (!plain) {
                if (ord.size() == 1 && ord[0] > 0 && ord[0] <= 3) {
                    out.append(static_cast<std::size_t>(ord[0]), '\'');
                } else {
                    out += "'[";
                    for (std::size_t i = 0; i < ord.size(); ++i) {
                        if (i > 0) out += ',';
                        out += std::to_string(ord[i]);
                    }
                    out += ']';
                }
            }
            out += '(';
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                if (i > 0) out += ", ";
                print(e.args()[i], out);
            }
            out += ')';
            return;
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

std::string preview(const Expr& e, std::size_t max_chars) {
    std::string s = to_string(e);
    if (s.size() > max_chars) {
        s.resize(max_chars);
        s += "...";
    }
    return s;
}

}  // namespace noether
