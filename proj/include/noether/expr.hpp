#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace noether {

/// Role of a symbol inside the alphabet of a Lagrangian system.
///
/// `coord`, `velocity` and `accel` are indexed 0..n-1. `formal` symbols only
/// appear inside function bindings (the bound variables of `u -> body`).
enum class SymbolKind : std::uint8_t { time, coord, velocity, accel, param, formal };

struct Symbol {
    SymbolKind kind = SymbolKind::time;
    int index = 0;
    std::string name;
};

bool operator==(const Symbol& a, const Symbol& b);
int compare(const Symbol& a, const Symbol& b);

enum class Op : std::uint8_t { constant, symbol, add, mul, div, pow, fn, apply };
enum class Fn : std::uint8_t { sqrt, sin, cos, exp, log };

const char* fn_name(Fn fn);

struct Node;

/// Immutable symbolic expression. Cheap to copy (shared tree).
///
/// Every construction goes through the smart constructors below, which fold
/// constants, flatten nested sums/products and drop neutral elements. That
/// light normalization is always on; the heavier rewrite pass lives in
/// simplify.hpp.
class Expr {
public:
    Expr();
    Expr(double value);  // NOLINT(google-explicit-constructor)
    explicit Expr(const Symbol& symbol);

    Op op() const;
    double value() const;
    const Symbol& symbol() const;
    Fn fn() const;
    /// Name of an opaque function application.
    const std::string& fname() const;
    /// Partial derivative orders per argument of an opaque application.
    /// A single-argument order of -1 denotes the antiderivative.
    const std::vector<int>& orders() const;
    std::span<const Expr> args() const;
    std::size_t hash() const;

    bool is_constant() const { return op() == Op::constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }
    bool is_zero() const { return is_constant(0.0); }
    bool is_one() const { return is_constant(1.0); }

    const Node* get() const { return node_.get(); }

    friend class ExprFactory;

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

using ExprVector = std::vector<Expr>;
using ExprMatrix = std::vector<ExprVector>;

struct Node {
    Op op = Op::constant;
    double value = 0.0;
    Symbol symbol;
    Fn fn = Fn::sqrt;
    std::string fname;
    std::vector<int> orders;
    std::vector<Expr> args;
    std::size_t hash = 0;
};

// Smart constructors.
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr quotient(const Expr& num, const Expr& den);
Expr power(const Expr& base, const Expr& exponent);
Expr apply_fn(Fn fn, const Expr& arg);
Expr apply(std::string name, std::vector<int> orders, std::vector<Expr> args);

inline Expr sqrt(const Expr& e) { return apply_fn(Fn::sqrt, e); }
inline Expr sin(const Expr& e) { return apply_fn(Fn::sin, e); }
inline Expr cos(const Expr& e) { return apply_fn(Fn::cos, e); }
inline Expr exp(const Expr& e) { return apply_fn(Fn::exp, e); }
inline Expr log(const Expr& e) { return apply_fn(Fn::log, e); }
inline Expr pow(const Expr& b, const Expr& e) { return power(b, e); }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

/// Structural identity (same tree shape and leaves).
bool identical(const Expr& a, const Expr& b);
/// Total order on expressions, used for canonical sorting.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// True if any node of `e` satisfies `pred`.
template <typename Pred>
bool any_node(const Expr& e, Pred&& pred) {
    if (pred(e)) return true;
    for (const Expr& a : e.args())
        if (any_node(a, pred)) return true;
    return false;
}

bool contains_symbol(const Expr& e, const Symbol& s);
bool contains_kind(const Expr& e, SymbolKind kind);
bool contains_function(const Expr& e, std::string_view name);
std::size_t node_count(const Expr& e);

/// Dot product of two equally sized vectors.
Expr dot(const ExprVector& a, const ExprVector& b);
ExprVector scale(const ExprVector& v, const Expr& s);
ExprVector add(const ExprVector& a, const ExprVector& b);
ExprVector subtract(const ExprVector& a, const ExprVector& b);

/// Prints in the DSL grammar accepted by parse().
std::string to_string(const Expr& e);
/// Like to_string but cut to `max_chars` (with an ellipsis) for messages.
std::string preview(const Expr& e, std::size_t max_chars = 160);

}  // namespace noether
