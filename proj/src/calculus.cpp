#include "noether/calculus.hpp"

#include <stdexcept>
#include <unordered_map>

namespace noether {

namespace {

class Differentiator {
public:
    explicit Differentiator(const Symbol& v) : v_(v) {}

    Expr run(const Expr& e) {
        if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
        Expr d = compute(e);
        memo_.emplace(e.get(), d);
        return d;
    }

private:
    Expr compute(const Expr& e) {
        switch (e.op()) {
            case Op::constant:
                return Expr(0.0);
            case Op::symbol:
                return e.symbol() == v_ ? Expr(1.0) : Expr(0.0);
            case Op::add: {
                std::vector<Expr> terms;
                for (const Expr& a : e.args()) terms.push_back(run(a));
                return sum(std::move(terms));
            }
            case Op::mul: {
                const auto f = e.args();
                std::vector<Expr> terms;
                for (std::size_t i = 0; i < f.size(); ++i) {
                    Expr di = run(f[i]);
                    if (di.is_zero()) continue;
                    std::vector<Expr> factors(f.begin(), f.end());
                    factors[i] = di;
                    terms.push_back(product(std::move(factors)));
                }
                return sum(std::move(terms));
            }
            case Op::div: {
                const Expr& a = e.args()[0];
                const Expr& b = e.args()[1];
                const Expr da = run(a);
                const Expr db = run(b);
                std::vector<Expr> terms;
                if (!da.is_zero()) terms.push_back(quotient(da, b));
                if (!db.is_zero()) terms.push_back(-quotient(a * db, power(b, Expr(2.0))));
                return sum(std::move(terms));
            }
            case Op::pow: {
                const Expr& b = e.args()[0];
                const Expr& x = e.args()[1];
                const Expr db = run(b);
                const Expr dx = run(x);
                if (dx.is_zero()) {
                    if (db.is_zero()) return Expr(0.0);
                    return product({x, power(b, x - Expr(1.0)), db});
                }
                // d(b^x) = b^x (x' log b + x b'/b)
                return e * (dx * log(b) + x * quotient(db, b));
            }
            case Op::fn: {
                const Expr& a = e.args()[0];
                const Expr da = run(a);
                if (da.is_zero()) return Expr(0.0);
                switch (e.fn()) {
                    case Fn::sqrt: return quotient(da, Expr(2.0) * e);
                    case Fn::sin: return cos(a) * da;
                    case Fn::cos: return -(sin(a) * da);
                    case Fn::exp: return e * da;
                    case Fn::log: return quotient(da, a);
                }
                return Expr(0.0);
            }
            case Op::apply: {
                const auto args = e.args();
                std::vector<Expr> terms;
                for (std::size_t j = 0; j < args.size(); ++j) {
                    Expr da = run(args[j]);
                    if (da.is_zero()) continue;
                    std::vector<int> orders = e.orders();
                    orders[j] += 1;
                    terms.push_back(apply(e.fname(), std::move(orders), {args.begin(), args.end()}) * da);
                }
                return sum(std::move(terms));
            }
        }
        return Expr(0.0);
    }

    Symbol v_;
    std::unordered_map<const Node*, Expr> memo_;
};

class Substituter {
public:
    explicit Substituter(const Substitution& s) : s_(s) {}

    Expr run(const Expr& e) {
        if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
        Expr r = compute(e);
        memo_.emplace(e.get(), r);
        return r;
    }

private:
    Expr compute(const Expr& e) {
        switch (e.op()) {
            case Op::constant:
                return e;
            case Op::symbol:
                for (const auto& [from, to] : s_.symbols)
                    if (from == e.symbol()) return to;
                return e;
            case Op::add:
                return sum(mapped(e));
            case Op::mul:
                return product(mapped(e));
            case Op::div:
                return quotient(run(e.args()[0]), run(e.args()[1]));
            case Op::pow:
                return power(run(e.args()[0]), run(e.args()[1]));
            case Op::fn:
                return apply_fn(e.fn(), run(e.args()[0]));
            case Op::apply: {
                std::vector<Expr> args = mapped(e);
                auto it = s_.functions.find(e.fname());
                if (it == s_.functions.end()) return apply(e.fname(), e.orders(), std::move(args));
                const FunctionBinding& binding = *it->second;
                if (binding.arity() != static_cast<int>(args.size()))
                    throw std::invalid_argument("substitute: arity mismatch binding " + binding.name());
                Substitution inner;
                for (int i = 0; i < binding.arity(); ++i)
                    inner.symbols.emplace_back(
                        Symbol{SymbolKind::formal, i, binding.formals()[static_cast<std::size_t>(i)]},
                        args[static_cast<std::size_t>(i)]);
                for (const auto& entry : s_.symbols)
                    if (entry.first.kind == SymbolKind::param) inner.symbols.push_back(entry);
                inner.functions = s_.functions;
                return Substituter(inner).run(binding.derivative(e.orders()));
            }
        }
        return e;
    }

    std::vector<Expr> mapped(const Expr& e) {
        std::vector<Expr> out;
        out.reserve(e.args().size());
        for (const Expr& a : e.args()) out.push_back(run(a));
        return out;
    }

    const Substitution& s_;
    std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr diff(const Expr& e, const Symbol& v) { return Differentiator(v).run(e); }

ExprVector gradient(const Expr& e, std::span<const Symbol> vars) {
    ExprVector g;
    g.reserve(vars.size());
    for (const Symbol& v : vars) g.push_back(diff(e, v));
    return g;
}

Expr substitute(const Expr& e, const Substitution& s) { return Substituter(s).run(e); }

Expr substitute(const Expr& e, const Symbol& from, const Expr& to) {
    Substitution s;
    s.symbols.emplace_back(from, to);
    return substitute(e, s);
}

namespace {

Expr total_dt_impl(const Expr& e, const Alphabet& alphabet, const ExprVector* accel) {
    if (contains_kind(e, SymbolKind::accel))
        throw std::invalid_argument("total_dt: expression already contains accelerations: " + preview(e));
    std::vector<Expr> terms{diff(e, alphabet.time())};
    for (int i = 0; i < alphabet.dim(); ++i) {
        terms.push_back(diff(e, alphabet.coord(i)) * alphabet.qdot(i));
        const Expr dv = diff(e, alphabet.velocity(i));
        if (dv.is_zero()) continue;
        terms.push_back(dv * (accel ? (*accel)[static_cast<std::size_t>(i)] : alphabet.qddot(i)));
    }
    return sum(std::move(terms));
}

}  // namespace

Expr total_dt(const Expr& e, const Alphabet& alphabet) { return total_dt_impl(e, alphabet, nullptr); }

Expr total_dt(const Expr& e, const Alphabet& alphabet, const ExprVector& accel) {
    if (accel.size() != static_cast<std::size_t>(alphabet.dim()))
        throw std::invalid_argument("total_dt: acceleration field has length " + std::to_string(accel.size()) +
                                    ", expected " + std::to_string(alphabet.dim()));
    for (const Expr& a : accel)
        if (contains_kind(a, SymbolKind::accel))
            throw std::invalid_argument("total_dt: acceleration field must be free of accelerations");
    return total_dt_impl(e, alphabet, &accel);
}

}  // namespace noether
