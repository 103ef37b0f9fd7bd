#include "noether/simplify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace noether {

namespace {

bool is_integer_constant(const Expr& e) {
    return e.is_constant() && std::isfinite(e.value()) && std::floor(e.value()) == e.value();
}

Expr add_normal(std::vector<Expr> terms);
Expr mul_normal(std::vector<Expr> factors);

Expr pow_normal(const Expr& base, const Expr& exponent) {
    if (is_integer_constant(exponent)) {
        if (base.op() == Op::mul) {
            std::vector<Expr> factors;
            for (const Expr& f : base.args()) factors.push_back(pow_normal(f, exponent));
            return mul_normal(std::move(factors));
        }
        if (base.op() == Op::pow) return pow_normal(base.args()[0], mul_normal({base.args()[1], exponent}));
    }
    return power(base, exponent);
}

Expr mul_normal(std::vector<Expr> factors) {
    double coef = 1.0;
    std::map<Expr, std::vector<Expr>, ExprLess> groups;
    std::vector<Expr> stack(factors.rbegin(), factors.rend());
    while (!stack.empty()) {
        Expr f = stack.back();
        stack.pop_back();
        if (f.op() == Op::mul) {
            for (auto it = f.args().rbegin(); it != f.args().rend(); ++it) stack.push_back(*it);
        } else if (f.is_constant()) {
            coef *= f.value();
        } else if (f.op() == Op::pow) {
            groups[f.args()[0]].push_back(f.args()[1]);
        } else {
            groups[f].push_back(Expr(1.0));
        }
    }
    if (coef == 0.0) return Expr(0.0);
    std::vector<Expr> out;
    for (auto& [base, exps] : groups) {
        Expr e = add_normal(std::move(exps));
        if (e.is_zero()) continue;
        Expr p = pow_normal(base, e);
        if (p.is_constant()) {
            coef *= p.value();
        } else if (p.op() == Op::mul) {
            for (const Expr& a : p.args()) {
                if (a.is_constant())
                    coef *= a.value();
                else
                    out.push_back(a);
            }
        } else {
            out.push_back(p);
        }
    }
    std::sort(out.begin(), out.end(), ExprLess{});
    out.insert(out.begin(), Expr(coef));
    return product(std::move(out));
}

Expr add_normal(std::vector<Expr> terms) {
    double constant = 0.0;
    std::map<Expr, double, ExprLess> groups;
    std::vector<Expr> stack(terms.rbegin(), terms.rend());
    while (!stack.empty()) {
        Expr t = stack.back();
        stack.pop_back();
        if (t.op() == Op::add) {
            for (auto it = t.args().rbegin(); it != t.args().rend(); ++it) stack.push_back(*it);
        } else if (t.is_constant()) {
            constant += t.value();
        } else if (t.op() == Op::mul && t.args().front().is_constant()) {
            const auto args = t.args();
            groups[product({args.begin() + 1, args.end()})] += args.front().value();
        } else {
            groups[t] += 1.0;
        }
    }
    std::vector<Expr> out;
    out.push_back(Expr(constant));
    for (const auto& [rest, coef] : groups) {
        if (coef == 0.0) continue;
        out.push_back(product({Expr(coef), rest}));
    }
    return sum(std::move(out));
}

class Simplifier {
public:
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
            case Op::symbol:
                return e;
            case Op::add:
                return add_normal(mapped(e));
            case Op::mul:
                return mul_normal(mapped(e));
            case Op::div:
                return mul_normal({run(e.args()[0]), pow_normal(run(e.args()[1]), Expr(-1.0))});
            case Op::pow:
                return pow_normal(run(e.args()[0]), run(e.args()[1]));
            case Op::fn:
                return apply_fn(e.fn(), run(e.args()[0]));
            case Op::apply:
                return apply(e.fname(), e.orders(), mapped(e));
        }
        return e;
    }

    std::vector<Expr> mapped(const Expr& e) {
        std::vector<Expr> out;
        for (const Expr& a : e.args()) out.push_back(run(a));
        return out;
    }

    std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace

Expr simplify(const Expr& e) { return Simplifier().run(e); }

}  // namespace noether
