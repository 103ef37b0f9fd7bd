#include "noether/eval.hpp"

#include <cmath>

#include "noether/calculus.hpp"
#include "noether/errors.hpp"

namespace noether {

FunctionBinding::FunctionBinding(std::string name, std::vector<std::string> formals, Expr body,
                                 std::optional<Expr> antiderivative)
    : name_(std::move(name)),
      formals_(std::move(formals)),
      body_(std::move(body)),
      antiderivative_(std::move(antiderivative)) {
    if (formals_.empty()) throw std::invalid_argument("FunctionBinding: at least one formal argument required");
    if (antiderivative_ && formals_.size() != 1)
        throw std::invalid_argument("FunctionBinding: antiderivative only for one-argument functions");
}

Expr FunctionBinding::derivative(const std::vector<int>& orders) const {
    if (orders.size() != formals_.size())
        throw std::invalid_argument("FunctionBinding: derivative orders do not match arity of " + name_);
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(orders); it != cache_.end()) return it->second;
    Expr result = body_;
    if (orders.size() == 1 && orders[0] < 0) {
        if (orders[0] != -1 || !antiderivative_)
            throw DomainError("no antiderivative bound", name_ + "'[" + std::to_string(orders[0]) + "]");
        result = *antiderivative_;
    } else {
        for (std::size_t j = 0; j < orders.size(); ++j) {
            if (orders[j] < 0) throw std::invalid_argument("FunctionBinding: negative order in multi-index");
            const Symbol formal{SymbolKind::formal, static_cast<int>(j), formals_[j]};
            for (int k = 0; k < orders[j]; ++k) result = diff(result, formal);
        }
    }
    cache_.emplace(orders, result);
    return result;
}

double SamplePoint::value_of(const Symbol& s) const {
    auto at = [&](const std::vector<double>& v, const char* what) {
        if (s.index < 0 || static_cast<std::size_t>(s.index) >= v.size())
            throw DomainError(std::string("unbound ") + what, s.name);
        return v[static_cast<std::size_t>(s.index)];
    };
    switch (s.kind) {
        case SymbolKind::time: return t;
        case SymbolKind::coord: return at(q, "coordinate");
        case SymbolKind::velocity: return at(qdot, "velocity");
        case SymbolKind::accel: return at(qddot, "acceleration");
        case SymbolKind::formal: return at(formals, "formal argument");
        case SymbolKind::param:
            for (const auto& [name, value] : params)
                if (name == s.name) return value;
            throw DomainError("unbound parameter", s.name);
    }
    return 0.0;
}

std::vector<std::pair<std::string, double>> SamplePoint::describe(const Alphabet& alphabet) const {
    std::vector<std::pair<std::string, double>> out;
    out.emplace_back("t", t);
    for (int i = 0; i < alphabet.dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (k < q.size()) out.emplace_back(alphabet.coord(i).name, q[k]);
    }
    for (int i = 0; i < alphabet.dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (k < qdot.size()) out.emplace_back(alphabet.velocity(i).name, qdot[k]);
    }
    for (int i = 0; i < alphabet.dim(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (k < qddot.size()) out.emplace_back(alphabet.accel(i).name, qddot[k]);
    }
    for (const auto& p : params) out.push_back(p);
    return out;
}

namespace {

class Evaluator {
public:
    Evaluator(const SamplePoint& p, std::span<const double> formals) : p_(p), formals_(formals) {}

    double run(const Expr& e) const {
        switch (e.op()) {
            case Op::constant:
                return e.value();
            case Op::symbol:
                if (e.symbol().kind == SymbolKind::formal) {
                    const auto i = static_cast<std::size_t>(e.symbol().index);
                    if (i >= formals_.size()) throw DomainError("unbound formal argument", e.symbol().name);
                    return formals_[i];
                }
                return p_.value_of(e.symbol());
            case Op::add: {
                double s = 0.0;
                for (const Expr& a : e.args()) s += run(a);
                return s;
            }
            case Op::mul: {
                double s = 1.0;
                for (const Expr& a : e.args()) s *= run(a);
                return s;
            }
            case Op::div: {
                const double den = run(e.args()[1]);
                if (den == 0.0) throw DomainError("division by zero", preview(e));
                return run(e.args()[0]) / den;
            }
            case Op::pow: {
                const double b = run(e.args()[0]);
                const double x = run(e.args()[1]);
                if (b < 0.0 && std::floor(x) != x) throw DomainError("non-integer power of negative number", preview(e));
                if (b == 0.0 && x < 0.0) throw DomainError("division by zero", preview(e));
                return std::pow(b, x);
            }
            case Op::fn: {
                const double a = run(e.args()[0]);
                switch (e.fn()) {
                    case Fn::sqrt:
                        if (a < 0.0) throw DomainError("sqrt of negative argument", preview(e));
                        return std::sqrt(a);
                    case Fn::sin: return std::sin(a);
                    case Fn::cos: return std::cos(a);
                    case Fn::exp: return std::exp(a);
                    case Fn::log:
                        if (a <= 0.0) throw DomainError("log of non-positive argument", preview(e));
                        return std::log(a);
                }
                return 0.0;
            }
            case Op::apply: {
                if (!p_.functions) throw DomainError("unbound function", e.fname());
                auto it = p_.functions->find(e.fname());
                if (it == p_.functions->end()) throw DomainError("unbound function", e.fname());
                std::vector<double> args;
                args.reserve(e.args().size());
                for (const Expr& a : e.args()) args.push_back(run(a));
                const Expr body = it->second->derivative(e.orders());
                return Evaluator(p_, args).run(body);
            }
        }
        return 0.0;
    }

private:
    const SamplePoint& p_;
    std::span<const double> formals_;
};

}  // namespace

double eval(const Expr& e, const SamplePoint& p) { return Evaluator(p, p.formals).run(e); }

std::vector<double> eval(const ExprVector& v, const SamplePoint& p) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const Expr& e : v) out.push_back(eval(e, p));
    return out;
}

}  // namespace noether
