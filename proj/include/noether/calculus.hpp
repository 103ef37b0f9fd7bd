#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "noether/eval.hpp"
#include "noether/expr.hpp"
#include "noether/parse.hpp"

namespace noether {

/// Exact partial derivative. Opaque applications differentiate by bumping
/// the derivative order of each argument (chain rule).
Expr diff(const Expr& e, const Symbol& v);

ExprVector gradient(const Expr& e, std::span<const Symbol> vars);

struct Substitution {
    std::vector<std::pair<Symbol, Expr>> symbols;
    FunctionTable functions;
};

/// Simultaneous substitution of symbols and opaque functions. A bound
/// function application `G^(k)(a)` becomes the k-th derivative of the binding
/// body with its formals replaced by the (substituted) arguments.
Expr substitute(const Expr& e, const Substitution& s);
Expr substitute(const Expr& e, const Symbol& from, const Expr& to);

/// Total time derivative
///   d/dt e = de/dt + sum_i de/dq_i qdot_i + sum_i de/dqdot_i qddot_i.
/// `e` must be free of accelerations.
Expr total_dt(const Expr& e, const Alphabet& alphabet);

/// Same, with every qddot_i replaced by accel[i]. Result is free of qddot.
Expr total_dt(const Expr& e, const Alphabet& alphabet, const ExprVector& accel);

}  // namespace noether
