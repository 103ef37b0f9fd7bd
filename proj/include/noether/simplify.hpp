#pragma once

#include "noether/expr.hpp"

namespace noether {

/// Bounded rewrite pass for readable output: flattens sums and products,
/// folds constants, turns quotients into negative powers, collects like terms
/// and merges powers of a common base (x^a * x^b -> x^(a+b)). Idempotent.
///
/// It never decides identities; two equal expressions may simplify to
/// different trees.
Expr simplify(const Expr& e);

}  // namespace noether
