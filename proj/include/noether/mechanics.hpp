#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "noether/eval.hpp"
#include "noether/expr.hpp"
#include "noether/parse.hpp"
#include "noether/sampling.hpp"

namespace noether {

/// Everything needed to build a Lagrangian system: what a system file holds.
struct SystemDefinition {
    std::string name;
    Alphabet alphabet;
    Expr lagrangian;
    std::vector<std::pair<std::string, double>> params;
    ExprVector singular;
    std::shared_ptr<const FunctionTable> functions = std::make_shared<FunctionTable>();
    std::vector<std::pair<std::string, Range>> ranges;
};

struct RegularityRecord {
    int points = 0;
    double min_abs_det = 0.0;
    bool passed = false;
};

/// Result of solving g v = w symbolically.
struct LinearSolve {
    ExprVector solution;
    /// Set when no viable symbolic pivot existed; `solution` is then empty and
    /// callers must fall back to solve_numeric() per point.
    bool numeric_fallback = false;
    std::optional<VerificationReport> spot_check;
};

class LagrangianSystem {
public:
    const SystemDefinition& definition() const { return def_; }
    const std::string& name() const { return def_.name; }
    const Alphabet& alphabet() const { return def_.alphabet; }
    int dim() const { return def_.alphabet.dim(); }
    const Expr& lagrangian() const { return def_.lagrangian; }

    /// p = dL/dqdot.
    const ExprVector& momentum() const { return momentum_; }
    /// g = d^2 L / dqdot dqdot.
    const ExprMatrix& hessian() const { return hessian_; }
    const Expr& hessian_det() const { return det_; }
    /// dL/dq - d^2L/dqdot dt - d^2L/dqdot dq * qdot (the right side of g*accel).
    const ExprVector& force() const { return force_; }
    /// Normal form qddot = accel(t, q, qdot).
    const ExprVector& accel() const { return accel_; }
    /// dL/dq - d/dt dL/dqdot with generic (symbolic) accelerations.
    const ExprVector& euler_lagrange() const { return euler_lagrange_; }

    const SamplingSpec& domain() const { return domain_; }
    const RegularityRecord& regularity() const { return regularity_; }

    /// Copy whose numeric function table has `binding` added or replaced.
    LagrangianSystem rebind(std::shared_ptr<const FunctionBinding> binding) const;

    friend LagrangianSystem build_system(SystemDefinition def, std::uint64_t seed);

private:
    SystemDefinition def_;
    ExprVector momentum_;
    ExprMatrix hessian_;
    Expr det_;
    ExprMatrix adjugate_;
    ExprVector force_;
    ExprVector accel_;
    ExprVector euler_lagrange_;
    SamplingSpec domain_;
    RegularityRecord regularity_;
    bool symbolic_inverse_ = true;

    friend LinearSolve invert_g_apply(const LagrangianSystem& sys, const ExprVector& w, std::uint64_t seed);
};

/// Derives momentum, Hessian, normal form and Euler-Lagrange expressions, then
/// samples 20 points and requires |det g| > 1e-8 at each.
/// Throws RegularityError (with the point) otherwise.
LagrangianSystem build_system(SystemDefinition def, std::uint64_t seed = kDefaultSeed);

/// Numeric dL/dq - d/dt dL/dqdot at a point that binds t, q, qdot, qddot.
std::vector<double> el_residual(const LagrangianSystem& sys, const SamplePoint& p);
/// Numeric g (accel - qddot) at the same point; equal to el_residual.
std::vector<double> el_residual_via_hessian(const LagrangianSystem& sys, const SamplePoint& p);

/// Determinant (n <= 3, cofactor expansion) and adjugate.
Expr determinant(const ExprMatrix& m);
ExprMatrix adjugate(const ExprMatrix& m);

/// Symbolic solve of m v = w: adjugate for n <= 3, fraction-free elimination
/// with numerically vetted pivots otherwise. Spot-checks m v = w at 20 points.
LinearSolve solve_linear(const ExprMatrix& m, const ExprVector& w, const SamplingSpec& domain,
                         std::uint64_t seed = kDefaultSeed);

/// g^{-1} w for the system's Hessian.
LinearSolve invert_g_apply(const LagrangianSystem& sys, const ExprVector& w, std::uint64_t seed = kDefaultSeed);

/// Per-point numeric solve of m v = w.
std::vector<double> solve_numeric(const ExprMatrix& m, const ExprVector& w, const SamplePoint& p);

/// Numeric accel at a point by solving g accel = force (no symbolic accel).
std::vector<double> accel_numeric(const LagrangianSystem& sys, const SamplePoint& p);

}  // namespace noether
