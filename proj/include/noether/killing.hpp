#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noether/errors.hpp"
#include "noether/expr.hpp"
#include "noether/mechanics.hpp"
#include "noether/sampling.hpp"

namespace noether {

/// Interpretation of the Killing-type equation. Strong forms must hold for
/// every acceleration; on-flow forms only after substituting qddot = accel.
/// The alt_ forms use the alternative equation, in which xi is measured
/// relative to the flow (xi_alt = xi_std - tau * qdot).
enum class Form { onflow, strong, alt_onflow, alt_strong };
enum class Convention { standard, alternative };

std::string_view form_name(Form form);
/// Accepts "onflow", "strong", "alt_onflow", "alt_strong" (and '-' for '_').
std::optional<Form> parse_form(std::string_view text);
bool is_strong(Form form);
Convention convention_of(Form form);

/// Infinitesimal time change tau, space change xi and boundary term f.
struct Triple {
    std::string name;
    Expr tau;
    ExprVector xi;
    Expr f;
    Form form = Form::strong;
    /// Expressions the triple divides by; verification samples stay away from
    /// their zero sets.
    ExprVector singular;
};

struct FirstIntegral {
    std::string name;
    Expr expr;
    ExprVector singular;
    /// Result of the conservation check, once run.
    std::optional<VerificationReport> conservation;

    bool verified() const { return conservation && conservation->passed; }
};

FirstIntegral make_integral(std::string name, Expr expr, ExprVector singular = {});

/// Thrown by the solvers when the integral they were given is not conserved.
class NotConservedError : public Error {
public:
    explicit NotConservedError(VerificationReport report)
        : Error("not a first integral: " + report.summary()), report_(std::move(report)) {}
    const VerificationReport& report() const { return report_; }

private:
    VerificationReport report_;
};

/// Left side of the Killing-type equation in the given interpretation.
Expr killing_lhs(const LagrangianSystem& sys, const Triple& tr, Form mode);
/// Its right side: the total time derivative of f in the same interpretation.
Expr killing_rhs(const LagrangianSystem& sys, const Triple& tr, Form mode);

struct TripleReport {
    VerificationReport killing;
    /// Present when an integral was supplied: does the triple produce it?
    std::optional<VerificationReport> integral;

    bool passed() const { return killing.passed && (!integral || integral->passed); }
};

/// Checks killing_lhs == killing_rhs by randomized sampling; in strong modes
/// the accelerations are drawn as free variables.
TripleReport verify_triple(const LagrangianSystem& sys, const Triple& tr, Form mode,
                           const FirstIntegral* integral = nullptr, const CheckOptions& opts = {});

/// N = f - L tau - p.(xi - qdot tau) (standard) or N = f - L tau - p.xi
/// (alternative). No conservation check.
Expr noether_expr(const LagrangianSystem& sys, const Triple& tr, Convention convention);

/// noether_expr plus a recorded conservation check.
FirstIntegral noether_integral(const LagrangianSystem& sys, const Triple& tr, Convention convention,
                               const CheckOptions& opts = {});

/// Checks dN/dt == 0 along the flow, comparing dN/dt + dN/dq.qdot against
/// -dN/dqdot.accel so that the relative tolerance has a scale.
VerificationReport check_conservation(const LagrangianSystem& sys, const FirstIntegral& integral,
                                      const CheckOptions& opts = {});

/// General on-flow solution for a chosen (tau, xi):
/// f = tau L + N + p.(xi - tau qdot).
Triple solve_onflow(const LagrangianSystem& sys, const FirstIntegral& integral, const Expr& tau, const ExprVector& xi,
                    const CheckOptions& opts = {});

/// On-flow solution with f = 0 when c = 0: tau = -N/(L+c), xi = tau qdot.
/// For c != 0 the boundary term becomes c N/(L+c), which keeps the triple a
/// solution with integral N.
Triple solve_onflow_simplest(const LagrangianSystem& sys, const FirstIntegral& integral, double c = 0.0,
                             const CheckOptions& opts = {});

/// tau = -(N + p.R)/(L+c), xi = R + tau qdot, f = c (N + p.R)/(L+c).
Triple solve_onflow_with_R(const LagrangianSystem& sys, const FirstIntegral& integral, const ExprVector& R,
                           double c = 0.0, const CheckOptions& opts = {});

/// General strong solution for a chosen tau: with w = g^-1 dN/dqdot,
/// xi = tau qdot - w and f = tau L + N - p.w.
Triple solve_strong(const LagrangianSystem& sys, const FirstIntegral& integral, const Expr& tau,
                    const CheckOptions& opts = {});

/// Alternative-form strong solution with trivial gauge:
/// tau = -(N - p.w)/(L+c), xi = -w, f = c (N - p.w)/(L+c).
Triple solve_alt_strong_trivial_gauge(const LagrangianSystem& sys, const FirstIntegral& integral, double c = 0.0,
                                      const CheckOptions& opts = {});

/// Adds the trivial symmetry (d, qdot d, L d) with d = (h - f)/(L+c), which
/// leaves the integral and the Killing equation unchanged. For c = 0 the new
/// boundary term is exactly h. In the alternative convention xi is unchanged.
Triple multiplicity_transform(const LagrangianSystem& sys, const Triple& tr, const Expr& h, double c = 0.0,
                              const CheckOptions& opts = {});

enum class Trivialize { time, gauge };

/// time: (0, xi - qdot tau, f - L tau). gauge: (tau - f/L, xi - qdot f/L, 0).
Triple trivialize(const LagrangianSystem& sys, const Triple& tr, Trivialize which, const CheckOptions& opts = {});

enum class Direction { to_alternative, to_standard };

/// std -> alt: xi - tau qdot; alt -> std: xi + tau qdot. A round trip
/// reproduces the original expressions exactly.
Triple convert_standard_alternative(const Triple& tr, const Alphabet& alphabet, Direction direction);

struct VelocityIndependence {
    bool admissible = false;
    /// g^-1 dN/dqdot = a + b qdot, when admissible.
    ExprVector a;
    Expr b;
    ExprVector w;
    /// The check that failed (inadmissible) or the last one run.
    VerificationReport evidence;
};

/// Decides whether N comes from a triple whose tau and xi do not depend on
/// qdot, i.e. whether g^-1 dN/dqdot is affine in qdot with a scalar slope.
VelocityIndependence velocity_independence_check(const LagrangianSystem& sys, const FirstIntegral& integral,
                                                 const CheckOptions& opts = {});

/// Requires c + L to stay sampleable away from zero (|L+c| >= the exclusion
/// distance); throws LagrangianVanishesError otherwise.
void require_lagrangian_nonvanishing(const LagrangianSystem& sys, const Expr& denominator, const ExprVector& singular,
                                     std::uint64_t seed = kDefaultSeed);

}  // namespace noether
