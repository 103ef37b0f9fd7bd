#include "noether/killing.hpp"

#include <stdexcept>

#include "noether/calculus.hpp"

namespace noether {

namespace {

void validate(const LagrangianSystem& sys, const Triple& tr) {
    if (static_cast<int>(tr.xi.size()) != sys.dim())
        throw std::invalid_argument("triple '" + tr.name + "': xi has " + std::to_string(tr.xi.size()) +
                                    " components, system has " + std::to_string(sys.dim()));
    auto check = [&](const Expr& e, const char* what) {
        if (contains_kind(e, SymbolKind::accel))
            throw std::invalid_argument("triple '" + tr.name + "': " + what + " depends on accelerations");
    };
    check(tr.tau, "tau");
    for (const Expr& x : tr.xi) check(x, "xi");
    check(tr.f, "f");
}

const ExprVector& symbolic_accel(const LagrangianSystem& sys) {
    if (sys.accel().empty()) throw GInversionError("no symbolic normal form for '" + sys.name() + "'");
    return sys.accel();
}

Expr time_derivative(const LagrangianSystem& sys, const Expr& e, Form mode) {
    if (is_strong(mode)) return total_dt(e, sys.alphabet());
    return total_dt(e, sys.alphabet(), symbolic_accel(sys));
}

ExprVector concat(ExprVector a, const ExprVector& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

FirstIntegral ensure_conserved(const LagrangianSystem& sys, const FirstIntegral& integral, const CheckOptions& opts) {
    FirstIntegral out = integral;
    if (!out.conservation) out.conservation = check_conservation(sys, out, opts);
    if (!out.conservation->passed) throw NotConservedError(*out.conservation);
    return out;
}

// g^-1 dN/dqdot, symbolically.
ExprVector inverse_gradient(const LagrangianSystem& sys, const Expr& n, std::uint64_t seed) {
    ExprVector grad;
    for (int i = 0; i < sys.dim(); ++i) grad.push_back(diff(n, sys.alphabet().velocity(i)));
    const LinearSolve ls = invert_g_apply(sys, grad, seed);
    if (ls.numeric_fallback) throw GInversionError("g could not be inverted symbolically for '" + sys.name() + "'");
    if (ls.spot_check && !ls.spot_check->passed)
        throw GInversionError("symbolic g^-1 failed its spot check: " + ls.spot_check->summary());
    return ls.solution;
}

Expr shifted_lagrangian(const LagrangianSystem& sys, double c) { return sys.lagrangian() + Expr(c); }

// xi + term. A previous opposite shift left its term as the last summand;
// cancelling only that one makes conversions round-trip exactly.
Expr shift(const Expr& xi, const Expr& term) {
    const Expr neg = -term;
    if (identical(xi, neg)) return Expr(0.0);
    if (xi.op() == Op::add && identical(xi.args().back(), neg)) {
        const auto args = xi.args();
        return sum(std::vector<Expr>(args.begin(), args.end() - 1));
    }
    return xi + term;
}

// Adds (d, qdot d, L d) in the standard convention, (d, 0, L d) in the alternative one.
Triple add_trivial(const LagrangianSystem& sys, const Triple& tr, const Expr& d) {
    Triple out = tr;
    out.tau = tr.tau + d;
    if (convention_of(tr.form) == Convention::standard)
        for (int i = 0; i < sys.dim(); ++i) out.xi[i] = tr.xi[i] + sys.alphabet().qdot(i) * d;
    out.f = tr.f + sys.lagrangian() * d;
    return out;
}

}  // namespace

std::string_view form_name(Form form) {
    switch (form) {
        case Form::onflow: return "onflow";
        case Form::strong: return "strong";
        case Form::alt_onflow: return "alt_onflow";
        case Form::alt_strong: return "alt_strong";
    }
    return "?";
}

std::optional<Form> parse_form(std::string_view text) {
    std::string s(text);
    for (char& ch : s)
        if (ch == '-') ch = '_';
    for (Form f : {Form::onflow, Form::strong, Form::alt_onflow, Form::alt_strong})
        if (s == form_name(f)) return f;
    return std::nullopt;
}

bool is_strong(Form form) { return form == Form::strong || form == Form::alt_strong; }

Convention convention_of(Form form) {
    return form == Form::alt_onflow || form == Form::alt_strong ? Convention::alternative : Convention::standard;
}

FirstIntegral make_integral(std::string name, Expr expr, ExprVector singular) {
    return FirstIntegral{std::move(name), std::move(expr), std::move(singular), std::nullopt};
}

Expr killing_lhs(const LagrangianSystem& sys, const Triple& tr, Form mode) {
    validate(sys, tr);
    const Alphabet& a = sys.alphabet();
    const Expr& L = sys.lagrangian();
    const int n = sys.dim();
    const Expr tau_dot = time_derivative(sys, tr.tau, mode);
    std::vector<Expr> terms{tr.tau * diff(L, a.time()), L * tau_dot};
    const bool alt = convention_of(mode) == Convention::alternative;
    for (int i = 0; i < n; ++i) {
        const Expr dq = diff(L, a.coord(i));
        const Expr& p = sys.momentum()[i];
        const Expr xi_dot = time_derivative(sys, tr.xi[i], mode);
        if (alt) {
            const Expr acc = is_strong(mode) ? a.qddot(i) : symbolic_accel(sys)[i];
            terms.push_back(dq * (tr.xi[i] + tr.tau * a.qdot(i)));
            terms.push_back(p * (xi_dot + tr.tau * acc));
        } else {
            terms.push_back(dq * tr.xi[i]);
            terms.push_back(p * (xi_dot - a.qdot(i) * tau_dot));
        }
    }
    return sum(std::move(terms));
}

Expr killing_rhs(const LagrangianSystem& sys, const Triple& tr, Form mode) {
    validate(sys, tr);
    return time_derivative(sys, tr.f, mode);
}

TripleReport verify_triple(const LagrangianSystem& sys, const Triple& tr, Form mode, const FirstIntegral* integral,
                           const CheckOptions& opts) {
    ExprVector singular = tr.singular;
    if (integral) singular = concat(singular, integral->singular);
    const SamplingSpec domain = sys.domain().excluding(singular);
    TripleReport r;
    r.killing = equal_numeric(killing_lhs(sys, tr, mode), killing_rhs(sys, tr, mode), domain, opts,
                              "killing equation", std::string(form_name(mode)));
    if (integral)
        r.integral = equal_numeric(noether_expr(sys, tr, convention_of(mode)), integral->expr, domain, opts,
                                   "noether integral", std::string(form_name(mode)));
    return r;
}

Expr noether_expr(const LagrangianSystem& sys, const Triple& tr, Convention convention) {
    validate(sys, tr);
    const Alphabet& a = sys.alphabet();
    std::vector<Expr> terms{tr.f, -(sys.lagrangian() * tr.tau)};
    for (int i = 0; i < sys.dim(); ++i) {
        const Expr& p = sys.momentum()[i];
        const Expr x = convention == Convention::standard ? tr.xi[i] - a.qdot(i) * tr.tau : tr.xi[i];
        terms.push_back(-(p * x));
    }
    return sum(std::move(terms));
}

FirstIntegral noether_integral(const LagrangianSystem& sys, const Triple& tr, Convention convention,
                               const CheckOptions& opts) {
    FirstIntegral out = make_integral(tr.name.empty() ? "N" : "N[" + tr.name + "]", noether_expr(sys, tr, convention),
                                      tr.singular);
    out.conservation = check_conservation(sys, out, opts);
    return out;
}

VerificationReport check_conservation(const LagrangianSystem& sys, const FirstIntegral& integral,
                                      const CheckOptions& opts) {
    if (contains_kind(integral.expr, SymbolKind::accel))
        throw std::invalid_argument("integral '" + integral.name + "' depends on accelerations");
    const Alphabet& a = sys.alphabet();
    const Expr& n = integral.expr;
    const ExprVector& acc = symbolic_accel(sys);
    std::vector<Expr> explicit_part{diff(n, a.time())};
    std::vector<Expr> flow_part;
    for (int i = 0; i < sys.dim(); ++i) {
        explicit_part.push_back(diff(n, a.coord(i)) * a.qdot(i));
        flow_part.push_back(-(diff(n, a.velocity(i)) * acc[i]));
    }
    return equal_numeric(sum(std::move(explicit_part)), sum(std::move(flow_part)),
                         sys.domain().excluding(integral.singular), opts, "conservation", "onflow");
}

void require_lagrangian_nonvanishing(const LagrangianSystem& sys, const Expr& denominator, const ExprVector& singular,
                                     std::uint64_t seed) {
    const SamplingSpec domain = sys.domain().excluding(concat(singular, {denominator}));
    if (denominator.is_constant() && std::abs(denominator.value()) <= 1e-6)
        throw LagrangianVanishesError("L + c is identically " + to_string(denominator) + " for '" + sys.name() + "'");
    try {
        for (int k = 0; k < 20; ++k) {
            std::mt19937_64 rng(derive_seed(seed, 9000 + static_cast<std::uint64_t>(k)));
            draw_point(domain, rng);
        }
    } catch (const SamplingError&) {
        throw LagrangianVanishesError("L + c vanishes on the sampled domain of '" + sys.name() + "'");
    }
}

Triple solve_onflow(const LagrangianSystem& sys, const FirstIntegral& integral, const Expr& tau, const ExprVector& xi,
                    const CheckOptions& opts) {
    const FirstIntegral n = ensure_conserved(sys, integral, opts);
    if (static_cast<int>(xi.size()) != sys.dim()) throw std::invalid_argument("solve_onflow: xi has the wrong size");
    std::vector<Expr> terms{tau * sys.lagrangian(), n.expr};
    for (int i = 0; i < sys.dim(); ++i)
        terms.push_back(sys.momentum()[i] * (xi[i] - tau * sys.alphabet().qdot(i)));
    Triple tr{"onflow", tau, xi, sum(std::move(terms)), Form::onflow, n.singular};
    validate(sys, tr);
    return tr;
}

Triple solve_onflow_simplest(const LagrangianSystem& sys, const FirstIntegral& integral, double c,
                             const CheckOptions& opts) {
    return solve_onflow_with_R(sys, integral, ExprVector(static_cast<std::size_t>(sys.dim()), Expr(0.0)), c, opts);
}

Triple solve_onflow_with_R(const LagrangianSystem& sys, const FirstIntegral& integral, const ExprVector& R, double c,
                           const CheckOptions& opts) {
    const FirstIntegral n = ensure_conserved(sys, integral, opts);
    if (static_cast<int>(R.size()) != sys.dim()) throw std::invalid_argument("solve_onflow_with_R: R has the wrong size");
    const Expr denom = shifted_lagrangian(sys, c);
    require_lagrangian_nonvanishing(sys, denom, n.singular, opts.seed);
    const Expr m = n.expr + dot(sys.momentum(), R);
    const Expr tau = -(m / denom);
    Triple tr;
    tr.name = "onflow";
    tr.tau = tau;
    for (int i = 0; i < sys.dim(); ++i) tr.xi.push_back(R[i] + tau * sys.alphabet().qdot(i));
    tr.f = c == 0.0 ? Expr(0.0) : Expr(c) * m / denom;
    tr.form = Form::onflow;
    tr.singular = concat(n.singular, {denom});
    validate(sys, tr);
    return tr;
}

Triple solve_strong(const LagrangianSystem& sys, const FirstIntegral& integral, const Expr& tau,
                    const CheckOptions& opts) {
    const FirstIntegral n = ensure_conserved(sys, integral, opts);
    const ExprVector w = inverse_gradient(sys, n.expr, opts.seed);
    Triple tr;
    tr.name = "strong";
    tr.tau = tau;
    for (int i = 0; i < sys.dim(); ++i) tr.xi.push_back(tau * sys.alphabet().qdot(i) - w[i]);
    tr.f = tau * sys.lagrangian() + n.expr - dot(sys.momentum(), w);
    tr.form = Form::strong;
    tr.singular = n.singular;
    validate(sys, tr);
    return tr;
}

Triple solve_alt_strong_trivial_gauge(const LagrangianSystem& sys, const FirstIntegral& integral, double c,
                                      const CheckOptions& opts) {
    const FirstIntegral n = ensure_conserved(sys, integral, opts);
    const Expr denom = shifted_lagrangian(sys, c);
    require_lagrangian_nonvanishing(sys, denom, n.singular, opts.seed);
    const ExprVector w = inverse_gradient(sys, n.expr, opts.seed);
    const Expr m = n.expr - dot(sys.momentum(), w);
    Triple tr;
    tr.name = "alt_strong";
    tr.tau = -(m / denom);
    for (const Expr& wi : w) tr.xi.push_back(-wi);
    tr.f = c == 0.0 ? Expr(0.0) : Expr(c) * m / denom;
    tr.form = Form::alt_strong;
    tr.singular = concat(n.singular, {denom});
    validate(sys, tr);
    return tr;
}

Triple multiplicity_transform(const LagrangianSystem& sys, const Triple& tr, const Expr& h, double c,
                              const CheckOptions& opts) {
    validate(sys, tr);
    if (contains_kind(h, SymbolKind::accel)) throw std::invalid_argument("h depends on accelerations");
    const Expr denom = shifted_lagrangian(sys, c);
    require_lagrangian_nonvanishing(sys, denom, tr.singular, opts.seed);
    Triple out = add_trivial(sys, tr, (h - tr.f) / denom);
    if (c == 0.0) out.f = h;
    out.singular = concat(tr.singular, {denom});
    return out;
}

Triple trivialize(const LagrangianSystem& sys, const Triple& tr, Trivialize which, const CheckOptions& opts) {
    validate(sys, tr);
    if (which == Trivialize::time) {
        Triple out = add_trivial(sys, tr, -tr.tau);
        out.tau = Expr(0.0);
        return out;
    }
    if (tr.f.is_zero()) return tr;
    return multiplicity_transform(sys, tr, Expr(0.0), 0.0, opts);
}

Triple convert_standard_alternative(const Triple& tr, const Alphabet& alphabet, Direction direction) {
    if (static_cast<int>(tr.xi.size()) != alphabet.dim())
        throw std::invalid_argument("convert: xi has the wrong size");
    Triple out = tr;
    const bool to_alt = direction == Direction::to_alternative;
    for (int i = 0; i < alphabet.dim(); ++i) {
        const Expr term = tr.tau * alphabet.qdot(i);
        out.xi[i] = shift(tr.xi[i], to_alt ? -term : term);
    }
    switch (tr.form) {
        case Form::onflow:
        case Form::alt_onflow: out.form = to_alt ? Form::alt_onflow : Form::onflow; break;
        case Form::strong:
        case Form::alt_strong: out.form = to_alt ? Form::alt_strong : Form::strong; break;
    }
    return out;
}

VelocityIndependence velocity_independence_check(const LagrangianSystem& sys, const FirstIntegral& integral,
                                                 const CheckOptions& opts) {
    const Alphabet& a = sys.alphabet();
    const int n = sys.dim();
    VelocityIndependence out;
    out.w = inverse_gradient(sys, integral.expr, opts.seed);
    CheckOptions strict = opts;
    strict.tol = 1e-8;
    const SamplingSpec domain = sys.domain().excluding(integral.singular);

    ExprMatrix jac(static_cast<std::size_t>(n), ExprVector(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) jac[i][j] = diff(out.w[i], a.velocity(j));

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                out.evidence = equal_numeric(diff(jac[i][j], a.velocity(k)), Expr(0.0), domain, strict,
                                             "affine in velocities", "strong");
                if (!out.evidence.passed) return out;
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Expr expected = i == j ? jac[0][0] : Expr(0.0);
            out.evidence =
                equal_numeric(jac[i][j], expected, domain, strict, "scalar velocity coefficient", "strong");
            if (!out.evidence.passed) return out;
        }
    }
    Substitution at_rest;
    for (int i = 0; i < n; ++i) at_rest.symbols.emplace_back(a.velocity(i), Expr(0.0));
    for (const Expr& wi : out.w) out.a.push_back(substitute(wi, at_rest));
    out.b = substitute(jac[0][0], at_rest);
    out.admissible = true;
    return out;
}

}  // namespace noether
