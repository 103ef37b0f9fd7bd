#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noether/killing.hpp"
#include "noether/mechanics.hpp"

namespace noether {

/// A worked system with its known first integrals and solution triples.
struct CorpusEntry {
    std::string name;
    LagrangianSystem system;
    std::vector<FirstIntegral> integrals;
    std::vector<Triple> triples;
    /// (triple name, integral name): the integral each triple produces.
    std::vector<std::pair<std::string, std::string>> integral_of;
    /// Free-form reference columns kept verbatim, e.g. (triple, Lie first integral).
    std::vector<std::pair<std::string, std::string>> lie_integrals;
    std::vector<std::string> notes;

    const FirstIntegral& integral(std::string_view name) const;
    const Triple& triple(std::string_view name) const;
    /// Integral produced by the named triple.
    const FirstIntegral& integral_for(std::string_view triple_name) const;
};

/// The one-dimensional free particle L = qdot^2/2.
CorpusEntry load_free_particle();

/// Choice of G for the isochrony family L = xdot ydot - G(x) y:
/// linear G = x (any c), inverse_cube G = x^-3 (c = 0), radical
/// G = (c + 2x^2)/sqrt(c + x^2) for c > 0 and (-c - 2x^2)/sqrt(-c - x^2) for c < 0.
enum class GChoice { linear, inverse_cube, radical };

std::string_view g_choice_name(GChoice g);
std::optional<GChoice> parse_g_choice(std::string_view text);

/// Body of G in the formal variable `x` with its antiderivative.
/// Throws std::invalid_argument for combinations outside the basis.
std::shared_ptr<const FunctionBinding> g_binding(GChoice g, double c);

CorpusEntry load_isochrony(GChoice g = GChoice::linear, double c = 0.0);

struct KeplerParams {
    double mu = 1.0;
    double u[3] = {0.3, -0.2, 0.5};
};

/// Kepler problem in three dimensions, L = |v|^2/2 + mu/|r|.
CorpusEntry load_kepler3d(const KeplerParams& params = {});

/// "freeparticle", "isochrony" (G = x, c = 0) or "kepler3d".
CorpusEntry load(std::string_view name);
std::vector<std::string> corpus_names();

/// Checks (c + x^2) G'' + 3x G' == 3G for G an expression in the coordinate
/// of a one-dimensional alphabet.
VerificationReport check_G_ode(const Expr& G, const Alphabet& alphabet, double c, const CheckOptions& opts = {},
                               Range x_range = {});

/// Small pool of test functions of (t, q, qdot): 0, 1, t, q1 qdot1, sin t.
ExprVector expression_pool(const Alphabet& alphabet);

/// Binds `name` to a function of (t, q, qdot) given by `body` written in the
/// system's own symbols. Formal arguments follow the order t, q1..qn, qdot1..qdotn.
std::shared_ptr<const FunctionBinding> bind_state_function(const std::string& name, const Alphabet& alphabet,
                                                           const Expr& body);

/// Application name(t, q1..qn, qdot1..qdotn).
Expr state_function(const std::string& name, const Alphabet& alphabet);

}  // namespace noether
