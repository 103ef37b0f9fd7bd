#include "noether/corpus.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <tuple>
#include <stdexcept>

#include "noether/calculus.hpp"
#include "noether/parse.hpp"

namespace noether {

namespace {

using Vec3 = std::array<Expr, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Expr dot3(const Vec3& a, const Vec3& b) { return sum({a[0] * b[0], a[1] * b[1], a[2] * b[2]}); }

Vec3 scaled(const Vec3& a, const Expr& s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Vec3 plus(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

ExprVector as_vector(const Vec3& a) { return {a[0], a[1], a[2]}; }

Triple make_triple(std::string name, Expr tau, ExprVector xi, Expr f, Form form, ExprVector singular = {}) {
    return Triple{std::move(name), std::move(tau), std::move(xi), std::move(f), form, std::move(singular)};
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const FirstIntegral& CorpusEntry::integral(std::string_view n) const {
    for (const auto& i : integrals)
        if (i.name == n) return i;
    throw std::out_of_range("corpus '" + name + "' has no integral '" + std::string(n) + "'");
}

const Triple& CorpusEntry::triple(std::string_view n) const {
    for (const auto& t : triples)
        if (t.name == n) return t;
    throw std::out_of_range("corpus '" + name + "' has no triple '" + std::string(n) + "'");
}

const FirstIntegral& CorpusEntry::integral_for(std::string_view triple_name) const {
    for (const auto& [t, i] : integral_of)
        if (t == triple_name) return integral(i);
    throw std::out_of_range("corpus '" + name + "' records no integral for triple '" + std::string(triple_name) + "'");
}

std::shared_ptr<const FunctionBinding> bind_state_function(const std::string& name, const Alphabet& alphabet,
                                                           const Expr& body) {
    std::vector<std::string> formals{"_t"};
    std::vector<Symbol> from{alphabet.time()};
    for (int i = 0; i < alphabet.dim(); ++i) {
        formals.push_back("_" + alphabet.coord(i).name);
        from.push_back(alphabet.coord(i));
    }
    for (int i = 0; i < alphabet.dim(); ++i) {
        formals.push_back("_" + alphabet.velocity(i).name);
        from.push_back(alphabet.velocity(i));
    }
    Substitution s;
    for (std::size_t k = 0; k < from.size(); ++k)
        s.symbols.emplace_back(from[k], Expr(Symbol{SymbolKind::formal, static_cast<int>(k), formals[k]}));
    return std::make_shared<FunctionBinding>(name, formals, substitute(body, s));
}

Expr state_function(const std::string& name, const Alphabet& alphabet) {
    std::vector<Expr> args{alphabet.t()};
    for (const Expr& q : alphabet.qs()) args.push_back(q);
    for (const Expr& v : alphabet.qdots()) args.push_back(v);
    std::vector<int> orders(args.size(), 0);
    return apply(name, std::move(orders), std::move(args));
}

ExprVector expression_pool(const Alphabet& a) { return {Expr(0.0), Expr(1.0), a.t(), a.q(0) * a.qdot(0), sin(a.t())}; }

CorpusEntry load_free_particle() {
    const Alphabet a(std::vector<std::string>{"q"});
    auto P = [&](std::string_view text) { return parse(text, a); };

    SystemDefinition def;
    def.name = "freeparticle";
    def.alphabet = a;
    def.lagrangian = P("qdot^2/2");

    CorpusEntry e;
    e.name = def.name;
    e.system = build_system(std::move(def));
    e.integrals = {
        make_integral("N1", P("-qdot")),
        make_integral("N2", P("q - t*qdot")),
        make_integral("N3", P("qdot^2/2")),
        make_integral("N4", P("(t*qdot - q)*qdot")),
        make_integral("N5", P("(q - t*qdot)^2/2")),
    };
    for (auto& n : e.integrals) n.conservation = check_conservation(e.system, n);

    e.triples = {
        make_triple("gamma1", P("0"), {P("1")}, P("0"), Form::strong),
        make_triple("gamma2", P("0"), {P("t")}, P("q"), Form::strong),
        make_triple("gamma3", P("1"), {P("0")}, P("0"), Form::strong),
        make_triple("gamma4", P("2*t"), {P("q")}, P("0"), Form::strong),
        make_triple("gamma5", P("t^2"), {P("t*q")}, P("q^2/2"), Form::strong),
    };
    for (int k = 1; k <= 5; ++k) e.integral_of.emplace_back("gamma" + std::to_string(k), "N" + std::to_string(k));

    // Point symmetries that admit no strong boundary term; completed on the flow.
    const FirstIntegral& n2 = e.integral("N2");
    const std::vector<std::tuple<std::string, Expr, Expr>> onflow_only{
        {"gamma6", P("0"), P("q")},
        {"gamma7", P("q"), P("0")},
        {"gamma8", P("q*t"), P("q^2")},
    };
    for (const auto& [name, tau, xi] : onflow_only) {
        Triple tr = solve_onflow(e.system, n2, tau, {xi});
        tr.name = name;
        e.triples.push_back(tr);
        e.integral_of.emplace_back(name, "N2");
    }

    e.lie_integrals = {
        {"gamma1", "qdot"},
        {"gamma2", "t*qdot - q"},
        {"gamma3", "qdot"},
        {"gamma4", "(t*qdot - q)*qdot"},
        {"gamma5", "t*qdot - q"},
        {"gamma6", "(t*qdot - q)/qdot"},
        {"gamma7", "(t*qdot - q)/qdot"},
        {"gamma8", "(t*qdot - q)/qdot"},
    };
    e.notes = {
        "Eight point symmetries of qddot = 0; gamma1..gamma5 complete to strong triples.",
        "gamma6..gamma8 have no strong boundary term; their on-flow boundary terms are generated "
        "from N2 = q - t*qdot by the general on-flow solution.",
        "lie_integrals lists the first integral attached to each point symmetry by Lie's method; it is "
        "reference data and is not used by any check.",
    };
    return e;
}

std::string_view g_choice_name(GChoice g) {
    switch (g) {
        case GChoice::linear: return "linear";
        case GChoice::inverse_cube: return "inverse_cube";
        case GChoice::radical: return "radical";
    }
    return "?";
}

std::optional<GChoice> parse_g_choice(std::string_view text) {
    for (GChoice g : {GChoice::linear, GChoice::inverse_cube, GChoice::radical})
        if (text == g_choice_name(g)) return g;
    return std::nullopt;
}

std::shared_ptr<const FunctionBinding> g_binding(GChoice g, double c) {
    const Alphabet b = Alphabet::for_binding({"x"}, {"c"});
    auto P = [&](std::string_view text) { return parse(text, b); };
    switch (g) {
        case GChoice::linear: return std::make_shared<FunctionBinding>("G", std::vector<std::string>{"x"}, P("x"), P("x^2/2"));
        case GChoice::inverse_cube:
            if (c != 0.0) throw std::invalid_argument("G = x^-3 solves the G equation only for c = 0");
            return std::make_shared<FunctionBinding>("G", std::vector<std::string>{"x"}, P("x^(-3)"),
                                                     P("-1/(2*x^2)"));
        case GChoice::radical:
            if (c > 0.0)
                return std::make_shared<FunctionBinding>("G", std::vector<std::string>{"x"},
                                                         P("(c + 2*x^2)/sqrt(c + x^2)"), P("x*sqrt(c + x^2)"));
            if (c < 0.0)
                return std::make_shared<FunctionBinding>("G", std::vector<std::string>{"x"},
                                                         P("(-c - 2*x^2)/sqrt(-c - x^2)"), P("x*sqrt(-c - x^2)"));
            throw std::invalid_argument("the radical G requires c != 0");
    }
    throw std::invalid_argument("unknown G choice");
}

CorpusEntry load_isochrony(GChoice g, double c) {
    const auto G = g_binding(g, c);
    const Alphabet a(std::vector<std::string>{"x", "y"}, {"c"}, {{"G", 1}, {"T", 5}});
    auto P = [&](std::string_view text) { return parse(text, a); };

    auto table = std::make_shared<FunctionTable>();
    (*table)["G"] = G;
    (*table)["T"] = bind_state_function("T", a, a.t());

    SystemDefinition def;
    def.name = "isochrony";
    def.alphabet = a;
    def.lagrangian = P("xdot*ydot - G(x)*y");
    def.params = {{"c", c}};
    def.functions = table;
    if (g == GChoice::inverse_cube) {
        // Keep away from the pole at x = 0 so that identity checks stay well scaled.
        def.ranges.emplace_back("x", Range{0.5, 2.0});
        def.singular.push_back(P("x"));
    } else if (g == GChoice::radical && c < 0.0) {
        const double edge = 0.9 * std::sqrt(-c);
        def.ranges.emplace_back("x", Range{-edge, edge});
        def.singular.push_back(P("-c - x^2"));
    }

    CorpusEntry e;
    e.name = def.name;
    e.system = build_system(std::move(def));
    e.integrals = {
        make_integral("N1", P("xdot*ydot + G(x)*y")),
        make_integral("N2", P("xdot^2/2 + G'[-1](x)")),
        make_integral("N3", P("(c + x^2)*G'(x)*xdot*y - (c + x^2)*G(x)*ydot - x*xdot^2*ydot + xdot^3*y")),
    };
    for (auto& n : e.integrals) n.conservation = check_conservation(e.system, n);

    const Expr T = state_function("T", a);
    const Expr h = P("(c + x^2)*G(x) + x*xdot^2");
    const Expr h_dot = P("(c + x^2)*G'(x)*xdot + xdot^3");
    e.triples = {
        make_triple("time_shift", P("1"), {P("0"), P("0")}, P("0"), Form::strong),
        make_triple("n2_family", T, {T * P("xdot"), T * P("ydot") - P("xdot")},
                    T * e.system.lagrangian() - P("xdot^2/2") + P("G'[-1](x)"), Form::strong),
        make_triple("ansatz", P("0"), {h, P("0")}, P("y") * h_dot, Form::onflow),
        make_triple("n3_family", T,
                    {P("(c + x^2)*G(x)") + (T + P("x*xdot")) * P("xdot"),
                     P("-y*(c + x^2)*G'(x) - 3*xdot^2*y + 2*x*xdot*ydot") + T * P("ydot")},
                    (T + P("2*x*xdot")) * P("xdot*ydot") - P("2*xdot^3*y") - P("G(x)") * T * P("y"), Form::strong),
    };
    e.integral_of = {{"time_shift", "N1"}, {"n2_family", "N2"}, {"ansatz", "N3"}, {"n3_family", "N3"}};
    e.notes = {
        "L = xdot*ydot - G(x)*y with G solving (c + x^2) G'' + 3x G' - 3G = 0; here G is " +
            std::string(g_choice_name(g)) + " with c = " + format_number(c) + ".",
        "N1 is the energy, N2 = xdot^2/2 + integral of G, N3 comes from the quadratic velocity ansatz "
        "xi = (h, 0), f = y dh/dt with h = (c + x^2) G + x xdot^2.",
        "T(t, x, y, xdot, ydot) is an arbitrary time change; it is bound to t by default and can be rebound.",
        "For N2, g^-1 dN2/dqdot = (0, xdot) by direct computation.",
        "The ansatz triple solves the on-flow equation only; n3_family is the strong solution family for N3.",
    };
    return e;
}

CorpusEntry load_kepler3d(const KeplerParams& params) {
    const Alphabet a(std::vector<std::string>{"r1", "r2", "r3"}, {"mu", "u1", "u2", "u3"}, {{"h", 7}});
    auto P = [&](std::string_view text) { return parse(text, a); };

    const Vec3 r{a.q(0), a.q(1), a.q(2)};
    const Vec3 v{a.qdot(0), a.qdot(1), a.qdot(2)};
    const Vec3 u{a.p("u1"), a.p("u2"), a.p("u3")};
    const Expr mu = a.p("mu");
    const Expr rn = P("sqrt(r1^2 + r2^2 + r3^2)");

    auto table = std::make_shared<FunctionTable>();
    (*table)["h"] = bind_state_function("h", a, a.q(0) * a.qdot(0));

    SystemDefinition def;
    def.name = "kepler3d";
    def.alphabet = a;
    def.lagrangian = P("(r1dot^2 + r2dot^2 + r3dot^2)/2 + mu/sqrt(r1^2 + r2^2 + r3^2)");
    def.params = {{"mu", params.mu}, {"u1", params.u[0]}, {"u2", params.u[1]}, {"u3", params.u[2]}};
    def.singular = {P("r1^2 + r2^2 + r3^2")};
    def.functions = table;

    CorpusEntry e;
    e.name = def.name;
    e.system = build_system(std::move(def));
    const Expr& L = e.system.lagrangian();

    const Vec3 ang = cross(r, v);
    const Vec3 vxl = cross(v, ang);
    const Vec3 lrl = plus(vxl, scaled(r, -(mu / rn)));
    const Expr n_lrl = -dot3(u, lrl);

    e.integrals = {
        make_integral("energy", P("(r1dot^2 + r2dot^2 + r3dot^2)/2 - mu/sqrt(r1^2 + r2^2 + r3^2)")),
        make_integral("angmom1", ang[0]),
        make_integral("angmom2", ang[1]),
        make_integral("angmom3", ang[2]),
        make_integral("lrl1", lrl[0]),
        make_integral("lrl2", lrl[1]),
        make_integral("lrl3", lrl[2]),
        make_integral("lrl_u", n_lrl),
    };
    for (auto& n : e.integrals) n.conservation = check_conservation(e.system, n);

    const Expr f0 = mu * dot3(r, u) / rn;
    const Expr tau0 = dot3(u, vxl) / L;
    const Vec3 xi_l = plus(plus(scaled(v, dot3(r, u)), scaled(r, Expr(-0.5) * dot3(v, u))),
                           scaled(u, Expr(-0.5) * dot3(v, r)));
    const Vec3 xi_z = cross(ang, u);
    const Expr h = state_function("h", a);
    const Expr tau_h = (h - f0) / L;
    const Vec3 b = plus(plus(scaled(u, -dot3(r, v)), scaled(r, -dot3(v, u))), scaled(v, dot3(u, r)));
    const Expr tau_b = (h - dot3(u, plus(vxl, scaled(r, mu / rn)))) / L;
    const Vec3 xi_b = scaled(plus(plus(scaled(v, h), scaled(cross(v, cross(b, v)), Expr(0.5))), scaled(b, mu / rn)),
                             Expr(1.0) / L);

    e.triples = {
        make_triple("tau0", tau0, as_vector(scaled(v, tau0)), f0, Form::onflow, {L}),
        make_triple("levy_leblond", Expr(0.0), as_vector(xi_l), f0, Form::onflow),
        make_triple("gauge_z", Expr(0.0), as_vector(xi_z), f0, Form::onflow),
        make_triple("h_family", tau_h, as_vector(plus(xi_z, scaled(v, tau_h))), h, Form::onflow, {L}),
        make_triple("b_vector", tau_b, as_vector(xi_b), h, Form::strong, {L}),
    };
    for (const auto& t : e.triples) e.integral_of.emplace_back(t.name, "lrl_u");
    e.notes = {
        "L = |v|^2/2 + mu/|r| with r = (r1, r2, r3), v = (r1dot, r2dot, r3dot).",
        "lrl_u = -u.A for the Laplace-Runge-Lenz vector A = v x (r x v) - mu r/|r| and a fixed direction u.",
        "gauge_z has xi = (r x v) x u and f = mu (r.u)/|r|; h_family adds the trivial symmetry that turns its "
        "boundary term into an arbitrary h(t, r, v), bound to r1*r1dot by default.",
        "b_vector is a strong solution with b = -u (r.v) - r (v.u) + v (u.r).",
    };
    return e;
}

CorpusEntry load(std::string_view name) {
    if (name == "freeparticle") return load_free_particle();
    if (name == "isochrony") return load_isochrony();
    if (name == "kepler3d") return load_kepler3d();
    throw std::invalid_argument("unknown corpus entry '" + std::string(name) + "'");
}

std::vector<std::string> corpus_names() { return {"freeparticle", "isochrony", "kepler3d"}; }

VerificationReport check_G_ode(const Expr& G, const Alphabet& alphabet, double c, const CheckOptions& opts,
                               Range x_range) {
    if (alphabet.dim() != 1) throw std::invalid_argument("check_G_ode: expects a one-dimensional alphabet");
    const Symbol x = alphabet.coord(0);
    const Expr xe(x);
    const Expr g1 = diff(G, x);
    const Expr g2 = diff(g1, x);
    const Expr lhs = (Expr(c) + xe * xe) * g2 + Expr(3.0) * xe * g1;
    const Expr rhs = Expr(3.0) * G;
    std::vector<std::pair<std::string, double>> params;
    if (alphabet.has_param("c")) params.emplace_back("c", c);
    SamplingSpec spec = SamplingSpec::box(alphabet, params);
    spec.q[0] = x_range;
    return equal_numeric(lhs, rhs, spec, opts, "G equation", "c=" + format_number(c));
}

}  // namespace noether
