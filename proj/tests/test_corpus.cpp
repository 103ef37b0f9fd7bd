#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "noether/calculus.hpp"
#include "noether/corpus.hpp"
#include "noether/dynamics.hpp"
#include "noether/parse.hpp"

using namespace noether;

namespace {

std::vector<CorpusEntry> all_configurations() {
    std::vector<CorpusEntry> out;
    out.push_back(load_free_particle());
    out.push_back(load_isochrony(GChoice::linear, 0.0));
    out.push_back(load_isochrony(GChoice::linear, 2.0));
    out.push_back(load_isochrony(GChoice::inverse_cube, 0.0));
    out.push_back(load_isochrony(GChoice::radical, 1.0));
    out.push_back(load_isochrony(GChoice::radical, -1.0));
    out.push_back(load_kepler3d());
    return out;
}

const std::vector<CorpusEntry>& configurations() {
    static const std::vector<CorpusEntry> all = all_configurations();
    return all;
}

bool same(const LagrangianSystem& sys, const ExprVector& x, const ExprVector& y, const ExprVector& singular = {}) {
    return equal_numeric(x, y, sys.domain().excluding(singular)).passed;
}

using Vec = std::array<double, 3>;

Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

}  // namespace

TEST_CASE("free particle entry: five strong triples and three on-flow completions") {
    const CorpusEntry& e = configurations()[0];
    CHECK(e.integrals.size() == 5);
    CHECK(e.triples.size() == 8);
    int strong = 0;
    int onflow_only = 0;
    for (const Triple& tr : e.triples) {
        const bool s = verify_triple(e.system, tr, Form::strong).killing.passed;
        const bool o = verify_triple(e.system, tr, Form::onflow).killing.passed;
        CHECK(o);
        strong += s ? 1 : 0;
        onflow_only += (!s && o) ? 1 : 0;
    }
    CHECK(strong == 5);
    CHECK(onflow_only == 3);
    CHECK(e.lie_integrals.size() == 8);
}

TEST_CASE("every corpus integral is conserved and every triple passes in its claimed form") {
    for (const CorpusEntry& e : configurations()) {
        for (const FirstIntegral& n : e.integrals) {
            CAPTURE(e.name);
            CAPTURE(n.name);
            CHECK(n.verified());
        }
        for (const Triple& tr : e.triples) {
            CAPTURE(e.name);
            CAPTURE(tr.name);
            const auto r = verify_triple(e.system, tr, tr.form, &e.integral_for(tr.name));
            CHECK(r.killing.passed);
            REQUIRE(r.integral);
            CHECK(r.integral->passed);
        }
    }
}

TEST_CASE("strong solutions also pass on the flow") {
    for (const CorpusEntry& e : configurations())
        for (const Triple& tr : e.triples) {
            if (!verify_triple(e.system, tr, Form::strong).killing.passed) continue;
            CAPTURE(tr.name);
            CHECK(verify_triple(e.system, tr, Form::onflow).killing.passed);
        }
}

TEST_CASE("isochrony with G = x^-3: N3 matches the explicit formula") {
    const CorpusEntry iso = load_isochrony(GChoice::inverse_cube, 0.0);
    const Alphabet& a = iso.system.alphabet();
    const Expr explicit_n3 = parse("x^2*(-3*x^(-4))*xdot*y - x^2*x^(-3)*ydot - x*xdot^2*ydot + xdot^3*y", a);
    CHECK(same(iso.system, {iso.integral("N3").expr}, {explicit_n3}));
}

TEST_CASE("Kepler gauge triple has xi = (r x v) x u") {
    const CorpusEntry k = load_kepler3d();
    const Triple& gz = k.triple("gauge_z");
    const Vec u{0.3, -0.2, 0.5};
    std::mt19937_64 rng(17);
    for (int i = 0; i < 20; ++i) {
        const SamplePoint p = draw_point(k.system.domain(), rng);
        const Vec r{p.q[0], p.q[1], p.q[2]};
        const Vec v{p.qdot[0], p.qdot[1], p.qdot[2]};
        const Vec expected = cross(cross(r, v), u);
        const auto xi = eval(gz.xi, p);
        for (int j = 0; j < 3; ++j) CHECK(xi[j] == doctest::Approx(expected[j]).epsilon(1e-13));
    }
}

TEST_CASE("Kepler LRL vector evaluated against its vector formula") {
    const CorpusEntry k = load_kepler3d();
    SamplePoint p = k.system.domain().base_point();
    p.q = {1.0, 0.5, -0.3};
    p.qdot = {0.2, 0.9, 0.4};
    const Vec r{1.0, 0.5, -0.3};
    const Vec v{0.2, 0.9, 0.4};
    const double rn = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    const Vec vxl = cross(v, cross(r, v));
    const char* names[] = {"lrl1", "lrl2", "lrl3"};
    double dot_u = 0.0;
    const Vec u{0.3, -0.2, 0.5};
    for (int j = 0; j < 3; ++j) {
        const double a = vxl[j] - r[j] / rn;
        CHECK(eval(k.integral(names[j]).expr, p) == doctest::Approx(a).epsilon(1e-14));
        dot_u += u[j] * a;
    }
    CHECK(eval(k.integral("lrl_u").expr, p) == doctest::Approx(-dot_u).epsilon(1e-14));
}

TEST_CASE("hard-coded families agree with the strong solver") {
    for (const CorpusEntry& e : configurations()) {
        if (e.name != "isochrony") continue;
        const Alphabet& a = e.system.alphabet();
        const Expr T = state_function("T", a);
        for (const auto& [family, integral] : {std::pair{"n2_family", "N2"}, std::pair{"n3_family", "N3"}}) {
            CAPTURE(family);
            const Triple solved = solve_strong(e.system, e.integral(integral), T);
            const Triple& stored = e.triple(family);
            CHECK(same(e.system, {solved.tau, solved.f}, {stored.tau, stored.f}));
            CHECK(same(e.system, solved.xi, stored.xi));
        }
    }
}

TEST_CASE("families stay solutions when the arbitrary function is rebound") {
    const CorpusEntry iso = load_isochrony(GChoice::radical, 1.0);
    const Alphabet& a = iso.system.alphabet();
    const CorpusEntry k = load_kepler3d();
    const Alphabet& ka = k.system.alphabet();
    for (const Expr& body : expression_pool(a)) {
        const LagrangianSystem sys = iso.system.rebind(bind_state_function("T", a, body));
        for (const char* name : {"n2_family", "n3_family"}) {
            CAPTURE(name);
            CHECK(verify_triple(sys, iso.triple(name), Form::strong, &iso.integral_for(name)).passed());
        }
    }
    for (const Expr& body : expression_pool(ka)) {
        const LagrangianSystem sys = k.system.rebind(bind_state_function("h", ka, body));
        CHECK(verify_triple(sys, k.triple("h_family"), Form::onflow, &k.integral("lrl_u")).passed());
        CHECK(verify_triple(sys, k.triple("b_vector"), Form::strong, &k.integral("lrl_u")).passed());
    }
}

TEST_CASE("ansatz triple differs from the strong family by a nonzero vector") {
    for (const CorpusEntry& e : configurations()) {
        if (e.name != "isochrony") continue;
        const Alphabet& a = e.system.alphabet();
        const Triple& tr = e.triple("ansatz");
        const FirstIntegral& n3 = e.integral("N3");
        ExprVector dn;
        for (int i = 0; i < 2; ++i) dn.push_back(diff(n3.expr, a.velocity(i)));
        const ExprVector w = invert_g_apply(e.system, dn).solution;
        const ExprVector gap = subtract(tr.xi, subtract(scale(a.qdots(), tr.tau), w));
        const ExprVector expected{Expr(0.0), parse("(c + x^2)*G'(x)*y + (3*xdot*y - 2*x*ydot)*xdot", a)};
        CHECK(same(e.system, gap, expected));
        CHECK_FALSE(same(e.system, {gap[1]}, {Expr(0.0)}));
        CHECK_FALSE(verify_triple(e.system, tr, Form::strong).killing.passed);
    }
}

TEST_CASE("check_G_ode: basis functions pass, x^2 fails") {
    const Alphabet a(std::vector<std::string>{"x"}, {"c"});
    CHECK(check_G_ode(parse("x", a), a, 0.0).passed);
    CHECK(check_G_ode(parse("x", a), a, 3.5).passed);
    CHECK(check_G_ode(parse("x", a), a, -2.0).passed);
    CHECK(check_G_ode(parse("1/x^3", a), a, 0.0, {}, {0.5, 2.0}).passed);
    CHECK(check_G_ode(parse("(1 + 2*x^2)/sqrt(1 + x^2)", a), a, 1.0).passed);
    CHECK(check_G_ode(parse("(1 - 2*x^2)/sqrt(1 - x^2)", a), a, -1.0, {}, {-0.9, 0.9}).passed);
    CHECK_FALSE(check_G_ode(parse("1/x^3", a), a, 1.0, {}, {0.5, 2.0}).passed);

    const auto r = check_G_ode(parse("x^2", a), a, 1.0);
    CHECK_FALSE(r.passed);
    double x = 0.0;
    for (const auto& [name, v] : r.worst_point)
        if (name == "x") x = v;
    // (1 + x^2) 2 + 3x (2x) - 3x^2 = 2 + 5x^2.
    CHECK(std::abs(r.lhs_at_worst - r.rhs_at_worst) == doctest::Approx(2 + 5 * x * x).epsilon(1e-12));
}

TEST_CASE("G bindings outside the basis are refused") {
    CHECK_THROWS_AS(g_binding(GChoice::inverse_cube, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(g_binding(GChoice::radical, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(load_isochrony(GChoice::inverse_cube, -1.0), std::invalid_argument);
    CHECK(parse_g_choice("radical") == GChoice::radical);
    CHECK_FALSE(parse_g_choice("quartic").has_value());
}

TEST_CASE("isochrony integrals are independent for every basis G") {
    for (const CorpusEntry& e : configurations()) {
        if (e.name != "isochrony") continue;
        const RankReport r = functional_independence_rank(e.system, e.integrals);
        CHECK(r.rank == 3);
        CHECK(r.agreeing >= 9);
    }
}

TEST_CASE("lookup by name") {
    CHECK(load("freeparticle").name == "freeparticle");
    CHECK(load("kepler3d").system.dim() == 3);
    CHECK_THROWS_AS(load("pendulum"), std::invalid_argument);
    CHECK(corpus_names().size() == 3);
    const CorpusEntry& fp = configurations()[0];
    CHECK_THROWS(fp.integral("N9"));
    CHECK_THROWS(fp.triple("gamma9"));
    CHECK(fp.integral_for("gamma7").name == "N2");
    CHECK_FALSE(fp.notes.empty());
}

TEST_CASE("expression pool and state functions") {
    const Alphabet a(std::vector<std::string>{"x", "y"}, {}, {{"h", 5}});
    const ExprVector pool = expression_pool(a);
    CHECK(pool.size() == 5);
    auto table = std::make_shared<FunctionTable>();
    (*table)["h"] = bind_state_function("h", a, parse("t*x + ydot^2", a));
    SamplePoint p;
    p.t = 2.0;
    p.q = {3.0, 0.0};
    p.qdot = {0.0, 0.5};
    p.qddot = {0.0, 1.0};
    p.functions = table;
    const Expr h = state_function("h", a);
    CHECK(eval(h, p) == 6.25);
    CHECK(eval(diff(h, a.velocity(1)), p) == 1.0);
    CHECK(eval(total_dt(h, a), p) == 4.0);
}
