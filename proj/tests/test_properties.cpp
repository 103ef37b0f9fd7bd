#include <doctest.h>

#include "noether/calculus.hpp"
#include "noether/corpus.hpp"
#include "noether/killing.hpp"
#include "noether/parse.hpp"
#include "noether/simplify.hpp"
#include "support.hpp"

using namespace noether;
using testing_support::ExprGen;

namespace {

constexpr int kTrials = 40;

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> all{load_free_particle(), load_isochrony(GChoice::radical, 1.0),
                                              load_isochrony(GChoice::inverse_cube, 0.0), load_kepler3d()};
    return all;
}

SamplingSpec with_accels(const Alphabet& a) { return SamplingSpec::box(a); }

bool same(const SamplingSpec& spec, const Expr& x, const Expr& y) {
    return equal_numeric(x, y, spec, {30, 1e-9, 99}).passed;
}

bool same(const SamplingSpec& spec, const ExprVector& x, const ExprVector& y) {
    return equal_numeric(x, y, spec, {30, 1e-9, 99}).passed;
}

}  // namespace

TEST_CASE("diff is linear") {
    const Alphabet a(2);
    ExprGen gen(a, 1);
    const SamplingSpec spec = with_accels(a);
    for (int i = 0; i < kTrials; ++i) {
        const Expr x = gen(3);
        const Expr y = gen(3);
        const Symbol v = gen.pick(2) == 0 ? a.coord(gen.pick(2)) : a.velocity(gen.pick(2));
        CAPTURE(to_string(x));
        CAPTURE(to_string(y));
        CHECK(same(spec, diff(x + y, v), diff(x, v) + diff(y, v)));
        CHECK(same(spec, diff(Expr(3.0) * x, v), Expr(3.0) * diff(x, v)));
    }
}

TEST_CASE("mixed partials commute") {
    const Alphabet a(2);
    ExprGen gen(a, 2);
    const SamplingSpec spec = with_accels(a);
    for (int i = 0; i < kTrials; ++i) {
        const Expr x = gen(3);
        CAPTURE(to_string(x));
        CHECK(same(spec, diff(diff(x, a.coord(0)), a.velocity(1)), diff(diff(x, a.velocity(1)), a.coord(0))));
    }
}

TEST_CASE("product rule holds for diff") {
    const Alphabet a(1);
    ExprGen gen(a, 3);
    const SamplingSpec spec = with_accels(a);
    for (int i = 0; i < kTrials; ++i) {
        const Expr x = gen(2);
        const Expr y = gen(2);
        const Symbol v = a.velocity(0);
        CHECK(same(spec, diff(x * y, v), diff(x, v) * y + x * diff(y, v)));
    }
}

TEST_CASE("on-flow total derivative has no accelerations and equals the substituted generic one") {
    const Alphabet a(2);
    ExprGen gen(a, 4);
    ExprGen accel_gen(a, 5);
    const SamplingSpec spec = with_accels(a);
    for (int i = 0; i < kTrials; ++i) {
        const Expr e = gen(3);
        const ExprVector lambda{accel_gen(2), accel_gen(2)};
        const Expr onflow = total_dt(e, a, lambda);
        CHECK_FALSE(contains_kind(onflow, SymbolKind::accel));
        Substitution s;
        for (int k = 0; k < 2; ++k) s.symbols.emplace_back(a.accel(k), lambda[k]);
        const Expr substituted = substitute(total_dt(e, a), s);
        if (!identical(simplify(substituted), simplify(onflow))) CHECK(same(spec, substituted, onflow));
    }
}

TEST_CASE("print then parse is the identity on random trees") {
    const Alphabet a(std::vector<std::string>{"x", "y"});
    ExprGen gen(a, 6, true);
    for (int i = 0; i < 200; ++i) {
        const Expr e = gen(4);
        const std::string text = to_string(e);
        CAPTURE(text);
        CHECK(identical(parse(text, a), e));
        const Expr s = simplify(e);
        CHECK(identical(simplify(parse(to_string(s), a)), s));
    }
}

TEST_CASE("simplify is idempotent and preserves values") {
    const Alphabet a(2);
    ExprGen gen(a, 7, true);
    const SamplingSpec spec = with_accels(a);
    for (int i = 0; i < 100; ++i) {
        const Expr e = gen(4);
        const Expr once = simplify(e);
        CAPTURE(to_string(e));
        CHECK(identical(simplify(once), once));
        CHECK(same(spec, once, e));
    }
}

TEST_CASE("random regular Lagrangians: symmetric Hessian, consistent normal form") {
    for (int n = 1; n <= 3; ++n) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const LagrangianSystem sys = build_system(testing_support::random_regular_lagrangian(n, 100 * n + seed));
            const SamplingSpec& spec = sys.domain();
            const auto& g = sys.hessian();
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) CHECK(same(spec, g[i][j], g[j][i]));
            ExprVector g_accel;
            for (int i = 0; i < n; ++i) {
                Expr row(0.0);
                for (int j = 0; j < n; ++j) row = row + g[i][j] * sys.accel()[j];
                g_accel.push_back(row);
            }
            CHECK(same(spec, g_accel, sys.force()));

            std::mt19937_64 rng(seed);
            for (int k = 0; k < 10; ++k) {
                SamplePoint p = draw_point(spec, rng);
                p.qddot = eval(sys.accel(), p);
                for (double r : el_residual(sys, p)) CHECK(std::abs(r) < 1e-9);
            }

            ExprGen gen(sys.alphabet(), seed);
            ExprVector w;
            for (int i = 0; i < n; ++i) w.push_back(gen(2));
            const LinearSolve s = invert_g_apply(sys, w);
            REQUIRE(s.spot_check);
            CHECK(s.spot_check->passed);
        }
    }
}

TEST_CASE("el_residual equals g (accel - qddot) off the flow") {
    const LagrangianSystem sys = build_system(testing_support::random_regular_lagrangian(3, 77));
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
        const SamplePoint p = draw_point(sys.domain(), rng);
        const auto a = el_residual(sys, p);
        const auto b = el_residual_via_hessian(sys, p);
        for (int i = 0; i < 3; ++i) CHECK(testing_support::rel_gap(a[i], b[i]) < 1e-10);
    }
}

TEST_CASE("strong solutions for random tau reproduce the integral") {
    std::uint64_t seed = 10;
    for (const CorpusEntry& e : corpus()) {
        ExprGen gen(e.system.alphabet(), ++seed);
        for (const FirstIntegral& n : e.integrals) {
            const Expr tau = gen(2);
            CAPTURE(e.name);
            CAPTURE(n.name);
            CAPTURE(to_string(tau));
            const Triple tr = solve_strong(e.system, n, tau);
            const auto r = verify_triple(e.system, tr, Form::strong, &n);
            CHECK(r.killing.passed);
            CHECK(r.integral->passed);
            CHECK(verify_triple(e.system, tr, Form::onflow).killing.passed);
        }
    }
}

TEST_CASE("strong solutions: xi - tau qdot and f - tau L do not depend on tau") {
    std::uint64_t seed = 20;
    for (const CorpusEntry& e : corpus()) {
        const Alphabet& a = e.system.alphabet();
        ExprGen gen(a, ++seed);
        const FirstIntegral& n = e.integrals.back();
        const Triple t1 = solve_strong(e.system, n, gen(2));
        const Triple t2 = solve_strong(e.system, n, gen(2));
        const SamplingSpec& spec = e.system.domain();
        CHECK(same(spec, subtract(t1.xi, scale(a.qdots(), t1.tau)), subtract(t2.xi, scale(a.qdots(), t2.tau))));
        const Expr& L = e.system.lagrangian();
        CHECK(same(spec, t1.f - t1.tau * L, t2.f - t2.tau * L));
    }
}

TEST_CASE("multiplicity keeps the integral for random h") {
    std::uint64_t seed = 30;
    for (const CorpusEntry& e : corpus()) {
        ExprGen gen(e.system.alphabet(), ++seed);
        for (const Triple& tr : e.triples) {
            const Expr h = gen(2);
            CAPTURE(e.name);
            CAPTURE(tr.name);
            CAPTURE(to_string(h));
            const Triple moved = multiplicity_transform(e.system, tr, h);
            CHECK(moved.form == tr.form);
            const auto r = verify_triple(e.system, moved, moved.form, &e.integral_for(tr.name));
            CHECK(r.killing.passed);
            CHECK(r.integral->passed);
        }
    }
}

TEST_CASE("conversion preserves the Noether integral of arbitrary triples") {
    for (int n = 1; n <= 3; ++n) {
        const LagrangianSystem sys = build_system(testing_support::random_regular_lagrangian(n, 500 + n));
        const Alphabet& a = sys.alphabet();
        ExprGen gen(a, 40 + n);
        for (int i = 0; i < 60; ++i) {
            Triple tr;
            tr.tau = gen(2);
            for (int k = 0; k < n; ++k) tr.xi.push_back(gen(2));
            tr.f = gen(2);
            tr.form = Form::onflow;
            const Triple alt = convert_standard_alternative(tr, a, Direction::to_alternative);
            CHECK(alt.form == Form::alt_onflow);
            CHECK(same(sys.domain(), noether_expr(sys, tr, Convention::standard),
                       noether_expr(sys, alt, Convention::alternative)));
            // Each Killing equation holds for one iff it holds for the other:
            // the two left sides agree identically.
            CHECK(same(sys.domain(), killing_lhs(sys, tr, Form::strong), killing_lhs(sys, alt, Form::alt_strong)));
            const Triple back = convert_standard_alternative(alt, a, Direction::to_standard);
            const Triple std_of = convert_standard_alternative(tr, a, Direction::to_standard);
            const Triple again = convert_standard_alternative(std_of, a, Direction::to_alternative);
            for (int k = 0; k < n; ++k) {
                CAPTURE(to_string(tr.tau));
                CAPTURE(to_string(tr.xi[k]));
                CHECK(identical(back.xi[k], tr.xi[k]));
                CHECK(identical(again.xi[k], tr.xi[k]));
            }
        }
    }
}

TEST_CASE("velocity-independent strong solutions have velocity-independent f and an affine left side") {
    for (const CorpusEntry& e : corpus()) {
        const Alphabet& a = e.system.alphabet();
        for (const Triple& tr : e.triples) {
            bool velocity_free = !contains_kind(tr.tau, SymbolKind::velocity);
            for (const Expr& x : tr.xi) velocity_free = velocity_free && !contains_kind(x, SymbolKind::velocity);
            if (!velocity_free || !verify_triple(e.system, tr, Form::strong).killing.passed) continue;
            CAPTURE(tr.name);
            const SamplingSpec spec = e.system.domain().excluding(tr.singular);
            for (int i = 0; i < a.dim(); ++i) CHECK(same(spec, diff(tr.f, a.velocity(i)), Expr(0.0)));
            const Expr lhs = killing_lhs(e.system, tr, Form::strong);
            for (int i = 0; i < a.dim(); ++i)
                for (int j = 0; j < a.dim(); ++j)
                    CHECK(same(spec, diff(diff(lhs, a.velocity(i)), a.velocity(j)), Expr(0.0)));
        }
    }
}

TEST_CASE("on-flow solvers reproduce the integral for random R and shifts") {
    std::uint64_t seed = 50;
    for (const CorpusEntry& e : corpus()) {
        const Alphabet& a = e.system.alphabet();
        ExprGen gen(a, ++seed);
        for (const FirstIntegral& n : e.integrals) {
            ExprVector R;
            for (int k = 0; k < a.dim(); ++k) R.push_back(gen(2));
            const double c = static_cast<double>(gen.pick(3));
            CAPTURE(e.name);
            CAPTURE(n.name);
            CAPTURE(c);
            for (const Triple& tr : {solve_onflow_with_R(e.system, n, R, c), solve_onflow_simplest(e.system, n, c)}) {
                const auto r = verify_triple(e.system, tr, Form::onflow, &n);
                CHECK(r.killing.passed);
                CHECK(r.integral->passed);
            }
        }
    }
}
