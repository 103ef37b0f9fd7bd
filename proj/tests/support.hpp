#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "noether/calculus.hpp"
#include "noether/expr.hpp"
#include "noether/mechanics.hpp"
#include "noether/parse.hpp"
#include "noether/sampling.hpp"

namespace testing_support {

using namespace noether;

/// Random expression trees over t, q, qdot (and optionally qddot) whose
/// evaluation is defined everywhere: divisions and square roots only see
/// strictly positive arguments.
class ExprGen {
public:
    ExprGen(Alphabet alphabet, std::uint64_t seed, bool with_accel = false)
        : a_(std::move(alphabet)), rng_(seed), with_accel_(with_accel) {}

    Expr leaf() {
        const int n = a_.dim();
        switch (pick(with_accel_ ? 5 : 4)) {
            case 0: return a_.t();
            case 1: return a_.q(pick(n));
            case 2: return a_.qdot(pick(n));
            case 3: return Expr(static_cast<double>(pick(7) - 3) / 2.0);
            default: return a_.qddot(pick(n));
        }
    }

    Expr operator()(int depth) {
        if (depth <= 0 || pick(4) == 0) return leaf();
        const Expr x = (*this)(depth - 1);
        switch (pick(9)) {
            case 0:
            case 1: return x + (*this)(depth - 1);
            case 2: return x - (*this)(depth - 1);
            case 3:
            case 4: return x * (*this)(depth - 1);
            case 5: return x / (Expr(1.0) + pow((*this)(depth - 1), Expr(2.0)));
            case 6: return pow(x, Expr(static_cast<double>(2 + pick(2))));
            case 7: return pick(2) == 0 ? sin(x) : cos(x);
            default: return sqrt(Expr(1.0) + x * x);
        }
    }

    int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }

private:
    Alphabet a_;
    std::mt19937_64 rng_;
    bool with_accel_;
};

/// L = sum_i (1 + q_i^2 / 4 + ...) qdot_i^2 / 2 + (small velocity coupling) - V(t, q):
/// kinetic matrix diagonal with entries >= 1/2, so the system is regular.
inline SystemDefinition random_regular_lagrangian(int n, std::uint64_t seed) {
    Alphabet a(n);
    std::mt19937_64 rng(seed);
    ExprGen gen(a, seed ^ 0x5bd1e995u);
    auto coef = [&] { return static_cast<double>(rng() % 5) / 4.0; };
    Expr L(0.0);
    for (int i = 0; i < n; ++i) {
        const Expr m = Expr(1.0) + Expr(coef()) * a.q((i + 1) % n) * a.q((i + 1) % n) / Expr(4.0);
        L = L + m * a.qdot(i) * a.qdot(i) / Expr(2.0);
        L = L + Expr(coef()) * sin(a.q(i)) * a.qdot(i);
    }
    Expr V(0.0);
    for (int i = 0; i < n; ++i) V = V + a.q(i) * a.q(i) / Expr(2.0);
    V = V + Expr(coef()) * a.t() * a.q(0) + Expr(coef()) * cos(a.q(n - 1));
    SystemDefinition def;
    def.name = "random" + std::to_string(seed);
    def.alphabet = a;
    def.lagrangian = L - V;
    return def;
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace testing_support
