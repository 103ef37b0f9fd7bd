#include "noether/mechanics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <sstream>

#include "noether/calculus.hpp"
#include "noether/errors.hpp"

namespace noether {

namespace {

constexpr int kRegularityPoints = 20;
constexpr double kRegularityThreshold = 1e-8;
constexpr int kPivotVetPoints = 5;
constexpr double kPivotThreshold = 1e-12;

Eigen::MatrixXd eval_matrix(const ExprMatrix& m, const SamplePoint& p) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = eval(m[i][j], p);
    return out;
}

std::string describe_point(const SamplePoint& p, const Alphabet& a) {
    std::ostringstream os;
    const auto named = p.describe(a);
    for (std::size_t i = 0; i < named.size(); ++i) os << (i ? ", " : "") << named[i].first << "=" << named[i].second;
    return os.str();
}

Expr minor2(const ExprMatrix& m, int r0, int r1, int c0, int c1) {
    return m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
}

// A pivot candidate is usable when it evaluates clearly away from zero at
// every vetting point.
bool viable_pivot(const Expr& e, const std::vector<SamplePoint>& points) {
    if (e.is_zero()) return false;
    try {
        for (const auto& p : points) {
            const double v = eval(e, p);
            if (!std::isfinite(v) || std::abs(v) < kPivotThreshold) return false;
        }
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

std::vector<SamplePoint> vetting_points(const SamplingSpec& domain, std::uint64_t seed) {
    std::vector<SamplePoint> pts;
    for (int i = 0; i < kPivotVetPoints; ++i) {
        std::mt19937_64 rng(derive_seed(seed, 7000 + static_cast<std::uint64_t>(i)));
        pts.push_back(draw_point(domain, rng));
    }
    return pts;
}

ExprVector bareiss_solve(const ExprMatrix& m, const ExprVector& w, const SamplingSpec& domain, std::uint64_t seed) {
    const std::size_t n = m.size();
    ExprMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = m[i];
        a[i].push_back(w[i]);
    }
    const auto pts = vetting_points(domain, seed);
    Expr prev(1.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = n;
        for (std::size_t r = k; r < n && pivot == n; ++r)
            if (viable_pivot(a[r][k], pts)) pivot = r;
        if (pivot == n) return {};
        std::swap(a[k], a[pivot]);
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j <= n; ++j) a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            a[i][k] = Expr(0.0);
        }
        prev = a[k][k];
    }
    ExprVector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        Expr acc = a[ii][n];
        for (std::size_t j = ii + 1; j < n; ++j) acc = acc - a[ii][j] * x[j];
        x[ii] = acc / a[ii][ii];
    }
    return x;
}

}  // namespace

Expr determinant(const ExprMatrix& m) {
    switch (m.size()) {
        case 1: return m[0][0];
        case 2: return minor2(m, 0, 1, 0, 1);
        case 3:
            return m[0][0] * minor2(m, 1, 2, 1, 2) - m[0][1] * minor2(m, 1, 2, 0, 2) + m[0][2] * minor2(m, 1, 2, 0, 1);
        default: throw std::invalid_argument("determinant: only n <= 3 is supported");
    }
}

ExprMatrix adjugate(const ExprMatrix& m) {
    switch (m.size()) {
        case 1: return {{Expr(1.0)}};
        case 2: return {{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}};
        case 3: {
            ExprMatrix adj(3, ExprVector(3));
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    const int r0 = i == 0 ? 1 : 0, r1 = i == 2 ? 1 : 2;
                    const int c0 = j == 0 ? 1 : 0, c1 = j == 2 ? 1 : 2;
                    const Expr cof = minor2(m, r0, r1, c0, c1);
                    adj[j][i] = (i + j) % 2 == 0 ? cof : -cof;
                }
            }
            return adj;
        }
        default: throw std::invalid_argument("adjugate: only n <= 3 is supported");
    }
}

LinearSolve solve_linear(const ExprMatrix& m, const ExprVector& w, const SamplingSpec& domain, std::uint64_t seed) {
    const std::size_t n = m.size();
    if (w.size() != n) throw std::invalid_argument("solve_linear: size mismatch");
    LinearSolve out;
    if (n <= 3) {
        const Expr det = determinant(m);
        if (det.is_zero()) {
            out.numeric_fallback = true;
            return out;
        }
        const ExprMatrix adj = adjugate(m);
        for (std::size_t i = 0; i < n; ++i) {
            ExprVector terms;
            for (std::size_t j = 0; j < n; ++j) terms.push_back(adj[i][j] * w[j]);
            out.solution.push_back(sum(std::move(terms)) / det);
        }
    } else {
        out.solution = bareiss_solve(m, w, domain, seed);
        if (out.solution.empty()) {
            out.numeric_fallback = true;
            return out;
        }
    }
    ExprVector lhs;
    for (std::size_t i = 0; i < n; ++i) lhs.push_back(dot(m[i], out.solution));
    CheckOptions opts;
    opts.k = 20;
    opts.seed = seed;
    out.spot_check = equal_numeric(lhs, w, domain, opts, "g*v = w");
    return out;
}

LinearSolve invert_g_apply(const LagrangianSystem& sys, const ExprVector& w, std::uint64_t seed) {
    if (static_cast<int>(w.size()) != sys.dim()) throw std::invalid_argument("invert_g_apply: size mismatch");
    if (sys.dim() <= 3 && sys.symbolic_inverse_) {
        LinearSolve out;
        for (int i = 0; i < sys.dim(); ++i) out.solution.push_back(dot(sys.adjugate_[i], w) / sys.det_);
        ExprVector lhs;
        for (const auto& row : sys.hessian_) lhs.push_back(dot(row, out.solution));
        CheckOptions opts;
        opts.k = 20;
        opts.seed = seed;
        out.spot_check = equal_numeric(lhs, w, sys.domain_, opts, "g*v = w");
        return out;
    }
    return solve_linear(sys.hessian_, w, sys.domain_, seed);
}

std::vector<double> solve_numeric(const ExprMatrix& m, const ExprVector& w, const SamplePoint& p) {
    const Eigen::MatrixXd a = eval_matrix(m, p);
    Eigen::VectorXd b(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) b(static_cast<Eigen::Index>(i)) = eval(w[i], p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw GInversionError("matrix is singular at the evaluation point");
    const Eigen::VectorXd x = lu.solve(b);
    return {x.data(), x.data() + x.size()};
}

std::vector<double> accel_numeric(const LagrangianSystem& sys, const SamplePoint& p) {
    return solve_numeric(sys.hessian(), sys.force(), p);
}

LagrangianSystem build_system(SystemDefinition def, std::uint64_t seed) {
    const Alphabet& a = def.alphabet;
    const int n = a.dim();
    if (n < 1) throw std::invalid_argument("system must have at least one coordinate");
    if (contains_kind(def.lagrangian, SymbolKind::accel))
        throw std::invalid_argument("the Lagrangian may not depend on accelerations");
    if (!def.functions) def.functions = std::make_shared<FunctionTable>();

    LagrangianSystem sys;
    sys.domain_ = SamplingSpec::box(a, def.params, def.functions);
    sys.domain_.singular = def.singular;
    for (const auto& [name, r] : def.ranges)
        if (!sys.domain_.set_range(name, r)) throw std::invalid_argument("range for unknown variable '" + name + "'");

    const Expr& L = def.lagrangian;
    for (int i = 0; i < n; ++i) sys.momentum_.push_back(diff(L, a.velocity(i)));
    sys.hessian_.assign(static_cast<std::size_t>(n), ExprVector(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys.hessian_[i][j] = diff(sys.momentum_[i], a.velocity(j));

    for (int i = 0; i < n; ++i) {
        const Expr& p = sys.momentum_[i];
        ExprVector terms{diff(L, a.coord(i)), -diff(p, a.time())};
        for (int j = 0; j < n; ++j) terms.push_back(-(diff(p, a.coord(j)) * a.qdot(j)));
        sys.force_.push_back(sum(std::move(terms)));
        sys.euler_lagrange_.push_back(diff(L, a.coord(i)) - total_dt(p, a));
    }

    if (n <= 3) {
        sys.det_ = determinant(sys.hessian_);
        if (sys.det_.is_zero())
            throw RegularityError("the velocity Hessian of '" + def.name + "' is identically singular");
        sys.adjugate_ = adjugate(sys.hessian_);
        for (int i = 0; i < n; ++i) sys.accel_.push_back(dot(sys.adjugate_[i], sys.force_) / sys.det_);
    }
    sys.def_ = std::move(def);

    // Regularity is judged numerically so that it also covers n > 3.
    double min_det = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kRegularityPoints; ++k) {
        std::mt19937_64 rng(derive_seed(seed, 5000 + static_cast<std::uint64_t>(k)));
        const SamplePoint p = draw_point(sys.domain_, rng, sys.hessian_.front());
        double det = 0.0;
        try {
            det = eval_matrix(sys.hessian_, p).determinant();
        } catch (const DomainError&) {
            det = 0.0;
        }
        min_det = std::min(min_det, std::abs(det));
        if (!(std::abs(det) > kRegularityThreshold))
            throw RegularityError("det g = " + std::to_string(det) + " for '" + sys.def_.name + "' at " +
                                  describe_point(p, sys.def_.alphabet));
    }
    sys.regularity_ = {kRegularityPoints, min_det, true};

    if (n > 3) {
        const LinearSolve ls = solve_linear(sys.hessian_, sys.force_, sys.domain_, seed);
        sys.symbolic_inverse_ = !ls.numeric_fallback;
        sys.accel_ = ls.solution;
    }
    return sys;
}

LagrangianSystem LagrangianSystem::rebind(std::shared_ptr<const FunctionBinding> binding) const {
    LagrangianSystem out = *this;
    auto table = std::make_shared<FunctionTable>(*def_.functions);
    (*table)[binding->name()] = std::move(binding);
    out.def_.functions = table;
    out.domain_.functions = table;
    return out;
}

std::vector<double> el_residual(const LagrangianSystem& sys, const SamplePoint& p) {
    return eval(sys.euler_lagrange(), p);
}

std::vector<double> el_residual_via_hessian(const LagrangianSystem& sys, const SamplePoint& p) {
    const Eigen::MatrixXd g = eval_matrix(sys.hessian(), p);
    const std::vector<double> acc = sys.accel().empty() ? accel_numeric(sys, p) : eval(sys.accel(), p);
    Eigen::VectorXd d(g.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = acc[static_cast<std::size_t>(i)] - p.qddot[static_cast<std::size_t>(i)];
    const Eigen::VectorXd r = g * d;
    return {r.data(), r.data() + r.size()};
}

}  // namespace noether
