#include "noether/dynamics.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "noether/calculus.hpp"
#include "noether/errors.hpp"

namespace noether {

namespace {

struct State {
    std::vector<double> q, v;
};

State axpy(const State& s, double h, const State& d) {
    State out = s;
    for (std::size_t i = 0; i < s.q.size(); ++i) {
        out.q[i] += h * d.q[i];
        out.v[i] += h * d.v[i];
    }
    return out;
}

class Rhs {
public:
    Rhs(const LagrangianSystem& sys, double exclusion) : sys_(sys), exclusion_(exclusion), base_(sys.domain().base_point()) {}

    SamplePoint at(double t, const State& s) const {
        SamplePoint p = base_;
        p.t = t;
        p.q = s.q;
        p.qdot = s.v;
        return p;
    }

    // Name of the violated singular expression, or empty.
    std::string excluded(const SamplePoint& p) const {
        for (const Expr& e : sys_.domain().singular) {
            double v = 0.0;
            try {
                v = eval(e, p);
            } catch (const DomainError&) {
                return preview(e, 60) + " undefined";
            }
            if (!std::isfinite(v) || std::abs(v) < exclusion_) return "|" + preview(e, 60) + "| < exclusion";
        }
        return {};
    }

    std::vector<double> singular_values(const SamplePoint& p) const {
        std::vector<double> out;
        for (const Expr& e : sys_.domain().singular) out.push_back(eval(e, p));
        return out;
    }

    // Throws if a singular expression changed sign between two states, i.e.
    // the step jumped over its zero set.
    void check_crossing(const std::vector<double>& before, const std::vector<double>& after) const {
        for (std::size_t i = 0; i < before.size(); ++i)
            if ((before[i] < 0.0) != (after[i] < 0.0))
                throw DomainError("step crossed the zero set", preview(sys_.domain().singular[i], 60));
    }

    State operator()(double t, const State& s) const {
        const SamplePoint p = at(t, s);
        if (auto why = excluded(p); !why.empty()) throw DomainError("state entered exclusion zone", why);
        return {s.v, accel_numeric(sys_, p)};
    }

private:
    const LagrangianSystem& sys_;
    double exclusion_;
    SamplePoint base_;
};

}  // namespace

SamplePoint Trajectory::point(const LagrangianSystem& sys, std::size_t i) const {
    SamplePoint p = sys.domain().base_point();
    p.t = t.at(i);
    p.q = q.at(i);
    p.qdot = qdot.at(i);
    return p;
}

std::size_t node_count(double t0, double t1, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (t1 < t0) throw std::invalid_argument("t1 must not precede t0");
    return static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9)) + 1;
}

Trajectory integrate(const LagrangianSystem& sys, const InitialState& initial, double t1, double dt,
                     double exclusion) {
    const auto n = static_cast<std::size_t>(sys.dim());
    if (initial.q.size() != n || initial.qdot.size() != n)
        throw std::invalid_argument("initial state has the wrong dimension");
    const std::size_t nodes = node_count(initial.t0, t1, dt);

    Trajectory traj;
    traj.system = sys.name();
    traj.t0 = initial.t0;
    traj.t1 = t1;
    traj.dt = dt;
    const Rhs rhs(sys, exclusion);
    State s{initial.q, initial.qdot};
    // Compensated (Kahan) accumulation of the increments keeps roundoff from
    // masking the truncation error at small dt.
    State carry{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

    const SamplePoint p0 = rhs.at(initial.t0, s);
    if (auto why = rhs.excluded(p0); !why.empty())
        throw DomainError("initial state lies in the exclusion zone", why);
    if (!sys.accel().empty()) {
        const auto sym = eval(sys.accel(), p0);
        const auto num = accel_numeric(sys, p0);
        for (std::size_t i = 0; i < n; ++i) {
            const double gap = std::abs(sym[i] - num[i]) / (1.0 + std::max(std::abs(sym[i]), std::abs(num[i])));
            traj.accel_cross_check = std::max(traj.accel_cross_check, gap);
        }
        if (traj.accel_cross_check > 1e-9)
            throw Error("symbolic and numeric accelerations disagree at the initial state (gap " +
                        std::to_string(traj.accel_cross_check) + ")");
    }

    std::vector<double> signs = rhs.singular_values(p0);
    traj.t.reserve(nodes);
    traj.q.reserve(nodes);
    traj.qdot.reserve(nodes);
    traj.t.push_back(initial.t0);
    traj.q.push_back(s.q);
    traj.qdot.push_back(s.v);
    for (std::size_t i = 1; i < nodes; ++i) {
        const double t = initial.t0 + static_cast<double>(i - 1) * dt;
        try {
            const State k1 = rhs(t, s);
            const State k2 = rhs(t + dt / 2, axpy(s, dt / 2, k1));
            const State k3 = rhs(t + dt / 2, axpy(s, dt / 2, k2));
            const State k4 = rhs(t + dt, axpy(s, dt, k3));
            State next = s;
            State next_carry = carry;
            auto accumulate = [](double& x, double& c, double inc) {
                const double y = inc - c;
                const double sum = x + y;
                c = (sum - x) - y;
                x = sum;
            };
            for (std::size_t j = 0; j < n; ++j) {
                accumulate(next.q[j], next_carry.q[j], dt / 6 * (k1.q[j] + 2 * k2.q[j] + 2 * k3.q[j] + k4.q[j]));
                accumulate(next.v[j], next_carry.v[j], dt / 6 * (k1.v[j] + 2 * k2.v[j] + 2 * k3.v[j] + k4.v[j]));
            }
            const double tn = initial.t0 + static_cast<double>(i) * dt;
            const SamplePoint pn = rhs.at(tn, next);
            if (auto why = rhs.excluded(pn); !why.empty()) throw DomainError("state entered exclusion zone", why);
            const auto values = rhs.singular_values(pn);
            rhs.check_crossing(signs, values);
            signs = values;
            s = std::move(next);
            carry = std::move(next_carry);
            traj.t.push_back(tn);
        } catch (const Error& err) {
            traj.truncated = true;
            traj.truncation_reason = "stopped after t = " + std::to_string(traj.t.back()) + ": " + err.what();
            break;
        }
        traj.q.push_back(s.q);
        traj.qdot.push_back(s.v);
    }
    return traj;
}

DriftReport monitor_drift(const LagrangianSystem& sys, const Trajectory& traj, const FirstIntegral& integral) {
    if (traj.size() == 0) throw std::invalid_argument("empty trajectory");
    DriftReport r;
    r.integral = integral.name;
    r.nodes = traj.size();
    r.truncated = traj.truncated;
    r.initial = eval(integral.expr, traj.point(sys, 0));
    r.worst_time = traj.t0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double d = std::abs(eval(integral.expr, traj.point(sys, i)) - r.initial);
        if (d > r.max_abs_drift) {
            r.max_abs_drift = d;
            r.worst_time = traj.t[i];
        }
    }
    r.max_rel_drift = r.initial != 0.0 ? r.max_abs_drift / std::abs(r.initial) : r.max_abs_drift;
    return r;
}

namespace {

ExprMatrix jacobian(const LagrangianSystem& sys, const std::vector<FirstIntegral>& integrals) {
    const Alphabet& a = sys.alphabet();
    ExprMatrix jac;
    for (const auto& integral : integrals) {
        ExprVector row;
        for (int i = 0; i < sys.dim(); ++i) row.push_back(diff(integral.expr, a.coord(i)));
        for (int i = 0; i < sys.dim(); ++i) row.push_back(diff(integral.expr, a.velocity(i)));
        jac.push_back(std::move(row));
    }
    return jac;
}

int numeric_rank(const ExprMatrix& jac, const SamplePoint& p) {
    const auto rows = static_cast<Eigen::Index>(jac.size());
    const auto cols = static_cast<Eigen::Index>(jac.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = eval(jac[i][j], p);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-8 * sv(0)) ++rank;
    return rank;
}

}  // namespace

int jacobian_rank(const LagrangianSystem& sys, const std::vector<FirstIntegral>& integrals, const SamplePoint& p) {
    if (integrals.empty()) return 0;
    return numeric_rank(jacobian(sys, integrals), p);
}

RankReport functional_independence_rank(const LagrangianSystem& sys, const std::vector<FirstIntegral>& integrals,
                                        int points, std::uint64_t seed) {
    RankReport r;
    if (integrals.empty()) return r;
    const ExprMatrix jac = jacobian(sys, integrals);
    ExprVector singular;
    for (const auto& i : integrals) singular.insert(singular.end(), i.singular.begin(), i.singular.end());
    const SamplingSpec domain = sys.domain().excluding(singular);
    ExprVector entries;
    for (const auto& row : jac) entries.insert(entries.end(), row.begin(), row.end());
    std::map<int, int> votes;
    for (int k = 0; k < points; ++k) {
        std::mt19937_64 rng(derive_seed(seed, 3000 + static_cast<std::uint64_t>(k)));
        const SamplePoint p = draw_point(domain, rng, entries);
        const int rank = numeric_rank(jac, p);
        r.per_point.push_back(rank);
        ++votes[rank];
    }
    for (const auto& [rank, count] : votes) {
        if (count > r.agreeing || (count == r.agreeing && rank > r.rank)) {
            r.rank = rank;
            r.agreeing = count;
        }
    }
    return r;
}

void write_csv(std::ostream& out, const Trajectory& traj, int dim) {
    out << "t";
    for (int i = 1; i <= dim; ++i) out << ",q" << i;
    for (int i = 1; i <= dim; ++i) out << ",qdot" << i;
    out << '\n';
    char buf[32];
    auto put = [&](double v) {
        const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, end - buf);
    };
    for (std::size_t k = 0; k < traj.size(); ++k) {
        put(traj.t[k]);
        for (double v : traj.q[k]) {
            out << ',';
            put(v);
        }
        for (double v : traj.qdot[k]) {
            out << ',';
            put(v);
        }
        out << '\n';
    }
}

}  // namespace noether
