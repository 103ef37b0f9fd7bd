#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "noether/killing.hpp"
#include "noether/mechanics.hpp"

namespace noether {

struct InitialState {
    double t0 = 0.0;
    std::vector<double> q;
    std::vector<double> qdot;
};

/// Fixed-step RK4 solution on the grid t0 + i dt.
struct Trajectory {
    std::string system;
    std::string method = "rk4";
    double t0 = 0.0;
    double t1 = 0.0;
    double dt = 0.0;
    std::vector<double> t;
    std::vector<std::vector<double>> q;
    std::vector<std::vector<double>> qdot;
    /// Set when the state entered the exclusion zone of a singular expression
    /// or the equations of motion could not be evaluated; the last node is the
    /// last admissible state.
    bool truncated = false;
    std::string truncation_reason;
    /// Largest relative gap between the symbolic and numeric accelerations at t0.
    double accel_cross_check = 0.0;

    std::size_t size() const { return t.size(); }
    /// Node i as a sample point carrying the system's parameters and functions.
    SamplePoint point(const LagrangianSystem& sys, std::size_t i) const;
};

/// Number of grid nodes of [t0, t1] with step dt: floor((t1 - t0)/dt) + 1,
/// counting a final node that lands on t1 up to rounding.
std::size_t node_count(double t0, double t1, double dt);

/// Integrates qddot = accel(t, q, qdot) with classical RK4, solving
/// g accel = force numerically at each stage. Stops early (truncated) when a
/// declared singular expression drops below `exclusion` in magnitude.
Trajectory integrate(const LagrangianSystem& sys, const InitialState& initial, double t1, double dt = 1e-3,
                     double exclusion = 1e-3);

struct DriftReport {
    std::string integral;
    double initial = 0.0;
    double max_abs_drift = 0.0;
    /// max_abs_drift / |initial|, or max_abs_drift itself when initial == 0.
    double max_rel_drift = 0.0;
    double worst_time = 0.0;
    std::size_t nodes = 0;
    bool truncated = false;
};

DriftReport monitor_drift(const LagrangianSystem& sys, const Trajectory& traj, const FirstIntegral& integral);

/// Numeric rank of d(N1..Nm)/d(q, qdot) at one point (singular values above
/// 1e-8 times the largest).
int jacobian_rank(const LagrangianSystem& sys, const std::vector<FirstIntegral>& integrals, const SamplePoint& p);

struct RankReport {
    /// Most frequent rank over the sampled points.
    int rank = 0;
    std::vector<int> per_point;
    /// Number of points whose rank equals `rank`.
    int agreeing = 0;
};

RankReport functional_independence_rank(const LagrangianSystem& sys, const std::vector<FirstIntegral>& integrals,
                                        int points = 10, std::uint64_t seed = kDefaultSeed);

/// CSV with header t,q1..qn,qdot1..qdotn.
void write_csv(std::ostream& out, const Trajectory& traj, int dim);

}  // namespace noether
