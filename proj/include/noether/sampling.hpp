#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "noether/eval.hpp"
#include "noether/expr.hpp"
#include "noether/parse.hpp"

namespace noether {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct Range {
    double lo = -2.0;
    double hi = 2.0;
};

/// Where identity checks draw their points.
///
/// Defaults: coordinates, velocities and accelerations uniform in [-2, 2],
/// t in [0, 2]. A point is rejected when any singular expression has
/// magnitude below `exclusion`, or when it fails to evaluate.
struct SamplingSpec {
    Alphabet alphabet;
    Range t{0.0, 2.0};
    std::vector<Range> q, qdot, qddot;
    std::vector<std::pair<std::string, double>> params;
    ExprVector singular;
    double exclusion = 1e-3;
    int max_draws = 1000;
    std::shared_ptr<const FunctionTable> functions;

    static SamplingSpec box(const Alphabet& alphabet, std::vector<std::pair<std::string, double>> params = {},
                            std::shared_ptr<const FunctionTable> functions = nullptr);

    /// Copy with extra singular expressions appended.
    SamplingSpec excluding(const ExprVector& extra) const;
    /// Overrides the range of the variable called `name` (t, a coordinate,
    /// velocity or acceleration name). Returns false for unknown names.
    bool set_range(std::string_view name, Range r);
    /// Point with the parameters and functions set but no variables drawn.
    SamplePoint base_point() const;
};

/// Derives an independent stream seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from 53 random bits.
double uniform01(std::mt19937_64& rng);

/// Draws one admissible point. Each drawn candidate must keep every singular
/// expression at least `exclusion` away from zero and make every expression
/// in `must_evaluate` finite. Throws SamplingError after `max_draws` rejects.
SamplePoint draw_point(const SamplingSpec& spec, std::mt19937_64& rng, const ExprVector& must_evaluate = {},
                       int* rejected = nullptr);

struct CheckOptions {
    int k = 100;
    double tol = 1e-9;
    std::uint64_t seed = kDefaultSeed;
};

/// Outcome of a randomized identity check. `max_residual` is the largest
/// |a - b| / (1 + max(|a|, |b|)) seen; PASS iff it is <= tol at all k points.
struct VerificationReport {
    std::string check;
    std::string mode;
    int k = 0;
    double tol = 0.0;
    double max_residual = 0.0;
    double max_abs_residual = 0.0;
    std::vector<std::pair<std::string, double>> worst_point;
    double lhs_at_worst = 0.0;
    double rhs_at_worst = 0.0;
    int rejected_draws = 0;
    bool passed = false;
    std::uint64_t seed = 0;

    std::string verdict() const { return passed ? "PASS" : "FAIL"; }
    std::string summary() const;
};

/// Randomized identity test of a == b on the sampled domain.
///
/// PASS is probabilistic evidence of identity; FAIL comes with a concrete
/// witness point (`worst_point`) and is conclusive.
VerificationReport equal_numeric(const Expr& a, const Expr& b, const SamplingSpec& spec,
                                 const CheckOptions& opts = {}, std::string check = "equal",
                                 std::string mode = "");

/// Component-wise equal_numeric over two vectors, merged into one report that
/// keeps the worst component.
VerificationReport equal_numeric(const ExprVector& a, const ExprVector& b, const SamplingSpec& spec,
                                 const CheckOptions& opts = {}, std::string check = "equal",
                                 std::string mode = "");

/// Merges reports: PASS iff all pass; residual fields from the worst one.
VerificationReport combine(const std::vector<VerificationReport>& reports, std::string check, std::string mode = "");

}  // namespace noether
