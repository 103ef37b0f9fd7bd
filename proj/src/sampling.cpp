#include "noether/sampling.hpp"

#include <cmath>
#include <sstream>

#include "noether/errors.hpp"

namespace noether {

SamplingSpec SamplingSpec::box(const Alphabet& alphabet, std::vector<std::pair<std::string, double>> params,
                               std::shared_ptr<const FunctionTable> functions) {
    SamplingSpec s;
    s.alphabet = alphabet;
    const auto n = static_cast<std::size_t>(alphabet.dim());
    s.q.assign(n, Range{});
    s.qdot.assign(n, Range{});
    s.qddot.assign(n, Range{});
    s.params = std::move(params);
    s.functions = std::move(functions);
    return s;
}

SamplingSpec SamplingSpec::excluding(const ExprVector& extra) const {
    SamplingSpec s = *this;
    s.singular.insert(s.singular.end(), extra.begin(), extra.end());
    return s;
}

bool SamplingSpec::set_range(std::string_view name, Range r) {
    if (name == "t") {
        t = r;
        return true;
    }
    auto sym = alphabet.lookup(name);
    if (!sym) return false;
    const auto i = static_cast<std::size_t>(sym->index);
    switch (sym->kind) {
        case SymbolKind::coord: q.at(i) = r; return true;
        case SymbolKind::velocity: qdot.at(i) = r; return true;
        case SymbolKind::accel: qddot.at(i) = r; return true;
        default: return false;
    }
}

SamplePoint SamplingSpec::base_point() const {
    SamplePoint p;
    const auto n = static_cast<std::size_t>(alphabet.dim());
    p.q.assign(n, 0.0);
    p.qdot.assign(n, 0.0);
    p.qddot.assign(n, 0.0);
    p.params = params;
    p.functions = functions;
    return p;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

double draw(const Range& r, std::mt19937_64& rng) { return r.lo + (r.hi - r.lo) * uniform01(rng); }

bool admissible(const SamplingSpec& spec, const SamplePoint& p, const ExprVector& must_evaluate) {
    try {
        for (const Expr& s : spec.singular) {
            const double v = eval(s, p);
            if (!std::isfinite(v) || std::abs(v) < spec.exclusion) return false;
        }
        for (const Expr& e : must_evaluate)
            if (!std::isfinite(eval(e, p))) return false;
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

}  // namespace

SamplePoint draw_point(const SamplingSpec& spec, std::mt19937_64& rng, const ExprVector& must_evaluate,
                       int* rejected) {
    SamplePoint p = spec.base_point();
    const auto n = static_cast<std::size_t>(spec.alphabet.dim());
    for (int attempt = 0; attempt < spec.max_draws; ++attempt) {
        p.t = draw(spec.t, rng);
        for (std::size_t i = 0; i < n; ++i) p.q[i] = draw(spec.q[i], rng);
        for (std::size_t i = 0; i < n; ++i) p.qdot[i] = draw(spec.qdot[i], rng);
        for (std::size_t i = 0; i < n; ++i) p.qddot[i] = draw(spec.qddot[i], rng);
        if (admissible(spec, p, must_evaluate)) return p;
        if (rejected) ++*rejected;
    }
    throw SamplingError("unable to sample: " + std::to_string(spec.max_draws) +
                        " consecutive draws fell in excluded or undefined regions");
}

std::string VerificationReport::summary() const {
    std::ostringstream os;
    os << check;
    if (!mode.empty()) os << " [" << mode << "]";
    os << ": " << verdict() << " (k=" << k << ", tol=" << tol << ", max_residual=" << max_residual << ")";
    if (!passed) {
        os << " witness {";
        for (std::size_t i = 0; i < worst_point.size(); ++i)
            os << (i ? ", " : "") << worst_point[i].first << "=" << worst_point[i].second;
        os << "} lhs=" << lhs_at_worst << " rhs=" << rhs_at_worst;
    }
    return os.str();
}

VerificationReport equal_numeric(const Expr& a, const Expr& b, const SamplingSpec& spec, const CheckOptions& opts,
                                 std::string check, std::string mode) {
    if (opts.k < 1) throw std::invalid_argument("equal_numeric: k must be at least 1");
    VerificationReport r;
    r.check = std::move(check);
    r.mode = std::move(mode);
    r.k = opts.k;
    r.tol = opts.tol;
    r.seed = opts.seed;
    r.passed = true;
    const ExprVector both{a, b};
    double worst = -1.0;
    for (int i = 0; i < opts.k; ++i) {
        std::mt19937_64 rng(derive_seed(opts.seed, static_cast<std::uint64_t>(i)));
        const SamplePoint p = draw_point(spec, rng, both, &r.rejected_draws);
        const double va = eval(a, p);
        const double vb = eval(b, p);
        const double diff = std::abs(va - vb);
        const double scaled = diff / (1.0 + std::max(std::abs(va), std::abs(vb)));
        if (scaled > opts.tol) r.passed = false;
        r.max_abs_residual = std::max(r.max_abs_residual, diff);
        if (scaled > worst) {
            worst = scaled;
            r.max_residual = scaled;
            r.worst_point = p.describe(spec.alphabet);
            r.lhs_at_worst = va;
            r.rhs_at_worst = vb;
        }
    }
    return r;
}

VerificationReport combine(const std::vector<VerificationReport>& reports, std::string check, std::string mode) {
    if (reports.empty()) throw std::invalid_argument("combine: no reports");
    const VerificationReport* worst = &reports.front();
    bool passed = true;
    int rejected = 0;
    double max_abs = 0.0;
    for (const auto& r : reports) {
        passed = passed && r.passed;
        rejected += r.rejected_draws;
        max_abs = std::max(max_abs, r.max_abs_residual);
        // a failing report always outranks a passing one
        if ((!r.passed && worst->passed) || (r.passed == worst->passed && r.max_residual > worst->max_residual))
            worst = &r;
    }
    VerificationReport out = *worst;
    out.check = std::move(check);
    out.mode = std::move(mode);
    out.passed = passed;
    out.rejected_draws = rejected;
    out.max_abs_residual = max_abs;
    return out;
}

VerificationReport equal_numeric(const ExprVector& a, const ExprVector& b, const SamplingSpec& spec,
                                 const CheckOptions& opts, std::string check, std::string mode) {
    if (a.size() != b.size()) throw std::invalid_argument("equal_numeric: vector length mismatch");
    std::vector<VerificationReport> parts;
    for (std::size_t i = 0; i < a.size(); ++i) parts.push_back(equal_numeric(a[i], b[i], spec, opts, check, mode));
    return combine(parts, std::move(check), std::move(mode));
}

}  // namespace noether
