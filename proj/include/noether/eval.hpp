#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "noether/expr.hpp"
#include "noether/parse.hpp"

namespace noether {

/// Concrete meaning of an opaque function symbol: `name(u1..uk) = body`.
///
/// Derivatives of any order are obtained by differentiating the body; the
/// antiderivative (order -1, one-argument functions only) must be supplied.
class FunctionBinding {
public:
    FunctionBinding(std::string name, std::vector<std::string> formals, Expr body,
                    std::optional<Expr> antiderivative = std::nullopt);

    const std::string& name() const { return name_; }
    int arity() const { return static_cast<int>(formals_.size()); }
    const std::vector<std::string>& formals() const { return formals_; }
    const Expr& body() const { return body_; }
    const std::optional<Expr>& antiderivative() const { return antiderivative_; }

    /// Body of the derivative with the given per-argument orders (cached).
    Expr derivative(const std::vector<int>& orders) const;

private:
    std::string name_;
    std::vector<std::string> formals_;
    Expr body_;
    std::optional<Expr> antiderivative_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<int>, Expr> cache_;
};

using FunctionTable = std::map<std::string, std::shared_ptr<const FunctionBinding>, std::less<>>;

/// Numeric values for every symbol kind, plus function bindings.
struct SamplePoint {
    double t = 0.0;
    std::vector<double> q, qdot, qddot;
    std::vector<std::pair<std::string, double>> params;
    std::vector<double> formals;
    std::shared_ptr<const FunctionTable> functions;

    double value_of(const Symbol& s) const;
    /// (name, value) pairs for reports, using the alphabet's display names.
    std::vector<std::pair<std::string, double>> describe(const Alphabet& alphabet) const;
};

/// IEEE double evaluation. Throws DomainError for division by zero, sqrt or
/// log outside their domain, non-integer powers of negative numbers, and for
/// unbound symbols or functions.
double eval(const Expr& e, const SamplePoint& p);

std::vector<double> eval(const ExprVector& v, const SamplePoint& p);

}  // namespace noether
