#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noether/expr.hpp"

namespace noether {

struct FunctionDecl {
    std::string name;
    int arity = 1;
};

/// The set of names an expression may use: time `t`, n coordinates with their
/// velocity (`<name>dot`, also `qdot<i>`) and acceleration (`<name>ddot`,
/// also `qddot<i>`) companions, parameters, opaque functions, and formal
/// arguments of function bindings.
class Alphabet {
public:
    Alphabet() = default;
    /// Coordinates q1..qn.
    explicit Alphabet(int dim, std::vector<std::string> params = {}, std::vector<FunctionDecl> functions = {});
    Alphabet(std::vector<std::string> coords, std::vector<std::string> params = {},
             std::vector<FunctionDecl> functions = {});

    /// Alphabet for the body of a function binding: formals plus parameters.
    static Alphabet for_binding(std::vector<std::string> formals, std::vector<std::string> params = {});

    int dim() const { return static_cast<int>(coords_.size()); }
    const std::vector<std::string>& coord_names() const { return coords_; }
    const std::vector<std::string>& param_names() const { return params_; }
    const std::vector<FunctionDecl>& functions() const { return functions_; }
    const std::vector<std::string>& formal_names() const { return formals_; }

    Symbol time() const;
    Symbol coord(int i) const;
    Symbol velocity(int i) const;
    Symbol accel(int i) const;
    Symbol param(std::string_view name) const;
    Symbol formal(int i) const;

    Expr t() const { return Expr(time()); }
    Expr q(int i) const { return Expr(coord(i)); }
    Expr qdot(int i) const { return Expr(velocity(i)); }
    Expr qddot(int i) const { return Expr(accel(i)); }
    Expr p(std::string_view name) const { return Expr(param(name)); }
    ExprVector qs() const;
    ExprVector qdots() const;
    ExprVector qddots() const;

    std::optional<Symbol> lookup(std::string_view name) const;
    const FunctionDecl* function(std::string_view name) const;
    bool has_param(std::string_view name) const;

    /// Copy with an extra opaque function declared.
    Alphabet with_function(FunctionDecl decl) const;

private:
    void validate() const;
    bool default_names_ = false;
    std::vector<std::string> coords_;
    std::vector<std::string> params_;
    std::vector<FunctionDecl> functions_;
    std::vector<std::string> formals_;
};

/// Parses DSL text:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | name | name '(' expr ')' | fname primes? '(' args ')' | '(' expr ')'
///   primes  := "'"+ | "'[" int (',' int)* "]"
///
/// Throws ParseError (with position) or UndeclaredSymbolError.
Expr parse(std::string_view text, const Alphabet& alphabet);

/// Splits on commas that are not nested inside parentheses or brackets.
std::vector<std::string> split_top_level(std::string_view text, char sep = ',');

}  // namespace noether
