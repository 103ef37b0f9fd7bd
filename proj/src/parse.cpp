#include "noether/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <stdexcept>

#include "noether/errors.hpp"

namespace noether {

namespace {

const std::set<std::string, std::less<>>& builtin_names() {
    static const std::set<std::string, std::less<>> names{"t", "sqrt", "sin", "cos", "exp", "log"};
    return names;
}

std::optional<int> generic_index(std::string_view name, std::string_view prefix, int dim) {
    if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return std::nullopt;
    const std::string_view digits = name.substr(prefix.size());
    int value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.front() == '0') return std::nullopt;
    if (value < 1 || value > dim) return std::nullopt;
    return value - 1;
}

}  // namespace

Alphabet::Alphabet(int dim, std::vector<std::string> params, std::vector<FunctionDecl> functions)
    : default_names_(true), params_(std::move(params)), functions_(std::move(functions)) {
    if (dim < 1) throw std::invalid_argument("Alphabet: dimension must be at least 1");
    for (int i = 1; i <= dim; ++i) coords_.push_back("q" + std::to_string(i));
    validate();
}

Alphabet::Alphabet(std::vector<std::string> coords, std::vector<std::string> params,
                   std::vector<FunctionDecl> functions)
    : coords_(std::move(coords)), params_(std::move(params)), functions_(std::move(functions)) {
    if (coords_.empty()) throw std::invalid_argument("Alphabet: at least one coordinate required");
    bool generic = true;
    for (std::size_t i = 0; i < coords_.size(); ++i)
        generic = generic && coords_[i] == "q" + std::to_string(i + 1);
    default_names_ = generic;
    validate();
}

Alphabet Alphabet::for_binding(std::vector<std::string> formals, std::vector<std::string> params) {
    Alphabet a;
    a.formals_ = std::move(formals);
    a.params_ = std::move(params);
    a.validate();
    return a;
}

void Alphabet::validate() const {
    std::set<std::string, std::less<>> seen;
    auto claim = [&](const std::string& name) {
        if (name.empty()) throw std::invalid_argument("Alphabet: empty name");
        if (!(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_'))
            throw std::invalid_argument("Alphabet: invalid name '" + name + "'");
        if (builtin_names().count(name)) throw std::invalid_argument("Alphabet: reserved name '" + name + "'");
        if (!seen.insert(name).second) throw std::invalid_argument("Alphabet: duplicate name '" + name + "'");
    };
    for (int i = 0; i < dim(); ++i) {
        claim(coords_[static_cast<std::size_t>(i)]);
        claim(velocity(i).name);
        claim(accel(i).name);
    }
    for (const auto& p : params_) claim(p);
    for (const auto& f : functions_) {
        claim(f.name);
        if (f.arity < 1) throw std::invalid_argument("Alphabet: function arity must be positive");
    }
    for (const auto& f : formals_) claim(f);
}

Symbol Alphabet::time() const { return Symbol{SymbolKind::time, 0, "t"}; }

Symbol Alphabet::coord(int i) const {
    return Symbol{SymbolKind::coord, i, coords_.at(static_cast<std::size_t>(i))};
}

Symbol Alphabet::velocity(int i) const {
    const auto& c = coords_.at(static_cast<std::size_t>(i));
    return Symbol{SymbolKind::velocity, i, default_names_ ? "qdot" + std::to_string(i + 1) : c + "dot"};
}

Symbol Alphabet::accel(int i) const {
    const auto& c = coords_.at(static_cast<std::size_t>(i));
    return Symbol{SymbolKind::accel, i, default_names_ ? "qddot" + std::to_string(i + 1) : c + "ddot"};
}

Symbol Alphabet::param(std::string_view name) const {
    if (!has_param(name)) throw std::invalid_argument("Alphabet: unknown parameter '" + std::string(name) + "'");
    return Symbol{SymbolKind::param, 0, std::string(name)};
}

Symbol Alphabet::formal(int i) const {
    return Symbol{SymbolKind::formal, i, formals_.at(static_cast<std::size_t>(i))};
}

ExprVector Alphabet::qs() const {
    ExprVector v;
    for (int i = 0; i < dim(); ++i) v.push_back(q(i));
    return v;
}

ExprVector Alphabet::qdots() const {
    ExprVector v;
    for (int i = 0; i < dim(); ++i) v.push_back(qdot(i));
    return v;
}

ExprVector Alphabet::qddots() const {
    ExprVector v;
    for (int i = 0; i < dim(); ++i) v.push_back(qddot(i));
    return v;
}

bool Alphabet::has_param(std::string_view name) const {
    return std::find(params_.begin(), params_.end(), name) != params_.end();
}

const FunctionDecl* Alphabet::function(std::string_view name) const {
    for (const auto& f : functions_)
        if (f.name == name) return &f;
    return nullptr;
}

Alphabet Alphabet::with_function(FunctionDecl decl) const {
    Alphabet a = *this;
    a.functions_.push_back(std::move(decl));
    a.validate();
    return a;
}

std::optional<Symbol> Alphabet::lookup(std::string_view name) const {
    if (name == "t" && !formals_.empty()) return std::nullopt;
    if (name == "t") return time();
    for (int i = 0; i < dim(); ++i) {
        if (coords_[static_cast<std::size_t>(i)] == name) return coord(i);
        if (velocity(i).name == name) return velocity(i);
        if (accel(i).name == name) return accel(i);
    }
    if (auto i = generic_index(name, "qddot", dim())) return accel(*i);
    if (auto i = generic_index(name, "qdot", dim())) return velocity(*i);
    if (auto i = generic_index(name, "q", dim())) return coord(*i);
    if (has_param(name)) return param(name);
    for (std::size_t i = 0; i < formals_.size(); ++i)
        if (formals_[i] == name) return formal(static_cast<int>(i));
    return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(std::string_view text, const Alphabet& alphabet) : text_(text), alphabet_(alphabet) {}

    Expr run() {
        skip_ws();
        if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) throw ParseError(std::string("expected '") + c + "' but reached end", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    Expr expr() {
        std::vector<Expr> terms{term()};
        for (;;) {
            if (accept('+'))
                terms.push_back(term());
            else if (accept('-'))
                terms.push_back(-term());
            else
                break;
        }
        return sum(std::move(terms));
    }

    Expr term() {
        Expr acc = unary();
        for (;;) {
            if (accept('*'))
                acc = acc * unary();
            else if (accept('/'))
                acc = acc / unary();
            else
                break;
        }
        return acc;
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power_level();
    }

    Expr power_level() {
        Expr base = primary();
        if (accept('^')) return power(base, unary());
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return named();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) throw ParseError("malformed number", start);
        return Expr(v);
    }

    std::string identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::vector<Expr> arguments() {
        std::vector<Expr> args;
        expect('(');
        if (accept(')')) return args;
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        expect(')');
        return args;
    }

    Expr named() {
        const std::size_t start = pos_;
        const std::string name = identifier();

        static const std::pair<const char*, Fn> builtins[] = {
            {"sqrt", Fn::sqrt}, {"sin", Fn::sin}, {"cos", Fn::cos}, {"exp", Fn::exp}, {"log", Fn::log}};
        for (const auto& [n, fn] : builtins) {
            if (name == n) {
                auto args = arguments();
                if (args.size() != 1) throw ParseError(name + " takes exactly one argument", start);
                return apply_fn(fn, args.front());
            }
        }

        if (const FunctionDecl* decl = alphabet_.function(name)) {
            std::vector<int> orders(static_cast<std::size_t>(decl->arity), 0);
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '\'') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '[') {
                    pos_ += 2;
                    orders = multi_index();
                    if (orders.size() != static_cast<std::size_t>(decl->arity))
                        throw ParseError("derivative multi-index of " + name + " must have " +
                                             std::to_string(decl->arity) + " entries",
                                         pos_);
                } else {
                    int primes = 0;
                    while (pos_ < text_.size() && text_[pos_] == '\'') {
                        ++primes;
                        ++pos_;
                    }
                    if (decl->arity != 1)
                        throw ParseError("prime notation needs a one-argument function; use " + name + "'[...]",
                                         start);
                    orders[0] = primes;
                }
            }
            auto args = arguments();
            if (args.size() != static_cast<std::size_t>(decl->arity))
                throw ParseError(name + " expects " + std::to_string(decl->arity) + " argument(s)", start);
            for (std::size_t i = 0; i < orders.size(); ++i)
                if (orders[i] < 0 && (decl->arity != 1 || orders[i] != -1))
                    throw ParseError("only one-argument functions admit the antiderivative order -1", start);
            return apply(name, std::move(orders), std::move(args));
        }

        if (auto sym = alphabet_.lookup(name)) return Expr(*sym);
        throw UndeclaredSymbolError(name, start);
    }

    std::vector<int> multi_index() {
        std::vector<int> out;
        for (;;) {
            skip_ws();
            const std::size_t start = pos_;
            bool neg = false;
            if (pos_ < text_.size() && text_[pos_] == '-') {
                neg = true;
                ++pos_;
            }
            int v = 0;
            auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
            if (ec != std::errc()) throw ParseError("expected integer derivative order", start);
            pos_ = static_cast<std::size_t>(ptr - text_.data());
            out.push_back(neg ? -v : v);
            if (accept(']')) return out;
            expect(',');
        }
    }

    std::string_view text_;
    const Alphabet& alphabet_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const Alphabet& alphabet) { return Parser(text, alphabet).run(); }

std::vector<std::string> split_top_level(std::string_view text, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (c == sep && depth == 0) {
            parts.emplace_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    parts.emplace_back(text.substr(start));
    for (auto& p : parts) {
        const auto b = p.find_first_not_of(" \t");
        const auto e = p.find_last_not_of(" \t");
        p = b == std::string::npos ? std::string() : p.substr(b, e - b + 1);
    }
    return parts;
}

}  // namespace noether
