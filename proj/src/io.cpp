#include "noether/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "noether/calculus.hpp"
#include "noether/corpus.hpp"
#include "noether/errors.hpp"
#include "noether/parse.hpp"

namespace noether {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    for (const auto& part : split_top_level(text)) out.emplace_back(trim(part));
    return out;
}

double parse_number(std::string_view text, std::size_t line) {
    const auto t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw ParseError("expected a number, got '" + std::string(t) + "'", 0, line);
    return v;
}

Expr parse_at(const IniEntry& entry, std::string_view text, const Alphabet& alphabet) {
    try {
        return parse(text, alphabet);
    } catch (const ParseError& e) {
        throw ParseError("'" + entry.key + "': " + e.message(), e.position(), entry.line);
    }
}

Expr parse_entry(const IniEntry& entry, const Alphabet& alphabet) { return parse_at(entry, entry.value, alphabet); }

ExprVector parse_entry_list(const IniEntry& entry, const Alphabet& alphabet) {
    ExprVector out;
    for (const auto& part : split_list(entry.value)) out.push_back(parse_at(entry, part, alphabet));
    return out;
}

const IniEntry& require(const IniSection& s, std::string_view key) {
    if (const IniEntry* e = s.find(key)) return *e;
    throw ParseError("section [" + s.name + "] is missing '" + std::string(key) + "'", 0, s.line);
}

void check_keys(const IniSection& s, std::initializer_list<std::string_view> allowed, bool allow_ranges = false) {
    for (const auto& e : s.entries) {
        bool ok = allow_ranges && e.key.rfind("range.", 0) == 0;
        for (auto k : allowed) ok = ok || e.key == k;
        if (!ok) throw ParseError("unknown key '" + e.key + "' in [" + s.name + "]", 0, e.line);
    }
}

std::vector<std::string> state_names(const Alphabet& a) {
    std::vector<std::string> names{"t"};
    for (int i = 0; i < a.dim(); ++i) names.push_back(a.coord(i).name);
    for (int i = 0; i < a.dim(); ++i) names.push_back(a.velocity(i).name);
    return names;
}

// Formal names used by bind_state_function for this alphabet.
std::vector<std::string> state_formals(const Alphabet& a) {
    std::vector<std::string> names;
    for (const auto& n : state_names(a)) names.push_back("_" + n);
    return names;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string join_exprs(const ExprVector& v) {
    std::vector<std::string> parts;
    for (const Expr& e : v) parts.push_back(to_string(e));
    return join(parts);
}

}  // namespace

const IniEntry* IniSection::find(std::string_view key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

std::vector<IniSection> parse_ini(std::string_view text) {
    std::vector<IniSection> sections;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = text.find('\n', pos);
        const auto raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", 0, line_no);
            const auto name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw ParseError("empty section name", 1, line_no);
            sections.push_back({std::string(name), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", 0, line_no);
        if (sections.empty()) throw ParseError("entry outside of any section", 0, line_no);
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ParseError("empty key", 0, line_no);
        auto& section = sections.back();
        if (section.find(key)) throw ParseError("duplicate key '" + std::string(key) + "'", 0, line_no);
        section.entries.push_back({std::string(key), std::string(trim(line.substr(eq + 1))), line_no});
    }
    return sections;
}

SystemFile parse_system_file(std::string_view text) {
    const auto sections = parse_ini(text);
    const IniSection* system = nullptr;
    const IniSection* params = nullptr;
    std::vector<const IniSection*> functions, integrals;
    for (const auto& s : sections) {
        if (s.name == "system") {
            if (system) throw ParseError("duplicate [system] section", 0, s.line);
            system = &s;
        } else if (s.name == "params") {
            if (params) throw ParseError("duplicate [params] section", 0, s.line);
            params = &s;
        } else if (s.name == "function") {
            functions.push_back(&s);
        } else if (s.name == "integral") {
            integrals.push_back(&s);
        } else {
            throw ParseError("unknown section [" + s.name + "]", 0, s.line);
        }
    }
    if (!system) throw ParseError("missing [system] section", 0, 1);
    check_keys(*system, {"name", "coords", "dim", "lagrangian", "singular"}, true);

    // First pass: names only.
    std::vector<std::string> param_names;
    std::vector<std::pair<std::string, double>> param_values;
    if (params) {
        for (const auto& e : params->entries) {
            param_names.push_back(e.key);
            param_values.emplace_back(e.key, parse_number(e.value, e.line));
        }
    }
    std::vector<FunctionDecl> decls;
    std::vector<std::vector<std::string>> function_args;
    for (const auto* f : functions) {
        check_keys(*f, {"name", "args", "body", "antiderivative"});
        const auto args = split_list(require(*f, "args").value);
        if (args.empty()) throw ParseError("function needs at least one argument", 0, require(*f, "args").line);
        decls.push_back({std::string(trim(require(*f, "name").value)), static_cast<int>(args.size())});
        function_args.push_back(args);
    }

    Alphabet alphabet;
    try {
        if (const IniEntry* coords = system->find("coords")) {
            alphabet = Alphabet(split_list(coords->value), param_names, decls);
        } else {
            const IniEntry& dim = require(*system, "dim");
            alphabet = Alphabet(static_cast<int>(parse_number(dim.value, dim.line)), param_names, decls);
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0, system->line);
    }

    // Second pass: expressions.
    SystemFile out;
    SystemDefinition& def = out.definition;
    def.name = std::string(trim(require(*system, "name").value));
    def.alphabet = alphabet;
    def.params = param_values;
    def.lagrangian = parse_entry(require(*system, "lagrangian"), alphabet);
    if (const IniEntry* s = system->find("singular")) def.singular = parse_entry_list(*s, alphabet);
    for (const auto& e : system->entries) {
        if (e.key.rfind("range.", 0) != 0) continue;
        const auto bounds = split_list(e.value);
        if (bounds.size() != 2) throw ParseError("range needs 'lo, hi'", 0, e.line);
        const Range r{parse_number(bounds[0], e.line), parse_number(bounds[1], e.line)};
        if (!(r.lo < r.hi)) throw ParseError("range must satisfy lo < hi", 0, e.line);
        def.ranges.emplace_back(e.key.substr(6), r);
    }

    auto table = std::make_shared<FunctionTable>();
    for (std::size_t i = 0; i < functions.size(); ++i) {
        const IniSection& f = *functions[i];
        const IniEntry* body = f.find("body");
        if (!body) continue;
        const std::string& name = decls[i].name;
        if (function_args[i] == state_names(alphabet)) {
            if (f.find("antiderivative")) throw ParseError("state functions take no antiderivative", 0, f.line);
            (*table)[name] = bind_state_function(name, alphabet, parse_entry(*body, alphabet));
            continue;
        }
        Alphabet formal;
        try {
            formal = Alphabet::for_binding(function_args[i], param_names);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), 0, require(f, "args").line);
        }
        std::optional<Expr> anti;
        if (const IniEntry* a = f.find("antiderivative")) anti = parse_entry(*a, formal);
        try {
            (*table)[name] = std::make_shared<FunctionBinding>(name, function_args[i], parse_entry(*body, formal), anti);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), 0, f.line);
        }
    }
    def.functions = table;

    for (const auto* s : integrals) {
        check_keys(*s, {"name", "expr", "singular"});
        ExprVector singular;
        if (const IniEntry* e = s->find("singular")) singular = parse_entry_list(*e, alphabet);
        out.integrals.push_back(make_integral(std::string(trim(require(*s, "name").value)),
                                              parse_entry(require(*s, "expr"), alphabet), singular));
    }
    return out;
}

std::string format_system_file(const SystemDefinition& def, const std::vector<FirstIntegral>& integrals) {
    const Alphabet& a = def.alphabet;
    std::ostringstream os;
    os << "[system]\n";
    os << "name = " << def.name << "\n";
    os << "coords = " << join(a.coord_names()) << "\n";
    os << "lagrangian = " << to_string(def.lagrangian) << "\n";
    if (!def.singular.empty()) os << "singular = " << join_exprs(def.singular) << "\n";
    for (const auto& [name, r] : def.ranges)
        os << "range." << name << " = " << format_double(r.lo) << ", " << format_double(r.hi) << "\n";
    if (!def.params.empty()) {
        os << "\n[params]\n";
        for (const auto& [name, v] : def.params) os << name << " = " << format_double(v) << "\n";
    }
    for (const auto& decl : a.functions()) {
        os << "\n[function]\nname = " << decl.name << "\n";
        const auto it = def.functions ? def.functions->find(decl.name) : FunctionTable::const_iterator{};
        if (!def.functions || it == def.functions->end()) {
            std::vector<std::string> args;
            for (int i = 1; i <= decl.arity; ++i) args.push_back("u" + std::to_string(i));
            os << "args = " << join(args) << "\n";
            continue;
        }
        const FunctionBinding& b = *it->second;
        if (b.formals() == state_formals(a)) {
            Substitution back;
            std::vector<Symbol> targets{a.time()};
            for (int i = 0; i < a.dim(); ++i) targets.push_back(a.coord(i));
            for (int i = 0; i < a.dim(); ++i) targets.push_back(a.velocity(i));
            for (std::size_t k = 0; k < targets.size(); ++k)
                back.symbols.emplace_back(Symbol{SymbolKind::formal, static_cast<int>(k), b.formals()[k]},
                                          Expr(targets[k]));
            os << "args = " << join(state_names(a)) << "\n";
            os << "body = " << to_string(substitute(b.body(), back)) << "\n";
        } else {
            os << "args = " << join(b.formals()) << "\n";
            os << "body = " << to_string(b.body()) << "\n";
            if (b.antiderivative()) os << "antiderivative = " << to_string(*b.antiderivative()) << "\n";
        }
    }
    for (const auto& n : integrals) {
        os << "\n[integral]\nname = " << n.name << "\nexpr = " << to_string(n.expr) << "\n";
        if (!n.singular.empty()) os << "singular = " << join_exprs(n.singular) << "\n";
    }
    return os.str();
}

Triple parse_triple_file(std::string_view text, const Alphabet& alphabet) {
    const auto sections = parse_ini(text);
    if (sections.size() != 1 || sections.front().name != "triple")
        throw ParseError("expected exactly one [triple] section", 0, sections.empty() ? 1 : sections.front().line);
    const IniSection& s = sections.front();
    check_keys(s, {"name", "tau", "xi", "f", "form", "singular"});
    Triple tr;
    if (const IniEntry* n = s.find("name")) tr.name = n->value;
    tr.tau = parse_entry(require(s, "tau"), alphabet);
    tr.xi = parse_entry_list(require(s, "xi"), alphabet);
    if (static_cast<int>(tr.xi.size()) != alphabet.dim())
        throw ParseError("xi has " + std::to_string(tr.xi.size()) + " components, expected " +
                             std::to_string(alphabet.dim()),
                         0, require(s, "xi").line);
    tr.f = parse_entry(require(s, "f"), alphabet);
    if (const IniEntry* form = s.find("form")) {
        const auto parsed = parse_form(form->value);
        if (!parsed) throw ParseError("unknown form '" + form->value + "'", 0, form->line);
        tr.form = *parsed;
    }
    if (const IniEntry* sing = s.find("singular")) tr.singular = parse_entry_list(*sing, alphabet);
    for (const Expr* e : {&tr.tau, &tr.f})
        if (contains_kind(*e, SymbolKind::accel)) throw ParseError("triple may not depend on accelerations", 0, s.line);
    for (const Expr& e : tr.xi)
        if (contains_kind(e, SymbolKind::accel)) throw ParseError("triple may not depend on accelerations", 0, s.line);
    return tr;
}

std::string format_triple_file(const Triple& tr) {
    std::ostringstream os;
    os << "[triple]\n";
    if (!tr.name.empty()) os << "name = " << tr.name << "\n";
    os << "tau = " << to_string(tr.tau) << "\n";
    os << "xi = " << join_exprs(tr.xi) << "\n";
    os << "f = " << to_string(tr.f) << "\n";
    os << "form = " << form_name(tr.form) << "\n";
    if (!tr.singular.empty()) os << "singular = " << join_exprs(tr.singular) << "\n";
    return os.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    if (!out) throw Error("error while writing '" + path + "'");
}

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json worst = nlohmann::json::object();
    for (const auto& [name, v] : r.worst_point) worst[name] = v;
    return {
        {"check", r.check},
        {"mode", r.mode},
        {"k", r.k},
        {"tol", r.tol},
        {"max_residual", r.max_residual},
        {"max_abs_residual", r.max_abs_residual},
        {"worst_point", worst},
        {"lhs_at_worst", r.lhs_at_worst},
        {"rhs_at_worst", r.rhs_at_worst},
        {"rejected_draws", r.rejected_draws},
        {"verdict", r.verdict()},
        {"seed", r.seed},
    };
}

nlohmann::json to_json(const DriftReport& r) {
    return {
        {"integral", r.integral},       {"initial", r.initial},     {"max_abs_drift", r.max_abs_drift},
        {"max_rel_drift", r.max_rel_drift}, {"worst_time", r.worst_time}, {"nodes", r.nodes},
        {"truncated", r.truncated},
    };
}

}  // namespace noether
