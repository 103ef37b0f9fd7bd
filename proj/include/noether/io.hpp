#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noether/dynamics.hpp"
#include "noether/killing.hpp"
#include "noether/mechanics.hpp"

namespace noether {

struct IniEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

struct IniSection {
    std::string name;
    std::size_t line = 0;
    std::vector<IniEntry> entries;

    const IniEntry* find(std::string_view key) const;
};

/// Minimal INI reader: `[section]` headers, `key = value` lines, `#` or `;`
/// comment lines. Sections may repeat. Throws ParseError with line numbers.
std::vector<IniSection> parse_ini(std::string_view text);

/// Contents of a system definition file.
///
///   [system]    name, coords (or dim), lagrangian, singular, range.<var> = lo, hi
///   [params]    <name> = <value>
///   [function]  name, args, body, antiderivative   (repeatable)
///   [integral]  name, expr, singular               (repeatable)
///
/// A function whose args are t followed by the coordinates and velocities is
/// a state function; its body uses the system's names.
struct SystemFile {
    SystemDefinition definition;
    std::vector<FirstIntegral> integrals;
};

SystemFile parse_system_file(std::string_view text);
std::string format_system_file(const SystemDefinition& def, const std::vector<FirstIntegral>& integrals);

/// `[triple]` section with name, tau, xi (comma list), f, form, singular.
Triple parse_triple_file(std::string_view text, const Alphabet& alphabet);
std::string format_triple_file(const Triple& tr);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form.
std::string format_double(double v);

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const DriftReport& r);

}  // namespace noether
