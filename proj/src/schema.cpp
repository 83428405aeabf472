#include "medford/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace medford {

// ---------------------------------------------------------------------------
// Types and constraints

std::string to_string(const ValueType& t) {
    switch (t.kind) {
        case FieldType::String: return "string";
        case FieldType::Number: return "number";
        case FieldType::Integer: return "integer";
        case FieldType::Email: return "email";
        case FieldType::URI: return "URI";
        case FieldType::Phone: return "phone";
        case FieldType::Date: return "date";
        case FieldType::FilePath: return "filepath";
        case FieldType::Ref: return "ref(" + t.ref_major + ")";
    }
    return "?";
}

std::string_view to_string(Presence p) {
    switch (p) {
        case Presence::Required: return "Required";
        case Presence::Desirable: return "Desirable";
        case Presence::Optional: return "Optional";
    }
    return "?";
}

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::optional<ValueType> parse_value_type(std::string_view text) {
    auto t = trim(text);
    auto l = lower(t);
    if (l == "string" || l == "text") return ValueType{FieldType::String, {}};
    if (l == "number") return ValueType{FieldType::Number, {}};
    if (l == "integer") return ValueType{FieldType::Integer, {}};
    if (l == "email") return ValueType{FieldType::Email, {}};
    if (l == "uri") return ValueType{FieldType::URI, {}};
    if (l == "phone") return ValueType{FieldType::Phone, {}};
    if (l == "date") return ValueType{FieldType::Date, {}};
    if (l == "filepath") return ValueType{FieldType::FilePath, {}};
    if (l.starts_with("ref(") && l.ends_with(")")) {
        auto major = trim(t.substr(4, t.size() - 5));
        if (is_token_name(major)) return ValueType{FieldType::Ref, std::string(major)};
    }
    return std::nullopt;
}

bool Constraint::admits(double v) const {
    switch (op) {
        case Comparison::Less: return v < bound;
        case Comparison::LessEqual: return v <= bound;
        case Comparison::Greater: return v > bound;
        case Comparison::GreaterEqual: return v >= bound;
        case Comparison::Equal: return v == bound;
    }
    return false;
}

std::string Constraint::describe() const {
    std::string op_text;
    switch (op) {
        case Comparison::Less: op_text = "<"; break;
        case Comparison::LessEqual: op_text = "<="; break;
        case Comparison::Greater: op_text = ">"; break;
        case Comparison::GreaterEqual: op_text = ">="; break;
        case Comparison::Equal: op_text = "=="; break;
    }
    std::ostringstream ss;
    ss << op_text << " " << bound;
    return ss.str();
}

std::optional<Constraint> parse_constraint(std::string_view text) {
    auto t = trim(text);
    Constraint c;
    std::size_t n = 0;
    if (t.starts_with(">=")) c.op = Comparison::GreaterEqual, n = 2;
    else if (t.starts_with("<=")) c.op = Comparison::LessEqual, n = 2;
    else if (t.starts_with("==")) c.op = Comparison::Equal, n = 2;
    else if (t.starts_with(">")) c.op = Comparison::Greater, n = 1;
    else if (t.starts_with("<")) c.op = Comparison::Less, n = 1;
    else return std::nullopt;
    auto num = trim(t.substr(n));
    if (!is_valid_number(num)) return std::nullopt;
    c.bound = std::strtod(std::string(num).c_str(), nullptr);
    return c;
}

// ---------------------------------------------------------------------------
// Typed validators

bool is_valid_email(std::string_view s) {
    s = trim(s);
    auto at = s.find('@');
    if (at == std::string_view::npos || s.find('@', at + 1) != std::string_view::npos) return false;
    auto local = s.substr(0, at);
    auto domain = s.substr(at + 1);
    if (local.empty() || domain.empty() || domain.find('.') == std::string_view::npos) return false;
    if (domain.front() == '.' || domain.back() == '.' || domain.find("..") != std::string_view::npos) return false;
    return std::none_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

bool is_valid_uri(std::string_view s) {
    s = trim(s);
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    std::size_t i = 1;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        if (std::isalnum(c) || c == '+' || c == '.' || c == '-') {
            ++i;
            continue;
        }
        break;
    }
    return i < s.size() && s[i] == ':' && i + 1 < s.size();
}

bool is_valid_phone(std::string_view s) {
    s = trim(s);
    std::size_t digits = 0;
    for (char c : s) {
        if (is_digit(c)) ++digits;
        else if (c == '+' || c == '-' || c == '(' || c == ')' || c == ' ' || c == '.') continue;
        else return false;
    }
    return digits >= 7;
}

namespace {

/// Reads exactly `n` digits at `i`; advances `i`.
bool read_digits(std::string_view s, std::size_t& i, std::size_t n, int& out) {
    if (i + n > s.size()) return false;
    out = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (!is_digit(s[i + k])) return false;
        out = out * 10 + (s[i + k] - '0');
    }
    i += n;
    return true;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

}  // namespace

bool is_valid_date(std::string_view s) {
    s = trim(s);
    std::size_t i = 0;
    int y, m, d;
    if (!read_digits(s, i, 4, y) || i >= s.size() || s[i++] != '-') return false;
    if (!read_digits(s, i, 2, m) || i >= s.size() || s[i++] != '-') return false;
    if (!read_digits(s, i, 2, d)) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12) return false;
    int dim = kDays[m - 1] + (m == 2 && is_leap(y) ? 1 : 0);
    if (d < 1 || d > dim) return false;
    if (i == s.size()) return true;

    if (s[i++] != 'T') return false;
    int hh, mm, ss;
    if (!read_digits(s, i, 2, hh) || i >= s.size() || s[i++] != ':' || !read_digits(s, i, 2, mm)) return false;
    if (hh > 23 || mm > 59) return false;
    if (i < s.size() && s[i] == ':') {
        ++i;
        if (!read_digits(s, i, 2, ss) || ss > 60) return false;
        if (i < s.size() && s[i] == '.') {
            ++i;
            std::size_t start = i;
            while (i < s.size() && is_digit(s[i])) ++i;
            if (i == start) return false;
        }
    }
    if (i == s.size()) return true;
    if (s[i] == 'Z') return i + 1 == s.size();
    if (s[i] == '+' || s[i] == '-') {
        ++i;
        int oh, om;
        if (!read_digits(s, i, 2, oh)) return false;
        if (i < s.size() && s[i] == ':') ++i;
        if (!read_digits(s, i, 2, om)) return false;
        return i == s.size() && oh <= 23 && om <= 59;
    }
    return false;
}

bool is_valid_number(std::string_view s) {
    s = trim(s);
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t int_digits = 0, frac_digits = 0;
    while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
    }
    if (int_digits + frac_digits == 0) return false;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        std::size_t exp_digits = 0;
        while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
        if (exp_digits == 0) return false;
    }
    return i == s.size();
}

bool is_valid_integer(std::string_view s) {
    s = trim(s);
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!is_digit(s[i])) return false;
    return true;
}

bool is_valid_filepath(std::string_view s) {
    s = trim(s);
    if (s.empty() || s.find('\0') != std::string_view::npos || s.find('\n') != std::string_view::npos) return false;
    // `scheme://...` is a locator, not a path
    auto sep = s.find("://");
    if (sep == std::string_view::npos || sep == 0) return true;
    if (!std::isalpha(static_cast<unsigned char>(s[0]))) return true;
    return !std::all_of(s.begin(), s.begin() + sep, [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
    });
}

// ---------------------------------------------------------------------------
// Schema loading

const FieldSpec* TokenSpec::field(std::string_view minor) const {
    for (const auto& f : fields)
        if (f.minor == minor) return &f;
    return nullptr;
}

const TokenSpec* Mode::token(std::string_view major) const {
    for (const auto& t : tokens)
        if (t.major == major) return &t;
    return nullptr;
}

namespace {

Location at(const YAML::Node& n) {
    auto m = n.Mark();
    if (m.line < 0) return {1, 1, 0};
    return {static_cast<std::size_t>(m.line) + 1, static_cast<std::size_t>(m.column) + 1, 0};
}

class SchemaReader {
public:
    explicit SchemaReader(std::string file) : diags_(std::move(file)) {}

    SchemaLoad read(std::string_view text, std::string mode_name) {
        SchemaLoad out;
        out.mode.name = std::move(mode_name);
        YAML::Node root;
        try {
            root = YAML::Load(std::string(text));
        } catch (const YAML::Exception& e) {
            Location where{e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 1,
                           e.mark.column >= 0 ? static_cast<std::size_t>(e.mark.column) + 1 : 1, 0};
            diags_.error("E-SCHEMA-SYNTAX", where, "schema is not valid YAML: " + e.msg);
            out.diagnostics = diags_.take();
            return out;
        }
        if (root.IsNull()) {
            out.diagnostics = diags_.take();
            return out;
        }
        if (!root.IsMap()) {
            diags_.error("E-SCHEMA-SYNTAX", at(root), "schema must be a mapping from major token to rules");
            out.diagnostics = diags_.take();
            return out;
        }
        std::set<std::string> seen;
        for (auto it = root.begin(); it != root.end(); ++it) {
            auto major = it->first.as<std::string>("");
            if (!is_token_name(major)) {
                diags_.error("E-SCHEMA-SYNTAX", at(it->first), "'" + major + "' is not a valid major token name");
                continue;
            }
            if (!seen.insert(major).second) {
                diags_.error("E-SCHEMA-SYNTAX", at(it->first), "major token '" + major + "' defined twice");
                continue;
            }
            out.mode.tokens.push_back(read_token(major, it->second));
        }
        out.diagnostics = diags_.take();
        return out;
    }

private:
    TokenSpec read_token(const std::string& major, const YAML::Node& rules) {
        TokenSpec spec;
        spec.major = major;
        for_each_rule(rules, [&](const std::string& key, const YAML::Node& value, const YAML::Node& where) {
            if (key == "Required") spec.presence = Presence::Required;
            else if (key == "Optional") spec.presence = Presence::Optional;
            else if (key == "Multiple") spec.multiple = true;
            else if (key == "Desirable")
                diags_.error("E-SCHEMA-SYNTAX", at(where), "'Desirable' applies to minor tokens, not @" + major);
            else if (key == "Type") {
                if (auto t = read_type(value)) {
                    if (t->kind == FieldType::Ref)
                        diags_.error("E-SCHEMA-BAD-TYPE", at(value), "ref types apply to minor tokens only");
                    else
                        spec.name_type = *t;
                }
            } else if (key == "Constraint") {
                spec.name_constraint = read_constraint(value);
            } else if (key == "Validator") {
                spec.custom_validator = value.as<std::string>("");
            } else if (key == "Contents") {
                read_contents(spec, value);
            } else {
                diags_.warning("W-SCHEMA-UNKNOWN-KEY", at(where), "unknown key '" + key + "' ignored");
            }
        });
        check_constraint(spec.name_type, spec.name_constraint, rules);
        return spec;
    }

    void read_contents(TokenSpec& spec, const YAML::Node& contents) {
        auto add = [&](const YAML::Node& key, const YAML::Node& rules) {
            auto name = key.as<std::string>("");
            if (!is_token_name(name)) {
                diags_.error("E-SCHEMA-SYNTAX", at(key), "'" + name + "' is not a valid minor token name");
                return;
            }
            if (spec.field(name)) {
                diags_.error("E-SCHEMA-SYNTAX", at(key), "field '" + name + "' defined twice in " + spec.major);
                return;
            }
            spec.fields.push_back(read_field(name, rules));
        };
        if (contents.IsMap()) {
            for (auto it = contents.begin(); it != contents.end(); ++it) add(it->first, it->second);
        } else if (contents.IsSequence()) {
            for (const auto& item : contents) {
                if (item.IsMap()) {
                    for (auto it = item.begin(); it != item.end(); ++it) add(it->first, it->second);
                } else if (item.IsScalar()) {
                    add(item, YAML::Node());
                } else {
                    diags_.error("E-SCHEMA-SYNTAX", at(item), "Contents entries must be 'name: rules'");
                }
            }
        } else if (!contents.IsNull()) {
            diags_.error("E-SCHEMA-SYNTAX", at(contents), "Contents must be a list of minor tokens");
        }
    }

    FieldSpec read_field(const std::string& name, const YAML::Node& rules) {
        FieldSpec f;
        f.minor = name;
        for_each_rule(rules, [&](const std::string& key, const YAML::Node& value, const YAML::Node& where) {
            if (key == "Required") f.presence = Presence::Required;
            else if (key == "Desirable") f.presence = Presence::Desirable;
            else if (key == "Optional") f.presence = Presence::Optional;
            else if (key == "Multiple") f.multiple = true;
            else if (key == "Type") {
                if (auto t = read_type(value)) f.type = *t;
            } else if (key == "Constraint") {
                f.constraint = read_constraint(value);
            } else {
                diags_.warning("W-SCHEMA-UNKNOWN-KEY", at(where), "unknown key '" + key + "' ignored");
            }
        });
        check_constraint(f.type, f.constraint, rules);
        return f;
    }

    void check_constraint(const ValueType& type, std::optional<Constraint>& c, const YAML::Node& where) {
        if (c && type.kind != FieldType::Number && type.kind != FieldType::Integer) {
            diags_.error("E-SCHEMA-BAD-CONSTRAINT", at(where),
                         "constraint requires a number or integer type, not " + to_string(type));
            c.reset();
        }
    }

    std::optional<ValueType> read_type(const YAML::Node& value) {
        auto text = value.IsScalar() ? value.as<std::string>("") : std::string();
        auto t = parse_value_type(text);
        if (!t) diags_.error("E-SCHEMA-BAD-TYPE", at(value), "unknown type '" + text + "'");
        return t;
    }

    std::optional<Constraint> read_constraint(const YAML::Node& value) {
        auto text = value.IsScalar() ? value.as<std::string>("") : std::string();
        auto c = parse_constraint(text);
        if (!c)
            diags_.error("E-SCHEMA-BAD-CONSTRAINT", at(value),
                         "constraint '" + text + "' must be an operator (>, >=, <, <=, ==) and a number");
        return c;
    }

    /// Rules are a list of bare flags (`Required`) and one-key maps
    /// (`Type: string`); a single flag or map is accepted too.
    template <typename Fn>
    void for_each_rule(const YAML::Node& rules, Fn&& fn) {
        auto one = [&](const YAML::Node& item) {
            if (item.IsScalar()) {
                fn(item.as<std::string>(""), YAML::Node(), item);
            } else if (item.IsMap()) {
                for (auto it = item.begin(); it != item.end(); ++it) fn(it->first.as<std::string>(""), it->second, it->first);
            } else if (!item.IsNull()) {
                diags_.error("E-SCHEMA-SYNTAX", at(item), "expected a rule");
            }
        };
        if (rules.IsSequence()) {
            for (const auto& item : rules) one(item);
        } else {
            one(rules);
        }
    }

    Diagnostics diags_;
};

std::optional<std::string> read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

SchemaLoad load_schema(std::string_view text, std::string mode_name, std::string file) {
    return SchemaReader(std::move(file)).read(text, std::move(mode_name));
}

SchemaLoad load_schema_file(const std::filesystem::path& path, std::string mode_name) {
    auto text = read_file(path);
    if (!text) {
        SchemaLoad out;
        out.mode.name = std::move(mode_name);
        out.diagnostics.push_back(
            {"E-MVD-MISSING-SCHEMA", Severity::Error, "cannot read schema file", path.string(), {1, 1, 0}});
        return out;
    }
    return load_schema(*text, std::move(mode_name), path.string());
}

const Mode& base_mode() {
    static const Mode mode = [] {
        auto loaded = load_schema(base_schema_text(), "base", "<bundled base schema>");
        return loaded.mode;
    }();
    return mode;
}

// ---------------------------------------------------------------------------
// Validation map

ValidationMapLoad parse_validation_map(std::string_view text, const std::filesystem::path& path) {
    ValidationMapLoad out;
    out.map.path = path;
    Diagnostics diags(path.string());
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        diags.error("E-MVD-SYNTAX",
                    {e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 1,
                     e.mark.column >= 0 ? static_cast<std::size_t>(e.mark.column) + 1 : 1, 0},
                    "validation map is not valid YAML: " + e.msg);
        out.diagnostics = diags.take();
        return out;
    }
    if (root.IsNull()) {
        diags.warning("W-MVD-EMPTY", {1, 1, 0}, "validation map is empty");
        out.diagnostics = diags.take();
        return out;
    }
    if (!root.IsMap()) {
        diags.error("E-MVD-SYNTAX", at(root), "validation map must be a mapping with 'modes' and 'validators'");
        out.diagnostics = diags.take();
        return out;
    }
    auto base_dir = path.parent_path();
    for (auto it = root.begin(); it != root.end(); ++it) {
        auto key = it->first.as<std::string>("");
        YAML::Node value = it->second;
        if (key == "modes") {
            if (!value.IsMap() && !value.IsNull()) {
                diags.error("E-MVD-SYNTAX", at(value), "'modes' must map mode names to schema files");
                continue;
            }
            for (auto m = value.begin(); m != value.end(); ++m) {
                auto name = m->first.as<std::string>("");
                if (!m->second.IsScalar()) {
                    diags.error("E-MVD-SYNTAX", at(m->second), "schema path for mode '" + name + "' must be a string");
                    continue;
                }
                std::filesystem::path schema = m->second.as<std::string>();
                if (schema.is_relative()) schema = base_dir / schema;
                std::error_code ec;
                if (!std::filesystem::is_regular_file(schema, ec)) {
                    diags.error("E-MVD-MISSING-SCHEMA", at(m->second),
                                "schema file for mode '" + name + "' not found: " + schema.string());
                    continue;
                }
                out.map.modes[name] = schema;
            }
        } else if (key == "validators") {
            if (!value.IsMap() && !value.IsNull()) {
                diags.error("E-MVD-SYNTAX", at(value), "'validators' must map identifiers to descriptors");
                continue;
            }
            for (auto v = value.begin(); v != value.end(); ++v) {
                YAML::Emitter em;
                em << v->second;
                out.map.validators[v->first.as<std::string>("")] =
                    v->second.IsScalar() ? v->second.as<std::string>() : std::string(em.c_str());
            }
        } else {
            diags.warning("W-SCHEMA-UNKNOWN-KEY", at(it->first), "unknown key '" + key + "' ignored");
        }
    }
    if (out.map.modes.empty() && out.map.validators.empty() && !diags.has_errors())
        diags.warning("W-MVD-EMPTY", {1, 1, 0}, "validation map declares no modes");
    out.diagnostics = diags.take();
    return out;
}

ValidationMapLoad load_validation_map(const std::filesystem::path& path) {
    auto text = read_file(path);
    if (!text) {
        ValidationMapLoad out;
        out.map.path = path;
        out.diagnostics.push_back(
            {"E-MVD-SYNTAX", Severity::Error, "cannot read validation map", path.string(), {1, 1, 0}});
        return out;
    }
    return parse_validation_map(*text, path);
}

SchemaLoad load_mode(const ValidationMap& map, std::string_view name) {
    auto it = map.modes.find(std::string(name));
    if (it == map.modes.end()) {
        SchemaLoad out;
        out.mode.name = std::string(name);
        out.diagnostics.push_back({"E-MVD-UNKNOWN-MODE", Severity::Error,
                                   "mode '" + std::string(name) + "' is not declared", map.path.string(), {1, 1, 0}});
        return out;
    }
    return load_schema_file(it->second, std::string(name));
}

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string first_line(std::string_view s) { return std::string(s.substr(0, s.find('\n'))); }

class Validator {
public:
    Validator(const Workspace& ws, const Resolution& res, const Mode& mode)
        : ws_(ws), res_(res), mode_(mode), diags_(ws.root().path) {}

    std::vector<Diagnostic> run() {
        const auto& doc = ws_.root();
        check_siblings(doc.blocks);
        for_each_block(doc.blocks, [&](const Block& b) { check_block(b); });

        for (const auto& spec : mode_.tokens) {
            if (spec.presence != Presence::Required) continue;
            bool found = false;
            for_each_block(doc.blocks, [&](const Block& b) { found = found || b.major == spec.major; });
            if (!found)
                diags_.error("E-REQUIRED-MISSING", {1, 1, 0},
                             "mode '" + mode_.name + "' requires at least one @" + spec.major + " block");
        }
        auto out = diags_.take();
        sort_diagnostics(out);
        return out;
    }

private:
    void check_siblings(const std::vector<Block>& siblings) {
        std::map<std::string, std::size_t> count;
        for (const auto& b : siblings) {
            const auto* spec = mode_.token(b.major);
            if (spec && !spec->multiple && ++count[b.major] == 2)
                diags_.error("E-MULTIPLICITY", b.where, "only one @" + b.major + " block is allowed");
            check_siblings(b.children);
        }
    }

    void check_block(const Block& b) {
        const auto* spec = mode_.token(b.major);
        if (!spec) {
            if (b.major != kImportMajor)
                diags_.warning("W-UNKNOWN-MAJOR", {b.where.line, 1, b.major.size() + 1},
                               "@" + b.major + " is not defined in mode '" + mode_.name + "'");
            return;
        }
        if (spec->custom_validator)
            diags_.warning("W-CUSTOM-VALIDATOR-SKIPPED", b.where,
                           "custom validator '" + *spec->custom_validator + "' for @" + b.major + " was not run");

        check_value(b.name, spec->name_type, spec->name_constraint, b.name_at, nullptr, "@" + b.major + " name");

        for (const auto& f : spec->fields) {
            auto entries = b.entries(f.minor);
            if (entries.empty()) {
                if (f.presence == Presence::Required)
                    diags_.error("E-REQUIRED-MISSING", b.where,
                                 "@" + b.major + " '" + first_line(b.name) + "' is missing required @" + b.major +
                                     "-" + f.minor);
                else if (f.presence == Presence::Desirable)
                    diags_.warning("W-DESIRABLE-MISSING", b.where,
                                   "@" + b.major + " '" + first_line(b.name) + "' should have @" + b.major + "-" +
                                       f.minor);
                continue;
            }
            if (!f.multiple && entries.size() > 1)
                diags_.error("E-MULTIPLICITY", entries[1]->where,
                             "@" + b.major + "-" + f.minor + " may appear only once per block");
            for (const auto* e : entries)
                check_value(e->payload, f.type, f.constraint, e->payload_at, e, "@" + b.major + "-" + f.minor);
        }
        for (const auto& m : b.minors) {
            if (!spec->field(m.minor))
                diags_.warning("W-UNKNOWN-MINOR", m.where,
                               "@" + b.major + "-" + m.minor + " is not defined in mode '" + mode_.name + "'");
        }
    }

    void check_value(std::string_view payload, const ValueType& type, const std::optional<Constraint>& constraint,
                     Location where, const MinorEntry* entry, const std::string& what) {
        auto fail = [&](const std::string& code, const std::string& expected) {
            diags_.error(code, where, what + ": '" + first_line(payload) + "' is not " + expected);
        };
        switch (type.kind) {
            case FieldType::String: return;
            case FieldType::Email:
                if (!is_valid_email(payload)) fail("E-TYPE-EMAIL", "a valid email address");
                return;
            case FieldType::URI:
                if (!is_valid_uri(payload)) fail("E-TYPE-URI", "a URI (scheme:rest)");
                return;
            case FieldType::Phone:
                if (!is_valid_phone(payload)) fail("E-TYPE-PHONE", "a phone number (at least 7 digits)");
                return;
            case FieldType::Date:
                if (!is_valid_date(payload)) fail("E-TYPE-DATE", "an ISO 8601 date (YYYY-MM-DD[THH:MM[:SS]])");
                return;
            case FieldType::FilePath:
                if (!is_valid_filepath(payload)) fail("E-TYPE-FILEPATH", "a file path");
                return;
            case FieldType::Ref: {
                if (!entry) return;
                auto cls = res_.classes.find(entry);
                if (cls == res_.classes.end() || !cls->second.target) {
                    if (!looks_like_reference(payload))
                        fail("E-TYPE-REF", "a reference to @" + type.ref_major + " (expected '@" + type.ref_major +
                                               " Name' or 'from NICKNAME: @" + type.ref_major + " Name')");
                    return;
                }
                if (cls->second.target->major != type.ref_major)
                    fail("E-TYPE-REF", "a reference to @" + type.ref_major);
                return;
            }
            case FieldType::Number:
            case FieldType::Integer: {
                bool integer = type.kind == FieldType::Integer;
                if (integer ? !is_valid_integer(payload) : !is_valid_number(payload)) {
                    fail(integer ? "E-TYPE-INTEGER" : "E-TYPE-NUMBER", integer ? "an integer" : "a number");
                    return;
                }
                if (constraint) {
                    double v = std::strtod(std::string(trim(payload)).c_str(), nullptr);
                    if (!constraint->admits(v))
                        diags_.error("E-CONSTRAINT", where,
                                     what + ": " + std::string(trim(payload)) + " violates constraint " +
                                         constraint->describe());
                }
                return;
            }
        }
    }

    const Workspace& ws_;
    const Resolution& res_;
    const Mode& mode_;
    Diagnostics diags_;
};

}  // namespace

std::vector<Diagnostic> validate(const Workspace& ws, const Resolution& resolution, const Mode& mode) {
    return Validator(ws, resolution, mode).run();
}

std::vector<Diagnostic> validate(const Workspace& ws, const Mode& mode) {
    auto res = resolve_all(ws);
    return validate(ws, res, mode);
}

}  // namespace medford
