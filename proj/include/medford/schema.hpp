#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/resolver.hpp"

namespace medford {

enum class FieldType { String, Number, Integer, Email, URI, Phone, Date, FilePath, Ref };

struct ValueType {
    FieldType kind = FieldType::String;
    std::string ref_major;  // only for FieldType::Ref

    friend bool operator==(const ValueType&, const ValueType&) = default;
};

std::string to_string(const ValueType& t);
/// Parses `string`, `URI`, `ref(Species)`, ... (case-insensitive names).
std::optional<ValueType> parse_value_type(std::string_view text);

enum class Presence { Required, Desirable, Optional };
std::string_view to_string(Presence p);

enum class Comparison { Less, LessEqual, Greater, GreaterEqual, Equal };

struct Constraint {
    Comparison op = Comparison::Greater;
    double bound = 0;

    bool admits(double value) const;
    std::string describe() const;
};

/// `> 0`, `<= 90`, `== 1.5`
std::optional<Constraint> parse_constraint(std::string_view text);

struct FieldSpec {
    std::string minor;
    ValueType type;
    Presence presence = Presence::Optional;
    bool multiple = false;
    std::optional<Constraint> constraint;
};

struct TokenSpec {
    std::string major;
    ValueType name_type;  // type of the block name
    std::optional<Constraint> name_constraint;
    Presence presence = Presence::Optional;  // Required or Optional
    bool multiple = false;
    std::vector<FieldSpec> fields;
    std::optional<std::string> custom_validator;

    const FieldSpec* field(std::string_view minor) const;
};

/// A named validation profile.
struct Mode {
    std::string name;
    std::vector<TokenSpec> tokens;

    const TokenSpec* token(std::string_view major) const;
};

struct SchemaLoad {
    Mode mode;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a YAML schema document (major -> list of rules). Unknown keys are
/// W-SCHEMA-UNKNOWN-KEY.
SchemaLoad load_schema(std::string_view text, std::string mode_name = "default", std::string file = "<schema>");
SchemaLoad load_schema_file(const std::filesystem::path& path, std::string mode_name);

/// The bundled `base` mode.
const Mode& base_mode();
std::string_view base_schema_text();

struct ValidationMap {
    std::filesystem::path path;
    std::map<std::string, std::filesystem::path> modes;  // absolute or relative to cwd
    std::map<std::string, std::string> validators;       // id -> descriptor
};

struct ValidationMapLoad {
    ValidationMap map;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

/// `modes:` name -> schema path, `validators:` id -> descriptor. Schema paths
/// are relative to the map file.
ValidationMapLoad parse_validation_map(std::string_view text, const std::filesystem::path& path);
ValidationMapLoad load_validation_map(const std::filesystem::path& path);

/// Loads mode `name` from the map; E-MVD-UNKNOWN-MODE if absent.
SchemaLoad load_mode(const ValidationMap& map, std::string_view name);

// Typed validators. All are total over arbitrary input.
bool is_valid_email(std::string_view s);
bool is_valid_uri(std::string_view s);
bool is_valid_phone(std::string_view s);
bool is_valid_date(std::string_view s);
bool is_valid_number(std::string_view s);
bool is_valid_integer(std::string_view s);
bool is_valid_filepath(std::string_view s);

/// Validates the root document of `ws` against `mode`. Stable order.
std::vector<Diagnostic> validate(const Workspace& ws, const Resolution& resolution, const Mode& mode);
std::vector<Diagnostic> validate(const Workspace& ws, const Mode& mode);

}  // namespace medford
