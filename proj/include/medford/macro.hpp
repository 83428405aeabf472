#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/source.hpp"

namespace medford {

/// V1 defines with a line-initial backtick-`@` and invokes with the same
/// marker; V2 defines with `>@` and invokes with `<@`.
enum class MacroDialect { V1, V2 };

inline constexpr std::string_view kV1Marker = "`@";
inline constexpr std::string_view kV2DefineMarker = ">@";
inline constexpr std::string_view kV2InvokeMarker = "<@";

struct MacroDef {
    std::string name;
    std::string body;  // fully expanded, may contain '\n'
    std::size_t line = 0;
    MacroDialect dialect = MacroDialect::V1;
};

class MacroTable {
public:
    const MacroDef* find(std::string_view name) const;
    bool contains(std::string_view name) const { return find(name) != nullptr; }
    /// Returns false (and leaves the table unchanged) if the name exists.
    bool insert(MacroDef def);

    /// Longest defined name that is a prefix of `run`, or empty.
    std::string longest_prefix(std::string_view run) const;

    const std::vector<std::string>& order() const { return order_; }
    std::size_t size() const { return order_.size(); }
    bool empty() const { return order_.empty(); }

private:
    std::map<std::string, MacroDef, std::less<>> defs_;
    std::vector<std::string> order_;
};

struct MacroCollection {
    MacroTable table;
    std::vector<RawLine> residual;  // definition lines and their bodies removed
    std::vector<Diagnostic> diagnostics;
};

/// Builds the macro table in document order. A V1 line whose name is already
/// defined is an invocation, not a definition: it stays in the residual
/// stream as a Continuation and is flagged W-AMBIGUOUS-MACRO.
MacroCollection collect_macros(const std::vector<RawLine>& lines, const std::string& file);

struct UndefinedMacro {
    std::size_t offset = 0;  // into the input payload
    std::size_t length = 0;
    std::string marker;
    std::string name;        // maximal name run after the marker
    std::string best_guess;  // longest defined prefix of `name`, if any
};

struct Expansion {
    std::string text;
    std::vector<UndefinedMacro> undefined;
    bool ok() const { return undefined.empty(); }
};

/// Single-pass substitution of braced and bare invocations. Undefined
/// invocations are left verbatim and reported. Only definitions made before
/// line `before_line` are visible.
Expansion expand(std::string_view payload, const MacroTable& table,
                 std::size_t before_line = std::numeric_limits<std::size_t>::max());

/// Expands token and continuation lines in place; E-MACRO-UNDEF per failure.
std::vector<RawLine> expand_lines(std::vector<RawLine> lines, const MacroTable& table, Diagnostics& diags);

std::string describe(const UndefinedMacro& u);

}  // namespace medford
