#include "medford/macro.hpp"

namespace medford {

namespace {

bool is_macro_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

std::size_t name_run_end(std::string_view s, std::size_t from) {
    while (from < s.size() && is_macro_char(s[from])) ++from;
    return from;
}

bool starts_invocation(std::string_view s, std::size_t i) {
    auto rest = s.substr(i);
    return rest.starts_with(kV1Marker) || rest.starts_with(kV2InvokeMarker);
}

/// Name following the two-character marker at the start of a definition line.
std::string_view definition_name(std::string_view content) {
    return content.substr(2, name_run_end(content, 2) - 2);
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

}  // namespace

const MacroDef* MacroTable::find(std::string_view name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

bool MacroTable::insert(MacroDef def) {
    if (contains(def.name)) return false;
    order_.push_back(def.name);
    auto key = def.name;
    defs_.emplace(std::move(key), std::move(def));
    return true;
}

std::string MacroTable::longest_prefix(std::string_view run) const {
    for (std::size_t n = run.size(); n > 0; --n) {
        if (contains(run.substr(0, n))) return std::string(run.substr(0, n));
    }
    return {};
}

std::string describe(const UndefinedMacro& u) {
    std::string msg = "undefined macro '" + u.marker + u.name + "'";
    if (!u.best_guess.empty() && u.best_guess != u.name)
        msg += " (did you mean '{" + u.marker + u.best_guess + "}'? braces separate a macro name from following text)";
    else
        msg += " (macros must be defined before use)";
    return msg;
}

Expansion expand(std::string_view s, const MacroTable& table, std::size_t before_line) {
    auto visible = [&](std::string_view name) -> const MacroDef* {
        const auto* def = table.find(name);
        return def && def->line < before_line ? def : nullptr;
    };
    Expansion out;
    out.text.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '{' && starts_invocation(s, i + 1)) {
            std::size_t name_begin = i + 3;
            std::size_t name_end = name_run_end(s, name_begin);
            if (name_end > name_begin && name_end < s.size() && s[name_end] == '}') {
                auto name = s.substr(name_begin, name_end - name_begin);
                if (const auto* def = visible(name)) {
                    out.text += def->body;
                } else {
                    out.undefined.push_back({i, name_end + 1 - i, std::string(s.substr(i + 1, 2)),
                                             std::string(name), table.longest_prefix(name)});
                    out.text += s.substr(i, name_end + 1 - i);
                }
                i = name_end + 1;
                continue;
            }
        }
        if (starts_invocation(s, i)) {
            std::size_t name_begin = i + 2;
            std::size_t name_end = name_run_end(s, name_begin);
            if (name_end > name_begin) {
                auto name = s.substr(name_begin, name_end - name_begin);
                if (const auto* def = visible(name)) {
                    out.text += def->body;
                } else {
                    out.undefined.push_back({i, name_end - i, std::string(s.substr(i, 2)), std::string(name),
                                             table.longest_prefix(name)});
                    out.text += s.substr(i, name_end - i);
                }
                i = name_end;
                continue;
            }
        }
        out.text += s[i];
        ++i;
    }
    return out;
}

MacroCollection collect_macros(const std::vector<RawLine>& lines, const std::string& file) {
    MacroCollection out;
    Diagnostics diags(file);

    auto is_invocation_line = [&](const RawLine& l) {
        return l.kind == LineKind::MacroDefV1 && out.table.contains(definition_name(l.content));
    };

    std::size_t i = 0;
    while (i < lines.size()) {
        const RawLine& line = lines[i];
        const bool v2 = line.kind == LineKind::MacroDefV2;
        const bool v1 = line.kind == LineKind::MacroDefV1;

        if (v1 && is_invocation_line(line)) {
            RawLine reclassified = line;
            reclassified.kind = LineKind::Continuation;
            auto name = std::string(definition_name(line.content));
            diags.warning("W-AMBIGUOUS-MACRO", {line.number, 1, 2 + name.size()},
                          "line starts with '`@" + name + "' but '" + name +
                              "' is already defined; treated as an invocation continuing the previous payload");
            out.residual.push_back(std::move(reclassified));
            ++i;
            continue;
        }
        if (!v1 && !v2) {
            out.residual.push_back(line);
            ++i;
            continue;
        }

        std::string_view content = line.content;
        std::size_t name_end = name_run_end(content, 2);
        std::string name(content.substr(2, name_end - 2));
        bool name_ok = !name.empty() && (name_end == content.size() || is_space(content[name_end]));

        // Body: rest of the line plus following continuation lines.
        std::vector<std::string> body_lines;
        std::size_t body_first_line = line.number;
        if (name_ok) {
            auto first = trim(content.substr(name_end));
            if (!first.empty()) body_lines.emplace_back(first);
        }
        std::size_t j = i + 1;
        while (j < lines.size()) {
            const RawLine& next = lines[j];
            if (next.kind == LineKind::Continuation) {
                body_lines.emplace_back(trim(next.content));
            } else if (is_invocation_line(next)) {
                auto inv = std::string(definition_name(next.content));
                diags.warning("W-AMBIGUOUS-MACRO", {next.number, 1, 2 + inv.size()},
                              "line starts with '`@" + inv + "' but '" + inv +
                                  "' is already defined; treated as an invocation inside the definition of '" + name +
                                  "'");
                body_lines.emplace_back(trim(next.content));
            } else {
                break;
            }
            ++j;
        }
        i = j;

        if (!name_ok) {
            diags.error("E-MACRO-BAD-NAME", {line.number, 1, std::max<std::size_t>(name_end, 2)},
                        "macro name must contain only letters and numbers and be followed by a space");
            continue;
        }

        std::string body;
        for (std::size_t k = 0; k < body_lines.size(); ++k) {
            if (k) body += '\n';
            body += body_lines[k];
        }
        if (body.empty()) {
            diags.error("E-MACRO-EMPTY", {line.number, 1, name_end},
                        "macro '" + name + "' has an empty body" +
                            (v1 ? std::string(" (an invocation must follow the macro's definition)") : std::string()));
            continue;
        }
        if (out.table.contains(name)) {
            diags.error("E-MACRO-REDEF", {line.number, 1, name_end},
                        "macro '" + name + "' is already defined on line " +
                            std::to_string(out.table.find(name)->line));
            continue;
        }

        auto expanded = expand(body, out.table);
        for (const auto& u : expanded.undefined)
            diags.error("E-MACRO-UNDEF", {body_first_line, 1, name_end}, describe(u) + " in body of '" + name + "'");
        out.table.insert({name, expanded.text, line.number, v2 ? MacroDialect::V2 : MacroDialect::V1});
    }
    out.diagnostics = diags.take();
    return out;
}

std::vector<RawLine> expand_lines(std::vector<RawLine> lines, const MacroTable& table, Diagnostics& diags) {
    for (auto& line : lines) {
        if (line.kind != LineKind::MajorToken && line.kind != LineKind::MinorToken &&
            line.kind != LineKind::Continuation)
            continue;
        auto e = expand(line.content, table, line.number);
        for (const auto& u : e.undefined)
            diags.error("E-MACRO-UNDEF", {line.number, u.offset + 1, u.length}, describe(u));
        line.content = std::move(e.text);
    }
    return lines;
}

}  // namespace medford
