#include "medford/diagnostic.hpp"

#include <algorithm>

#include "json.hpp"

namespace medford {

std::string_view to_string(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

void Diagnostics::error(std::string code, Location where, std::string message) {
    items_.push_back({std::move(code), Severity::Error, std::move(message), file_, where});
}

void Diagnostics::warning(std::string code, Location where, std::string message) {
    items_.push_back({std::move(code), Severity::Warning, std::move(message), file_, where});
}

void Diagnostics::append(const std::vector<Diagnostic>& more) {
    items_.insert(items_.end(), more.begin(), more.end());
}

bool Diagnostics::has_errors() const { return medford::has_errors(items_); }

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

std::size_t count_code(const std::vector<Diagnostic>& diags, std::string_view code) {
    return static_cast<std::size_t>(
        std::count_if(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; }));
}

void sort_diagnostics(std::vector<Diagnostic>& diags) {
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.file != b.file) return a.file < b.file;
        if (a.where.line != b.where.line) return a.where.line < b.where.line;
        return a.where.col < b.where.col;
    });
}

std::string to_json_line(const Diagnostic& d) {
    nlohmann::ordered_json j;
    j["file"] = d.file;
    j["line"] = d.where.line;
    j["col"] = d.where.col;
    j["length"] = d.where.length;
    j["code"] = d.code;
    j["severity"] = to_string(d.severity);
    j["message"] = d.message;
    return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string to_human(const Diagnostic& d, std::string_view source) {
    std::string out = d.file + ":" + std::to_string(d.where.line) + ":" + std::to_string(d.where.col) + ": " +
                      std::string(to_string(d.severity)) + ": [" + d.code + "] " + d.message + "\n";
    if (source.empty()) return out;

    // Locate the line in the source text.
    std::size_t line = 1;
    std::size_t pos = 0;
    while (line < d.where.line && pos < source.size()) {
        auto nl = source.find('\n', pos);
        if (nl == std::string_view::npos) return out;
        pos = nl + 1;
        ++line;
    }
    if (line != d.where.line || pos > source.size()) return out;
    auto end = source.find('\n', pos);
    auto text = source.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    out += "    ";
    out += text;
    out += "\n    ";
    out += std::string(d.where.col > 0 ? d.where.col - 1 : 0, ' ');
    out += std::string(std::max<std::size_t>(d.where.length, 1), '^');
    out += "\n";
    return out;
}

}  // namespace medford
