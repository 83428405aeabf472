#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace medford {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

/// Position of a diagnostic inside its file. Lines and columns are 1-based,
/// columns count bytes. A zero length marks a point location.
struct Location {
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t length = 0;

    friend bool operator==(const Location&, const Location&) = default;
};

/// The single error currency shared by the CLI and the language server.
/// `code` is stable (E-* / W-*); `message` is free text and may change.
struct Diagnostic {
    std::string code;
    Severity severity = Severity::Error;
    std::string message;
    std::string file;
    Location where;

    bool is_error() const { return severity == Severity::Error; }
};

/// Accumulates diagnostics for one file.
class Diagnostics {
public:
    Diagnostics() = default;
    explicit Diagnostics(std::string file) : file_(std::move(file)) {}

    void error(std::string code, Location where, std::string message);
    void warning(std::string code, Location where, std::string message);
    void add(Diagnostic d) { items_.push_back(std::move(d)); }
    void append(const std::vector<Diagnostic>& more);

    const std::string& file() const { return file_; }
    const std::vector<Diagnostic>& items() const { return items_; }
    std::vector<Diagnostic> take() { return std::move(items_); }
    bool has_errors() const;
    bool empty() const { return items_.empty(); }

private:
    std::string file_;
    std::vector<Diagnostic> items_;
};

bool has_errors(const std::vector<Diagnostic>& diags);
std::size_t count_code(const std::vector<Diagnostic>& diags, std::string_view code);

/// Stable sort by file, then line, then column.
void sort_diagnostics(std::vector<Diagnostic>& diags);

/// One JSON object, no trailing newline: {file, line, col, length, code, severity, message}.
std::string to_json_line(const Diagnostic& d);

/// `file:line:col: severity: [CODE] message`, followed by the source line
/// and a caret marker when `source` is non-empty.
std::string to_human(const Diagnostic& d, std::string_view source = {});

/// Thrown by operations that cannot produce a partial result
/// (unreadable zip, non-JPEG input, ...).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace medford
