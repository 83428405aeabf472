#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"

namespace medford {

/// Half-open byte range into the file text.
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

enum class LineKind { MajorToken, MinorToken, MacroDefV1, MacroDefV2, Comment, Blank, Continuation };

std::string_view to_string(LineKind k);

struct RawLine {
    std::size_t number = 0;  // 1-based
    std::string content;     // terminator excluded
    LineKind kind = LineKind::Blank;
    ByteSpan span;
    std::string terminator;  // "\n", "\r\n" or "" on the final line
};

/// One `.mfd` file read whole. `text` holds the exact input bytes.
struct SourceFile {
    std::string path;
    std::string text;

    static SourceFile from_text(std::string path, std::string text) {
        return SourceFile{std::move(path), std::move(text)};
    }
};

/// Reads a file from disk; throws medford::Error (E-IO) if unreadable.
SourceFile read_source(const std::string& path);

struct ClassifiedSource {
    std::vector<RawLine> lines;
    bool had_bom = false;
    std::vector<Diagnostic> diagnostics;
};

/// Splits into lines and assigns each one a LineKind. Invalid UTF-8 yields
/// E-ENCODING and no lines; a leading BOM is skipped with W-BOM.
ClassifiedSource classify_lines(const SourceFile& file);

/// Kind of a single line content (no terminator). Total function.
LineKind classify(std::string_view content);

/// Joins lines back with their recorded terminators.
std::string reconstruct(const ClassifiedSource& classified);

bool is_valid_utf8(std::string_view bytes);

struct TokenParts {
    std::string major;
    std::optional<std::string> minor;
    std::string payload;  // whitespace-trimmed
    std::size_t payload_col = 1;  // 1-based column of the payload start
};

/// Splits `@Major-minor payload`. Reports E-BAD-TOKEN for names outside
/// `[A-Za-z0-9_]` or with more than one `-`.
std::optional<TokenParts> token_name_parts(const RawLine& line, Diagnostics& diags);

bool is_token_name(std::string_view s);
bool is_macro_name(std::string_view s);
std::string_view trim(std::string_view s);

}  // namespace medford
