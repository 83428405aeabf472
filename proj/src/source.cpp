#include "medford/source.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

namespace medford {

std::string_view to_string(LineKind k) {
    switch (k) {
        case LineKind::MajorToken: return "MajorToken";
        case LineKind::MinorToken: return "MinorToken";
        case LineKind::MacroDefV1: return "MacroDefV1";
        case LineKind::MacroDefV2: return "MacroDefV2";
        case LineKind::Comment: return "Comment";
        case LineKind::Blank: return "Blank";
        case LineKind::Continuation: return "Continuation";
    }
    return "?";
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool is_name_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

constexpr std::string_view kBom = "\xEF\xBB\xBF";

}  // namespace

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool is_token_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_name_char(c)) return false;
    return true;
}

bool is_macro_name(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!is_name_char(c) || c == '_') return false;
    return true;
}

SourceFile read_source(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("E-IO", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return SourceFile::from_text(path, ss.str());
}

bool is_valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    const auto n = bytes.size();
    while (i < n) {
        auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= n) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // Overlong forms, surrogates, out of range.
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

LineKind classify(std::string_view content) {
    if (content.starts_with(">@")) return LineKind::MacroDefV2;
    if (content.starts_with("`@")) return LineKind::MacroDefV1;
    if (content.starts_with("@")) {
        std::size_t end = 1;
        while (end < content.size() && !is_space(content[end])) ++end;
        auto name = content.substr(1, end - 1);
        return name.find('-') == std::string_view::npos ? LineKind::MajorToken : LineKind::MinorToken;
    }
    auto t = trim(content);
    if (t.empty()) return LineKind::Blank;
    if (t.front() == '#') return LineKind::Comment;
    return LineKind::Continuation;
}

ClassifiedSource classify_lines(const SourceFile& file) {
    ClassifiedSource out;
    Diagnostics diags(file.path);
    std::string_view text = file.text;
    std::size_t offset = 0;
    if (text.starts_with(kBom)) {
        out.had_bom = true;
        offset = kBom.size();
        diags.warning("W-BOM", {1, 1, 0}, "leading byte-order mark ignored");
    }
    if (!is_valid_utf8(text)) {
        // Report the first offending line.
        std::size_t line = 1;
        std::size_t start = offset;
        while (start < text.size()) {
            auto nl = text.find('\n', start);
            auto stop = nl == std::string_view::npos ? text.size() : nl;
            if (!is_valid_utf8(text.substr(start, stop - start))) break;
            if (nl == std::string_view::npos) break;
            start = nl + 1;
            ++line;
        }
        diags.error("E-ENCODING", {line, 1, 0}, "file is not valid UTF-8");
        out.diagnostics = diags.take();
        return out;
    }

    std::size_t number = 1;
    while (offset < text.size()) {
        auto nl = text.find('\n', offset);
        RawLine line;
        line.number = number++;
        std::size_t content_end;
        if (nl == std::string_view::npos) {
            content_end = text.size();
            line.terminator = "";
        } else if (nl > offset && text[nl - 1] == '\r') {
            content_end = nl - 1;
            line.terminator = "\r\n";
        } else {
            content_end = nl;
            line.terminator = "\n";
        }
        line.span = {offset, content_end};
        line.content = std::string(text.substr(offset, content_end - offset));
        line.kind = classify(line.content);
        out.lines.push_back(std::move(line));
        offset = nl == std::string_view::npos ? text.size() : nl + 1;
    }
    out.diagnostics = diags.take();
    return out;
}

std::string reconstruct(const ClassifiedSource& classified) {
    std::string out = classified.had_bom ? std::string(kBom) : std::string();
    for (const auto& l : classified.lines) {
        out += l.content;
        out += l.terminator;
    }
    return out;
}

std::optional<TokenParts> token_name_parts(const RawLine& line, Diagnostics& diags) {
    std::string_view c = line.content;
    if (c.empty() || c.front() != '@') {
        diags.error("E-BAD-TOKEN", {line.number, 1, c.size()}, "line does not start with a token");
        return std::nullopt;
    }
    std::size_t end = 1;
    while (end < c.size() && !is_space(c[end])) ++end;
    std::string_view name = c.substr(1, end - 1);
    Location where{line.number, 1, end};

    TokenParts parts;
    auto dash = name.find('-');
    std::string_view major = name.substr(0, dash);
    if (dash != std::string_view::npos) {
        std::string_view minor = name.substr(dash + 1);
        if (minor.find('-') != std::string_view::npos) {
            diags.error("E-BAD-TOKEN", where, "token name '" + std::string(name) + "' contains more than one '-'");
            return std::nullopt;
        }
        if (!is_token_name(minor)) {
            diags.error("E-BAD-TOKEN", where,
                        "minor token name '" + std::string(minor) + "' must match [A-Za-z0-9_]+");
            return std::nullopt;
        }
        parts.minor = std::string(minor);
    }
    if (!is_token_name(major)) {
        diags.error("E-BAD-TOKEN", where, "major token name '" + std::string(major) + "' must match [A-Za-z0-9_]+");
        return std::nullopt;
    }
    parts.major = std::string(major);

    std::size_t p = end;
    while (p < c.size() && is_space(c[p])) ++p;
    parts.payload_col = p + 1;
    parts.payload = std::string(trim(c.substr(std::min(p, c.size()))));
    return parts;
}

}  // namespace medford
