#include "medford/document.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace medford {

std::string_view to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::Text: return "Text";
        case PayloadKind::InternalRef: return "InternalRef";
        case PayloadKind::ExternalRef: return "ExternalRef";
        case PayloadKind::FilePath: return "FilePath";
        case PayloadKind::URI: return "URI";
    }
    return "?";
}

std::vector<const MinorEntry*> Block::entries(std::string_view minor) const {
    std::vector<const MinorEntry*> out;
    for (const auto& m : minors)
        if (m.minor == minor) out.push_back(&m);
    return out;
}

const MinorEntry* Block::first(std::string_view minor) const {
    for (const auto& m : minors)
        if (m.minor == minor) return &m;
    return nullptr;
}

namespace {

const Block* find_in(const std::vector<Block>& blocks, std::string_view major, std::string_view name) {
    for (const auto& b : blocks) {
        if (b.major == major && b.name == name) return &b;
        if (const auto* c = find_in(b.children, major, name)) return c;
    }
    return nullptr;
}

bool is_child_major(std::string_view parent, std::string_view child) {
    return child.size() > parent.size() + 1 && child.starts_with(parent) && child[parent.size()] == '_';
}

void append_line(std::string& payload, std::string_view text) {
    if (payload.empty()) {
        payload = std::string(text);
    } else {
        payload += '\n';
        payload += text;
    }
}

std::string first_line(std::string_view s) {
    auto nl = s.find('\n');
    return std::string(s.substr(0, nl));
}

void check_unique(const std::vector<Block>& siblings, Diagnostics& diags) {
    std::map<std::pair<std::string, std::string>, const Block*> seen;
    for (const auto& b : siblings) {
        if (b.major != kImportMajor && !b.name.empty()) {
            auto [it, fresh] = seen.emplace(std::make_pair(b.major, b.name), &b);
            if (!fresh) {
                diags.error("E-DUPLICATE-NAME", b.name_at,
                            "@" + b.major + " block named '" + first_line(b.name) + "' already defined on line " +
                                std::to_string(it->second->where.line));
            }
        }
        check_unique(b.children, diags);
    }
}

class Parser {
public:
    Parser(std::string path) : diags_(path) { doc_.path = std::move(path); }

    Document run(const std::vector<RawLine>& lines, MacroTable macros) {
        doc_.macros = std::move(macros);
        for (const auto& line : lines) step(line);
        check_unique(doc_.blocks, diags_);
        extract_imports();
        doc_.diagnostics = diags_.take();
        return std::move(doc_);
    }

private:
    void step(const RawLine& line) {
        switch (line.kind) {
            case LineKind::Blank:
                target_ = nullptr;
                return;
            case LineKind::Comment:
                return;
            case LineKind::MacroDefV1:
            case LineKind::MacroDefV2:
                // Only reachable when parse() is fed an uncollected stream.
                target_ = nullptr;
                return;
            case LineKind::Continuation:
                continuation(line);
                return;
            case LineKind::MajorToken:
            case LineKind::MinorToken:
                token(line);
                return;
        }
    }

    void continuation(const RawLine& line) {
        auto text = trim(line.content);
        if (!target_) {
            diags_.error("E-ORPHAN-TEXT", {line.number, 1, line.content.size()},
                         "text line does not continue any payload (a blank line ends the previous payload)");
            return;
        }
        append_line(*target_, text);
        if (target_last_line_) *target_last_line_ = line.number;
        for (auto* b : stack_) b->last_line = std::max(b->last_line, line.number);
    }

    void token(const RawLine& line) {
        target_ = nullptr;
        target_last_line_ = nullptr;
        auto parts = token_name_parts(line, diags_);
        if (!parts) return;
        // Lengths are measured on the source line; expanded macros may be longer.
        std::size_t width = line.span.end > line.span.begin ? line.span.end - line.span.begin : line.content.size();
        std::size_t payload_room = width >= parts->payload_col ? width - parts->payload_col + 1 : 0;
        Location payload_at{line.number, parts->payload_col, std::min(first_line(parts->payload).size(), payload_room)};
        Location where{line.number, 1, std::min(line.content.size(), width)};

        if (!parts->minor) {
            if (parts->payload.empty()) {
                // still opened, so its minors do not cascade into orphans
                diags_.error("E-EMPTY-NAME", where, "@" + parts->major + " block has no name");
            }
            open_block(parts->major, std::move(parts->payload), where, payload_at);
            target_ = &stack_.back()->name;
            target_last_line_ = &stack_.back()->last_line;
            return;
        }

        Block* owner = nullptr;
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
            if ((*it)->major == parts->major) {
                owner = *it;
                break;
            }
        }
        if (!owner) {
            diags_.error("E-ORPHAN-MINOR", where,
                         "@" + parts->major + "-" + *parts->minor + " has no open @" + parts->major + " block");
            return;
        }
        MinorEntry entry;
        entry.minor = std::move(*parts->minor);
        entry.payload = std::move(parts->payload);
        entry.where = where;
        entry.payload_at = payload_at;
        entry.last_line = line.number;
        owner->minors.push_back(std::move(entry));
        target_ = &owner->minors.back().payload;
        target_last_line_ = &owner->minors.back().last_line;
        for (auto* b : stack_) b->last_line = std::max(b->last_line, line.number);
    }

    void open_block(std::string major, std::string name, Location where, Location name_at) {
        Block block;
        block.major = std::move(major);
        block.name = std::move(name);
        block.where = where;
        block.name_at = name_at;
        block.last_line = where.line;

        // Deepest open block whose major is a `_`-prefix of this one.
        while (!stack_.empty() && !is_child_major(stack_.back()->major, block.major)) stack_.pop_back();
        if (stack_.empty()) {
            doc_.blocks.push_back(std::move(block));
            stack_.push_back(&doc_.blocks.back());
        } else {
            Block* parent = stack_.back();
            parent->children.push_back(std::move(block));
            stack_.push_back(&parent->children.back());
        }
        for (auto* b : stack_) b->last_line = std::max(b->last_line, where.line);
    }

    void extract_imports() {
        for (const auto& b : doc_.blocks) {
            if (b.major != kImportMajor) continue;
            if (!is_macro_name(b.name)) {
                diags_.error("E-IMPORT-BAD-NICK", b.name_at,
                             "import nickname '" + first_line(b.name) + "' must contain only letters and numbers");
                continue;
            }
            const auto* file = b.first(kImportFileMinor);
            if (!file || file->payload.empty()) {
                diags_.error("E-IMPORT-NO-FILE", b.where, "@Import " + b.name + " has no @Import-File entry");
                continue;
            }
            doc_.imports.push_back({b.name, file->payload, b.name_at, file->payload_at});
        }
    }

    Document doc_;
    Diagnostics diags_;
    std::vector<Block*> stack_;
    std::string* target_ = nullptr;
    std::size_t* target_last_line_ = nullptr;
};

void serialize_payload_tail(std::string& out, std::string_view payload) {
    std::size_t pos = payload.find('\n');
    while (pos != std::string_view::npos) {
        std::size_t next = payload.find('\n', pos + 1);
        auto line = payload.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1);
        // Lines that would lex as tokens or macro definitions are indented;
        // continuation text is trimmed on read.
        if (classify(line) != LineKind::Continuation) out += "  ";
        out += line;
        out += '\n';
        pos = next;
    }
}

void serialize_into(std::string& out, const Block& b) {
    out += "@" + b.major + " " + first_line(b.name) + "\n";
    serialize_payload_tail(out, b.name);
    for (const auto& m : b.minors) {
        out += "@" + b.major + "-" + m.minor;
        auto head = first_line(m.payload);
        if (!head.empty()) out += " " + head;
        out += "\n";
        serialize_payload_tail(out, m.payload);
    }
    for (const auto& c : b.children) serialize_into(out, c);
}

}  // namespace

const Block* Document::find(std::string_view major, std::string_view name) const {
    return find_in(blocks, major, name);
}

Document parse(const std::vector<RawLine>& lines, std::string path, MacroTable macros) {
    return Parser(std::move(path)).run(lines, std::move(macros));
}

Document load_document(const SourceFile& file) {
    auto classified = classify_lines(file);
    auto collected = collect_macros(classified.lines, file.path);
    Diagnostics diags(file.path);
    auto expanded = expand_lines(std::move(collected.residual), collected.table, diags);
    auto doc = parse(expanded, file.path, std::move(collected.table));

    std::vector<Diagnostic> all = std::move(classified.diagnostics);
    all.insert(all.end(), collected.diagnostics.begin(), collected.diagnostics.end());
    all.insert(all.end(), diags.items().begin(), diags.items().end());
    all.insert(all.end(), doc.diagnostics.begin(), doc.diagnostics.end());
    sort_diagnostics(all);
    doc.diagnostics = std::move(all);
    return doc;
}

std::string serialize(const Block& block) {
    std::string out;
    serialize_into(out, block);
    return out;
}

std::string serialize(const Document& doc) {
    std::string out;
    for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
        if (i) out += "\n";
        serialize_into(out, doc.blocks[i]);
    }
    return out;
}

bool structurally_equal(const Block& a, const Block& b) {
    if (a.major != b.major || a.name != b.name || a.minors.size() != b.minors.size() ||
        a.children.size() != b.children.size())
        return false;
    for (std::size_t i = 0; i < a.minors.size(); ++i) {
        if (a.minors[i].minor != b.minors[i].minor || a.minors[i].payload != b.minors[i].payload) return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    return true;
}

bool structurally_equal(const Document& a, const Document& b) {
    if (a.blocks.size() != b.blocks.size()) return false;
    for (std::size_t i = 0; i < a.blocks.size(); ++i)
        if (!structurally_equal(a.blocks[i], b.blocks[i])) return false;
    return true;
}

}  // namespace medford
