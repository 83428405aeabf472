#include "medford/resolver.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace medford {

namespace {

bool is_ws(char c) { return c == ' ' || c == '\t'; }

bool is_nick_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
}

bool is_token_char(char c) { return is_nick_char(c) || c == '_'; }

/// Parses `@Major Name` at the start of `s`.
std::optional<RefTarget> parse_internal(std::string_view s) {
    if (s.empty() || s.front() != '@') return std::nullopt;
    std::size_t i = 1;
    while (i < s.size() && is_token_char(s[i])) ++i;
    if (i == 1 || i >= s.size() || !is_ws(s[i])) return std::nullopt;
    auto name = trim(s.substr(i));
    if (name.empty() || name.find('\n') != std::string_view::npos) return std::nullopt;
    return RefTarget{std::nullopt, std::string(s.substr(1, i - 1)), std::string(name)};
}

std::string normalize_key(const std::filesystem::path& p) {
    std::error_code ec;
    auto abs = std::filesystem::weakly_canonical(p, ec);
    if (ec) abs = std::filesystem::absolute(p).lexically_normal();
    return abs.string();
}

}  // namespace

bool looks_like_reference(std::string_view payload) {
    if (payload.starts_with("@")) return true;
    if (!payload.starts_with("from ")) return false;
    std::size_t i = 5;
    while (i < payload.size() && is_ws(payload[i])) ++i;
    std::size_t word = i;
    while (i < payload.size() && !is_ws(payload[i]) && payload[i] != ':' && payload[i] != '\n') ++i;
    return i > word && i < payload.size() && payload[i] == ':';
}

PayloadClass classify_payload(const MinorEntry& entry, Diagnostics& diags) {
    std::string_view p = entry.payload;
    if (!looks_like_reference(p)) return {};

    if (p.front() == '@') {
        if (auto t = parse_internal(p)) return {PayloadKind::InternalRef, std::move(t)};
    } else {
        std::size_t i = 5;
        while (i < p.size() && is_ws(p[i])) ++i;
        std::size_t nick_begin = i;
        while (i < p.size() && is_nick_char(p[i])) ++i;
        if (i > nick_begin && i < p.size() && p[i] == ':') {
            auto nick = p.substr(nick_begin, i - nick_begin);
            ++i;
            while (i < p.size() && is_ws(p[i])) ++i;
            if (auto t = parse_internal(p.substr(i))) {
                t->ns = std::string(nick);
                return {PayloadKind::ExternalRef, std::move(t)};
            }
        }
    }
    diags.error("E-REF-SYNTAX", entry.payload_at,
                "malformed reference; expected '@Major Name' or 'from NICKNAME: @Major Name'");
    return {};
}

FileLoader disk_loader() {
    return [](const std::filesystem::path& p) -> std::optional<std::string> {
        std::error_code ec;
        if (!std::filesystem::is_regular_file(p, ec)) return std::nullopt;
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
}

const LoadedDocument* Workspace::imported(std::string_view nickname, std::size_t from) const {
    if (from >= documents.size()) return nullptr;
    const auto& ns = documents[from].namespaces;
    auto it = ns.find(nickname);
    return it == ns.end() ? nullptr : &documents[it->second];
}

std::filesystem::path resolve_import_path(std::string_view file, const std::filesystem::path& importer) {
    std::filesystem::path p;
    if (file == "~" || file.starts_with("~/")) {
        const char* home = std::getenv("HOME");
        p = std::filesystem::path(home ? home : "") / std::string(file.substr(std::min<std::size_t>(2, file.size())));
    } else {
        p = std::filesystem::path(std::string(file));
    }
    if (p.is_relative()) p = importer.parent_path() / p;
    return p.lexically_normal();
}

namespace {

class ImportLoader {
public:
    ImportLoader(Workspace& ws, const FileLoader& loader) : ws_(ws), loader_(loader) {}

    /// Returns true if an import cycle was found at or below `index`.
    bool load(std::size_t index, std::vector<std::string>& stack) {
        bool cycle_below = false;
        // Copy: loading appends to ws_.documents and may reallocate.
        const auto imports = ws_.documents[index].doc.imports;
        const auto importer_path = std::filesystem::path(ws_.documents[index].doc.path);
        const auto file = ws_.documents[index].doc.path;

        for (const auto& decl : imports) {
            auto report = [&](std::string code, std::string message, Location where) {
                ws_.documents[index].diagnostics.push_back(
                    {std::move(code), Severity::Error, std::move(message), file, where});
            };
            if (ws_.documents[index].namespaces.count(decl.nickname)) {
                report("E-IMPORT-DUP-NICK", "nickname '" + decl.nickname + "' is already imported in this file",
                       decl.where);
                continue;
            }
            auto path = resolve_import_path(decl.file, importer_path);
            auto key = normalize_key(path);

            auto on_stack = std::find(stack.begin(), stack.end(), key);
            if (on_stack != stack.end()) {
                std::string chain;
                for (auto it = on_stack; it != stack.end(); ++it) chain += *it + " -> ";
                chain += key;
                report("E-IMPORT-CYCLE", "import cycle: " + chain, decl.file_at);
                cycle_below = true;
                continue;
            }
            if (auto cached = by_key_.find(key); cached != by_key_.end()) {
                ws_.documents[index].namespaces.emplace(decl.nickname, cached->second);
                if (cyclic_.count(cached->second)) {
                    report("E-IMPORT-CYCLE", "imported file " + key + " is part of an import cycle", decl.file_at);
                    cycle_below = true;
                }
                continue;
            }
            auto text = loader_(path);
            if (!text) {
                report("E-IMPORT-NOT-FOUND", "cannot read imported file '" + path.string() + "'", decl.file_at);
                continue;
            }
            LoadedDocument loaded;
            loaded.key = key;
            loaded.doc = load_document(SourceFile::from_text(path.string(), std::move(*text)));
            ws_.documents.push_back(std::move(loaded));
            std::size_t child = ws_.documents.size() - 1;
            by_key_.emplace(key, child);
            ws_.documents[index].namespaces.emplace(decl.nickname, child);

            stack.push_back(key);
            bool cyc = load(child, stack);
            stack.pop_back();
            if (cyc) {
                cyclic_.insert(child);
                report("E-IMPORT-CYCLE", "imported file " + key + " is part of an import cycle", decl.file_at);
                cycle_below = true;
            }
        }
        return cycle_below;
    }

    void register_root(const std::string& key) { by_key_.emplace(key, 0); }

private:
    Workspace& ws_;
    const FileLoader& loader_;
    std::map<std::string, std::size_t> by_key_;
    std::set<std::size_t> cyclic_;
};

}  // namespace

Workspace load_imports(Document root, const FileLoader& loader) {
    Workspace ws;
    LoadedDocument first;
    first.key = normalize_key(root.path);
    first.doc = std::move(root);
    ws.documents.push_back(std::move(first));

    ImportLoader il(ws, loader);
    il.register_root(ws.documents[0].key.string());
    std::vector<std::string> stack{ws.documents[0].key.string()};
    il.load(0, stack);
    return ws;
}

const ResolvedRef* Resolution::find(const MinorEntry* entry) const {
    for (const auto& r : refs)
        if (r.entry == entry) return &r;
    return nullptr;
}

PayloadKind Resolution::kind_of(const MinorEntry* entry) const {
    auto it = classes.find(entry);
    return it == classes.end() ? PayloadKind::Text : it->second.kind;
}

Resolution resolve_all(const Workspace& ws) {
    Resolution out;
    out.per_document.resize(ws.documents.size());

    for (std::size_t d = 0; d < ws.documents.size(); ++d) {
        const auto& loaded = ws.documents[d];
        Diagnostics diags(loaded.doc.path);
        for_each_block(loaded.doc.blocks, [&](const Block& block) {
            for (const auto& entry : block.minors) {
                auto cls = classify_payload(entry, diags);
                out.classes.emplace(&entry, cls);
                if (!cls.target) continue;
                const auto& ref = *cls.target;

                std::size_t target_doc = d;
                if (ref.ns) {
                    auto it = loaded.namespaces.find(*ref.ns);
                    if (it == loaded.namespaces.end()) {
                        diags.error("E-REF-UNKNOWN-NS", entry.payload_at,
                                    "namespace '" + *ref.ns + "' is not imported in this file");
                        continue;
                    }
                    target_doc = it->second;
                }
                const auto* target = ws.documents[target_doc].doc.find(ref.major, ref.name);
                if (!target) {
                    diags.error("E-REF-UNRESOLVED", entry.payload_at,
                                "no @" + ref.major + " block named '" + ref.name + "'" +
                                    (ref.ns ? " in " + *ref.ns : std::string(" in this file")));
                    continue;
                }
                out.refs.push_back({d, &entry, ref, target_doc, target});
            }
        });
        out.per_document[d] = diags.take();
    }

    // Errors of imported files surface as warnings on the import site.
    auto error_count = [&](std::size_t d) {
        const auto& loaded = ws.documents[d];
        auto n = [](const std::vector<Diagnostic>& v) {
            return std::count_if(v.begin(), v.end(), [](const Diagnostic& x) { return x.is_error(); });
        };
        return n(loaded.doc.diagnostics) + n(loaded.diagnostics) + n(out.per_document[d]);
    };
    for (std::size_t d = 0; d < ws.documents.size(); ++d) {
        const auto& loaded = ws.documents[d];
        for (const auto& decl : loaded.doc.imports) {
            auto it = loaded.namespaces.find(decl.nickname);
            if (it == loaded.namespaces.end() || it->second == d) continue;
            auto errors = error_count(it->second);
            if (errors > 0) {
                out.per_document[d].push_back({"W-IMPORT-HAS-ERRORS", Severity::Warning,
                                               "imported file '" + ws.documents[it->second].doc.path + "' has " +
                                                   std::to_string(errors) + " error(s)",
                                               loaded.doc.path, decl.file_at});
            }
        }
    }
    return out;
}

}  // namespace medford
