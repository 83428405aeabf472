#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/document.hpp"

namespace medford {

/// `@Major Name` (no namespace) or `from NS: @Major Name`.
struct RefTarget {
    std::optional<std::string> ns;
    std::string major;
    std::string name;

    friend bool operator==(const RefTarget&, const RefTarget&) = default;
};

struct PayloadClass {
    PayloadKind kind = PayloadKind::Text;
    std::optional<RefTarget> target;
};

/// Reference-shaped payloads become InternalRef/ExternalRef; malformed ones
/// get E-REF-SYNTAX and are classified as Text.
PayloadClass classify_payload(const MinorEntry& entry, Diagnostics& diags);

/// True if the payload is meant as a reference: it starts with `@`, or with
/// `from <word>:`.
bool looks_like_reference(std::string_view payload);

/// Returns the file contents, or nullopt if it cannot be read.
using FileLoader = std::function<std::optional<std::string>(const std::filesystem::path&)>;

FileLoader disk_loader();

struct LoadedDocument {
    std::filesystem::path key;  // normalized absolute path
    Document doc;
    std::map<std::string, std::size_t, std::less<>> namespaces;  // this file's own nicknames
    std::vector<Diagnostic> diagnostics;                          // import diagnostics for this file
};

/// A root document plus everything it imports, transitively. documents[0]
/// is the root; the rest follow in load order. Nicknames are file-local.
struct Workspace {
    std::vector<LoadedDocument> documents;

    const Document& root() const { return documents.front().doc; }
    /// Document bound to `nickname` in the file `from` (default: root).
    const LoadedDocument* imported(std::string_view nickname, std::size_t from = 0) const;
};

/// Resolves `file` against the importing document's directory; `~` expands
/// to $HOME.
std::filesystem::path resolve_import_path(std::string_view file, const std::filesystem::path& importer);

Workspace load_imports(Document root, const FileLoader& loader);

struct ResolvedRef {
    std::size_t source_doc = 0;
    const MinorEntry* entry = nullptr;
    RefTarget ref;
    std::size_t target_doc = 0;
    const Block* target = nullptr;
};

struct Resolution {
    std::vector<ResolvedRef> refs;
    std::map<const MinorEntry*, PayloadClass> classes;
    std::vector<std::vector<Diagnostic>> per_document;  // parallel to Workspace::documents

    const ResolvedRef* find(const MinorEntry* entry) const;
    PayloadKind kind_of(const MinorEntry* entry) const;
};

/// Links every reference in every loaded document. Also flags import sites
/// whose target file has errors (W-IMPORT-HAS-ERRORS).
Resolution resolve_all(const Workspace& ws);

}  // namespace medford
