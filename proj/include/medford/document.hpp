#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/macro.hpp"
#include "medford/source.hpp"

namespace medford {

enum class PayloadKind { Text, InternalRef, ExternalRef, FilePath, URI };

std::string_view to_string(PayloadKind k);

struct MinorEntry {
    std::string minor;
    std::string payload;  // expanded; lines joined with '\n'
    PayloadKind payload_kind = PayloadKind::Text;
    Location where;       // the token line
    Location payload_at;  // first line of the payload
    std::size_t last_line = 0;
};

struct Block {
    std::string major;
    std::string name;
    std::vector<MinorEntry> minors;
    std::vector<Block> children;
    Location where;
    Location name_at;
    std::size_t last_line = 0;

    /// Minor entries named `minor`, in order.
    std::vector<const MinorEntry*> entries(std::string_view minor) const;
    const MinorEntry* first(std::string_view minor) const;
};

struct ImportDecl {
    std::string nickname;
    std::string file;
    Location where;
    Location file_at;
};

/// Parsed model of one `.mfd` file. Macro definitions are kept in `macros`;
/// every payload in `blocks` is already expanded.
struct Document {
    std::string path;
    MacroTable macros;
    std::vector<Block> blocks;
    std::vector<ImportDecl> imports;
    std::vector<Diagnostic> diagnostics;

    /// Pre-order search over blocks and sub-blocks.
    const Block* find(std::string_view major, std::string_view name) const;
};

inline constexpr std::string_view kImportMajor = "Import";
inline constexpr std::string_view kImportFileMinor = "File";

/// Builds blocks from a macro-expanded line stream.
Document parse(const std::vector<RawLine>& lines, std::string path, MacroTable macros = {});

/// Classify, collect macros, expand, parse; all diagnostics end up in the
/// returned document.
Document load_document(const SourceFile& file);

/// Canonical `.mfd` text, fully expanded, top-level blocks separated by one
/// blank line.
std::string serialize(const Document& doc);
std::string serialize(const Block& block);

/// Equality of block trees ignoring source positions.
bool structurally_equal(const Block& a, const Block& b);
bool structurally_equal(const Document& a, const Document& b);

/// Calls `fn(block)` for every block, parents before children.
template <typename Fn>
void for_each_block(const std::vector<Block>& blocks, Fn&& fn) {
    for (const auto& b : blocks) {
        fn(b);
        for_each_block(b.children, fn);
    }
}

}  // namespace medford
