#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/resolver.hpp"
#include "medford/schema.hpp"

namespace medford {

/// One full run of the pipeline over a root document. `resolution` points
/// into `workspace`, so an Analysis must not be copied.
struct Analysis {
    Workspace workspace;
    Resolution resolution;
    std::vector<Diagnostic> diagnostics;  // the root file's, sorted

    Analysis() = default;
    Analysis(const Analysis&) = delete;
    Analysis& operator=(const Analysis&) = delete;
    Analysis(Analysis&&) = default;
    Analysis& operator=(Analysis&&) = default;
};

/// classify -> macros -> parse -> imports -> resolve -> validate. The CLI and
/// the language server both go through here.
Analysis analyze(const std::string& path, std::string_view text, const Mode& mode,
                 const FileLoader& loader = disk_loader());

struct ModeSelection {
    std::optional<Mode> mode;
    std::vector<Diagnostic> diagnostics;
};

/// Picks the validation mode. Without a map only `base` (bundled) exists;
/// a map that does not define `base` still falls back to the bundled one.
ModeSelection select_mode(const std::string& name, const std::optional<std::filesystem::path>& mvd);

}  // namespace medford
