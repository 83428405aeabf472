#include "medford/analysis.hpp"

namespace medford {

Analysis analyze(const std::string& path, std::string_view text, const Mode& mode, const FileLoader& loader) {
    Analysis a;
    a.workspace = load_imports(load_document(SourceFile::from_text(path, std::string(text))), loader);
    a.resolution = resolve_all(a.workspace);

    const auto& root = a.workspace.documents.front();
    auto& out = a.diagnostics;
    out = root.doc.diagnostics;
    out.insert(out.end(), root.diagnostics.begin(), root.diagnostics.end());
    const auto& resolved = a.resolution.per_document.front();
    out.insert(out.end(), resolved.begin(), resolved.end());
    auto validated = validate(a.workspace, a.resolution, mode);
    out.insert(out.end(), validated.begin(), validated.end());
    sort_diagnostics(out);
    return a;
}

ModeSelection select_mode(const std::string& name, const std::optional<std::filesystem::path>& mvd) {
    ModeSelection out;
    if (!mvd) {
        if (name == "base") {
            out.mode = base_mode();
        } else {
            out.diagnostics.push_back({"E-MVD-UNKNOWN-MODE", Severity::Error,
                                       "mode '" + name + "' needs a validation map (--mvd or MEDFORD_MVD)",
                                       "<mode>", {1, 1, 0}});
        }
        return out;
    }
    auto map = load_validation_map(*mvd);
    out.diagnostics = map.diagnostics;
    if (!map.ok()) return out;
    if (name == "base" && !map.map.modes.count(name)) {
        out.mode = base_mode();
        return out;
    }
    auto loaded = load_mode(map.map, name);
    out.diagnostics.insert(out.diagnostics.end(), loaded.diagnostics.begin(), loaded.diagnostics.end());
    if (loaded.ok()) out.mode = std::move(loaded.mode);
    return out;
}

}  // namespace medford
