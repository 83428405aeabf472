#include "medford/bagit.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "medford/sha256.hpp"
#include "medford/zip.hpp"

namespace medford::bagit {

namespace fs = std::filesystem;

std::string_view to_string(Role r) {
    switch (r) {
        case Role::Primary: return "Primary";
        case Role::Copy: return "Copy";
        case Role::Ref: return "Ref";
    }
    return "?";
}

namespace {

constexpr std::string_view kBagitTxt = "bagit.txt";
constexpr std::string_view kBagInfo = "bag-info.txt";
constexpr std::string_view kManifest = "manifest-sha256.txt";
constexpr std::string_view kRelocatedLabel = "MEDFORD-Relocated";
constexpr std::string_view kRelocationSep = " | ";

std::optional<Role> role_of(std::string_view token) {
    if (token.ends_with("_Primary")) return Role::Primary;
    if (token.ends_with("_Copy")) return Role::Copy;
    if (token.ends_with("_Ref")) return Role::Ref;
    return std::nullopt;
}

std::string first_line(std::string_view s) { return std::string(s.substr(0, s.find('\n'))); }

std::optional<std::string> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string today_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

std::string encode_path(std::string_view p) {
    std::string out;
    for (char c : p) {
        if (c == '%') out += "%25";
        else if (c == '\r') out += "%0D";
        else if (c == '\n') out += "%0A";
        else out += c;
    }
    return out;
}

std::string decode_path(std::string_view p) {
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == '%' && i + 2 < p.size()) {
            auto code = p.substr(i + 1, 2);
            if (code == "25") { out += '%'; i += 2; continue; }
            if (code == "0D" || code == "0d") { out += '\r'; i += 2; continue; }
            if (code == "0A" || code == "0a") { out += '\n'; i += 2; continue; }
        }
        out += p[i];
    }
    return out;
}

/// `dir/payload` when the payload is a plain relative path that stays below
/// its document's directory.
std::optional<std::string> mirrored_path(std::string_view doc_data_path, std::string_view payload) {
    if (payload.empty() || payload.starts_with("~")) return std::nullopt;
    fs::path p{std::string(payload)};
    if (p.is_absolute() || p.has_root_name()) return std::nullopt;
    auto normal = p.lexically_normal();
    if (normal.empty() || normal == ".") return std::nullopt;
    if (*normal.begin() == "..") return std::nullopt;
    auto dir = fs::path(std::string(doc_data_path)).parent_path();
    return (dir / normal).generic_string();
}

std::string with_suffix(const std::string& path, int n) {
    fs::path p(path);
    auto stem = p.stem().string();
    auto ext = p.extension().string();
    return (p.parent_path() / (stem + "-" + std::to_string(n) + ext)).generic_string();
}

struct Relocation {
    std::string document;  // data path of the .mfd that names the file
    std::string payload;
    std::string data_path;
};

std::string relocation_value(const Relocation& r) {
    return r.document + std::string(kRelocationSep) + r.payload + std::string(kRelocationSep) + r.data_path;
}

std::optional<Relocation> parse_relocation(std::string_view value) {
    auto a = value.find(kRelocationSep);
    auto b = value.rfind(kRelocationSep);
    if (a == std::string_view::npos || a == b) return std::nullopt;
    return Relocation{std::string(value.substr(0, a)),
                      std::string(value.substr(a + kRelocationSep.size(), b - a - kRelocationSep.size())),
                      std::string(value.substr(b + kRelocationSep.size()))};
}

/// label -> values, in order. Continuation lines (leading whitespace) are folded.
std::vector<std::pair<std::string, std::string>> parse_tag_file(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if ((line[0] == ' ' || line[0] == '\t') && !out.empty()) {
            out.back().second += " " + std::string(trim(line));
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        out.emplace_back(std::string(trim(std::string_view(line).substr(0, colon))),
                         std::string(trim(std::string_view(line).substr(colon + 1))));
    }
    return out;
}

}  // namespace

std::vector<TaggedFile> tagged_files(const Document& doc) {
    std::vector<TaggedFile> out;
    for_each_block(doc.blocks, [&](const Block& b) {
        if (auto role = role_of(b.major)) {
            const auto* path = b.first("Path");
            if (path && !path->payload.empty())
                out.push_back({*role, b.major, std::string(trim(first_line(path->payload))), path->payload_at});
            else
                out.push_back({*role, b.major, std::string(trim(first_line(b.name))), b.name_at});
        }
        for (const auto& m : b.minors) {
            if (auto role = role_of(m.minor))
                out.push_back({*role, b.major + "-" + m.minor, std::string(trim(first_line(m.payload))),
                               m.payload_at});
        }
    });
    return out;
}

FileRoles collect_file_roles(const Workspace& ws) {
    FileRoles out;
    for (std::size_t d = 0; d < ws.documents.size(); ++d) {
        const auto& doc = ws.documents[d].doc;
        Diagnostics diags(doc.path);
        for (auto& t : tagged_files(doc)) {
            FileRole fr{t.role, t.token, d, t.payload, {}, t.where};
            if (t.role != Role::Ref) {
                if (t.payload.empty()) {
                    diags.error("E-FILE-MISSING", t.where, "@" + t.token + " names no file");
                    continue;
                }
                fr.path = resolve_import_path(t.payload, fs::path(doc.path));
                std::error_code ec;
                if (!fs::is_regular_file(fr.path, ec)) {
                    diags.error("E-FILE-MISSING", t.where,
                                "@" + t.token + " file '" + t.payload + "' does not exist (looked for " +
                                    fr.path.string() + ")");
                    continue;
                }
            }
            out.roles.push_back(std::move(fr));
        }
        auto d_items = diags.take();
        out.diagnostics.insert(out.diagnostics.end(), d_items.begin(), d_items.end());
    }
    return out;
}

std::string format_manifest(const BagManifest& m) {
    std::string out;
    for (const auto& e : m.entries) out += e.hash + "  " + encode_path(e.path) + "\n";
    return out;
}

BagResult create_bag(const Workspace& ws, const std::vector<FileRole>& roles, const fs::path& out_path,
                     const BagOptions& options) {
    BagResult result;
    Diagnostics diags(ws.root().path);

    struct Staged {
        std::string source;  // normalized source path
        std::string content;
        bool is_document = false;
    };
    std::map<std::string, Staged> staged;          // data path -> file
    std::map<std::string, std::string> by_source;  // source -> data path
    std::vector<Relocation> relocations;
    std::vector<std::string> doc_data_paths(ws.documents.size());

    // Diagnostics about a tag belong to the document that holds it.
    auto report = [&](std::size_t doc, Severity severity, std::string code, Location where, std::string message) {
        diags.add({std::move(code), severity, std::move(message), ws.documents[doc].doc.path, where});
    };
    auto claim = [&](const std::string& wanted, std::size_t doc, const Location& where) {
        std::string path = wanted;
        for (int n = 2; staged.count(path); ++n) path = with_suffix(wanted, n);
        if (path != wanted)
            report(doc, Severity::Warning, "W-BAG-RENAME", where,
                   "'" + wanted + "' is already taken; stored as '" + path + "'");
        return path;
    };

    // Documents: the root at data/<name>, imports mirrored below the root's
    // directory when possible.
    const fs::path root_dir = fs::path(ws.documents[0].key).parent_path();
    for (std::size_t d = 0; d < ws.documents.size(); ++d) {
        const auto& loaded = ws.documents[d];
        auto text = read_file(loaded.doc.path);
        if (!text) {
            report(d, Severity::Error, "E-BAG-IO", {1, 1, 0}, "cannot read " + loaded.doc.path);
            continue;
        }
        std::string wanted;
        if (d == 0) {
            wanted = "data/" + fs::path(loaded.doc.path).filename().string();
        } else {
            auto rel = loaded.key.lexically_relative(root_dir);
            if (!rel.empty() && *rel.begin() != "..")
                wanted = "data/" + rel.generic_string();
            else
                wanted = "data/" + loaded.key.filename().string();
        }
        auto path = claim(wanted, d, {1, 1, 0});
        staged[path] = {loaded.key.string(), std::move(*text), true};
        by_source[loaded.key.string()] = path;
        doc_data_paths[d] = path;
    }

    // Tagged payload files, mirrored relative to their document. Files that
    // can be mirrored claim their paths before relocated ones.
    std::set<std::string> tagged_sources;
    for (int pass = 0; pass < 2; ++pass)
    for (const auto& role : roles) {
        if (role.role == Role::Ref) continue;
        const auto& doc_path = doc_data_paths.at(role.document);
        if (mirrored_path(doc_path, role.payload).has_value() != (pass == 0)) continue;
        std::error_code ec;
        if (!fs::is_regular_file(role.path, ec)) {
            report(role.document, Severity::Error, "E-FILE-MISSING", role.where,
                   "@" + role.token + " file '" + role.payload + "' does not exist");
            continue;
        }
        auto source = fs::weakly_canonical(role.path, ec).string();
        if (ec) source = fs::absolute(role.path).lexically_normal().string();
        tagged_sources.insert(source);
        auto mirror = mirrored_path(doc_path, role.payload);

        std::string path;
        if (auto it = by_source.find(source); it != by_source.end()) {
            path = it->second;
        } else {
            auto wanted = mirror ? *mirror
                                 : (fs::path(doc_path).parent_path() / role.path.filename()).generic_string();
            path = claim(wanted, role.document, role.where);
            auto content = read_file(role.path);
            if (!content) {
                report(role.document, Severity::Error, "E-BAG-IO", role.where, "cannot read " + role.path.string());
                continue;
            }
            staged[path] = {source, std::move(*content), false};
            by_source[source] = path;
        }
        if (!mirror || *mirror != path) relocations.push_back({doc_path, role.payload, path});
    }

    for (const auto& [path, file] : staged) {
        if (!file.is_document && !tagged_sources.count(file.source))
            diags.error("E-FILE-UNTAGGED", {1, 1, 0}, "'" + path + "' was staged without a _Primary or _Copy tag");
    }

    result.diagnostics = diags.take();
    if (has_errors(result.diagnostics)) return result;

    std::uint64_t octets = 0;
    for (const auto& [path, file] : staged) {
        result.manifest.entries.push_back({sha256_hex(file.content), path});
        octets += file.content.size();
    }

    std::string bagit_txt = "BagIt-Version: 1.0\nTag-File-Character-Encoding: UTF-8\n";
    std::string info = "Bag-Software-Agent: medford\n";
    info += "Bagging-Date: " + (options.bagging_date.empty() ? today_utc() : options.bagging_date) + "\n";
    info += "Payload-Oxum: " + std::to_string(octets) + "." + std::to_string(staged.size()) + "\n";
    for (const auto& r : relocations) info += std::string(kRelocatedLabel) + ": " + relocation_value(r) + "\n";

    std::vector<zip::Entry> entries;
    entries.push_back({std::string(kBagitTxt), bagit_txt});
    entries.push_back({std::string(kBagInfo), info});
    entries.push_back({std::string(kManifest), format_manifest(result.manifest)});
    for (auto& [path, file] : staged) entries.push_back({path, std::move(file.content)});

    try {
        auto bytes = zip::write(entries);
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("E-BAG-IO", "cannot open " + out_path.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("E-BAG-IO", "failed writing " + out_path.string());
    } catch (const Error& e) {
        result.diagnostics.push_back({e.code(), Severity::Error, e.what(), out_path.string(), {1, 1, 0}});
        return result;
    }
    result.written = true;
    return result;
}

std::vector<Diagnostic> verify_bag(const fs::path& zip_path) {
    auto bytes = read_file(zip_path);
    if (!bytes)
        return {{"E-BAG-STRUCTURE", Severity::Error, "cannot read bag", zip_path.string(), {1, 1, 0}}};
    return verify_bag_bytes(*bytes, zip_path.string());
}

std::vector<Diagnostic> verify_bag_bytes(std::string_view archive, const std::string& name) {
    std::vector<Diagnostic> out;
    auto report = [&](std::string code, std::string_view member, std::size_t line, std::string message) {
        out.push_back({std::move(code), Severity::Error, std::move(message),
                       member.empty() ? name : name + "/" + std::string(member), {line, 1, 0}});
    };

    std::vector<zip::Entry> entries;
    try {
        entries = zip::read(archive);
    } catch (const Error& e) {
        report("E-BAG-STRUCTURE", {}, 1, e.what());
        return out;
    }

    std::map<std::string, std::string> files;
    for (auto& e : entries) files[e.name] = std::move(e.data);

    // Accept a single top-level directory wrapping the bag.
    if (!files.count(std::string(kBagitTxt))) {
        std::string prefix;
        for (const auto& [n, _] : files) {
            if (n.ends_with("/" + std::string(kBagitTxt)) &&
                std::count(n.begin(), n.end(), '/') == 1) {
                prefix = n.substr(0, n.size() - kBagitTxt.size());
                break;
            }
        }
        if (!prefix.empty()) {
            std::map<std::string, std::string> stripped;
            for (auto& [n, d] : files)
                if (n.starts_with(prefix)) stripped[n.substr(prefix.size())] = std::move(d);
            files = std::move(stripped);
        }
    }

    // (a) structure
    auto bagit = files.find(std::string(kBagitTxt));
    if (bagit == files.end()) {
        report("E-BAG-STRUCTURE", {}, 1, "bagit.txt is missing");
    } else {
        auto tags = parse_tag_file(bagit->second);
        bool version = false, encoding = false;
        for (const auto& [label, value] : tags) {
            version = version || label == "BagIt-Version";
            encoding = encoding || label == "Tag-File-Character-Encoding";
        }
        if (!version || !encoding)
            report("E-BAG-STRUCTURE", kBagitTxt, 1,
                   "bagit.txt must declare BagIt-Version and Tag-File-Character-Encoding");
    }
    auto manifest = files.find(std::string(kManifest));
    if (manifest == files.end()) {
        report("E-BAG-STRUCTURE", {}, 1, "manifest-sha256.txt is missing");
        return out;
    }

    // (b) manifest hashes
    std::set<std::string> listed;
    {
        std::istringstream in(manifest->second);
        std::string line;
        std::size_t number = 0;
        while (std::getline(in, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            auto ws = line.find_first_of(" \t");
            auto hash = line.substr(0, ws);
            auto rest = ws == std::string::npos ? std::string() : std::string(trim(std::string_view(line).substr(ws)));
            bool hex = hash.size() == 64 && std::all_of(hash.begin(), hash.end(), [](char c) {
                           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
                       });
            auto path = decode_path(rest);
            if (!hex || path.empty()) {
                report("E-BAG-STRUCTURE", kManifest, number, "malformed manifest line");
                continue;
            }
            if (!path.starts_with("data/") || fs::path(path).lexically_normal().generic_string() != path ||
                path.find("..") != std::string::npos) {
                report("E-BAG-STRUCTURE", kManifest, number, "manifest path '" + path + "' is outside data/");
                continue;
            }
            listed.insert(path);
            auto f = files.find(path);
            if (f == files.end()) {
                report("E-BAG-MISSING-FILE", kManifest, number, "'" + path + "' is listed but not in the bag");
                continue;
            }
            std::transform(hash.begin(), hash.end(), hash.begin(), [](unsigned char c) { return std::tolower(c); });
            if (sha256_hex(f->second) != hash)
                report("E-BAG-HASH", kManifest, number, "checksum mismatch for '" + path + "'");
        }
    }

    // (c) orphans and (d) Payload-Oxum
    std::uint64_t octets = 0;
    std::uint64_t count = 0;
    for (const auto& [n, data] : files) {
        if (!n.starts_with("data/")) continue;
        octets += data.size();
        ++count;
        if (!listed.count(n)) report("E-BAG-ORPHAN-FILE", n, 1, "'" + n + "' is not listed in the manifest");
    }

    std::vector<Relocation> relocations;
    if (auto info = files.find(std::string(kBagInfo)); info != files.end()) {
        for (const auto& [label, value] : parse_tag_file(info->second)) {
            if (label == "Payload-Oxum") {
                auto expected = std::to_string(octets) + "." + std::to_string(count);
                if (value != expected)
                    report("E-BAG-OXUM", kBagInfo, 1, "Payload-Oxum is " + value + " but the payload is " + expected);
            } else if (label == kRelocatedLabel) {
                if (auto r = parse_relocation(value)) relocations.push_back(std::move(*r));
            }
        }
    }

    // (e) every embedded document parses and its tagged files are present
    for (const auto& [n, data] : files) {
        if (!n.starts_with("data/") || !n.ends_with(".mfd")) continue;
        auto doc = load_document(SourceFile::from_text(n, data));
        auto errors = std::count_if(doc.diagnostics.begin(), doc.diagnostics.end(),
                                    [](const Diagnostic& d) { return d.is_error(); });
        if (errors > 0)
            report("E-BAG-STRUCTURE", n, 1, "embedded document has " + std::to_string(errors) + " parse error(s)");
        for (const auto& t : tagged_files(doc)) {
            if (t.role == Role::Ref) continue;
            std::optional<std::string> expected;
            for (const auto& r : relocations)
                if (r.document == n && r.payload == t.payload) expected = r.data_path;
            if (!expected) expected = mirrored_path(n, t.payload);
            if (!expected || !files.count(*expected))
                report("E-BAG-MISSING-FILE", n, t.where.line,
                       "@" + t.token + " file '" + t.payload + "' is not in the bag");
        }
    }
    return out;
}

}  // namespace medford::bagit
