#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "medford/diagnostic.hpp"
#include "medford/resolver.hpp"

namespace medford::bagit {

/// `_Primary` and `_Copy` files travel inside the bag and are hashed;
/// `_Ref` locators stay outside it.
enum class Role { Primary, Copy, Ref };

std::string_view to_string(Role r);

struct FileRole {
    Role role = Role::Primary;
    std::string token;            // e.g. "Data_Primary" or "Photo-File_Copy"
    std::size_t document = 0;     // index into Workspace::documents
    std::string payload;          // path or locator as written
    std::filesystem::path path;   // resolved local path (Primary/Copy)
    Location where;
};

/// A tag occurrence inside one document, before any filesystem lookup.
struct TaggedFile {
    Role role;
    std::string token;
    std::string payload;
    Location where;
};

/// Every token ending in _Primary/_Copy/_Ref. Blocks use their `Path` minor
/// when present, otherwise the block name; minors use their payload.
std::vector<TaggedFile> tagged_files(const Document& doc);

struct FileRoles {
    std::vector<FileRole> roles;
    std::vector<Diagnostic> diagnostics;
};

/// E-FILE-MISSING for Primary/Copy paths that are not regular files.
FileRoles collect_file_roles(const Workspace& ws);

struct ManifestEntry {
    std::string hash;  // lowercase hex
    std::string path;  // "data/..."

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct BagManifest {
    std::string algorithm = "sha256";
    std::vector<ManifestEntry> entries;  // sorted by path

    friend bool operator==(const BagManifest&, const BagManifest&) = default;
};

/// `hash  path` lines, with CR, LF and % in paths percent-encoded.
std::string format_manifest(const BagManifest& m);

struct BagOptions {
    std::string bagging_date;  // YYYY-MM-DD; empty means today (UTC)
};

struct BagResult {
    BagManifest manifest;
    std::vector<Diagnostic> diagnostics;
    bool written = false;
};

/// Writes a BagIt 1.0 zip at `out`: bagit.txt, bag-info.txt,
/// manifest-sha256.txt and data/ with every loaded `.mfd` plus each
/// Primary/Copy file. Nothing is written if any error is found first.
BagResult create_bag(const Workspace& ws, const std::vector<FileRole>& roles, const std::filesystem::path& out,
                     const BagOptions& options = {});

/// Checks structure, hashes, orphans, Payload-Oxum and tag coverage.
std::vector<Diagnostic> verify_bag(const std::filesystem::path& zip_path);
std::vector<Diagnostic> verify_bag_bytes(std::string_view archive, const std::string& name);

}  // namespace medford::bagit
