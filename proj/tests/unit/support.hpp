#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "medford/analysis.hpp"

namespace test {

inline std::filesystem::path data(const std::string& rel) { return std::filesystem::path(MEDFORD_TEST_DATA) / rel; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

inline std::vector<std::string> codes(const std::vector<medford::Diagnostic>& diags) {
    std::vector<std::string> out;
    for (const auto& d : diags) out.push_back(d.code);
    return out;
}

/// In-memory files for import tests.
inline medford::FileLoader memory_loader(std::map<std::string, std::string> files) {
    return [files = std::move(files)](const std::filesystem::path& p) -> std::optional<std::string> {
        auto it = files.find(p.lexically_normal().generic_string());
        if (it == files.end()) return std::nullopt;
        return it->second;
    };
}

inline medford::Document doc_of(const std::string& text, const std::string& path = "t.mfd") {
    return medford::load_document(medford::SourceFile::from_text(path, text));
}

inline std::vector<std::string> analyze_codes(const std::string& text, const std::string& path = "/virtual/t.mfd",
                                              const medford::FileLoader& loader = memory_loader({})) {
    return codes(medford::analyze(path, text, medford::base_mode(), loader).diagnostics);
}

/// A scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("medford-" + tag + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace test
