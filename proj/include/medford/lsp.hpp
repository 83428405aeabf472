#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "medford/analysis.hpp"

namespace medford::lsp {

using json = nlohmann::json;

/// Reads one `Content-Length` framed message body; nullopt at end of input.
std::optional<std::string> read_message(std::istream& in);
void write_message(std::ostream& out, const json& msg);

std::string uri_to_path(const std::string& uri);
std::string path_to_uri(const std::string& path);

/// LSP form of a diagnostic: 0-based range, severity 1 (error) or 2 (warning).
json to_lsp(const Diagnostic& d);

class Server {
public:
    explicit Server(FileLoader loader = disk_loader());

    /// Handles one decoded message and returns what should be sent back, in
    /// order (responses and notifications).
    std::vector<json> handle(const json& msg);

    bool exited() const { return exited_; }
    int exit_code() const { return shutdown_ ? 0 : 1; }

private:
    struct OpenDocument {
        long long version = 0;
        std::string text;
        Analysis analysis;
        std::vector<Diagnostic> diagnostics;
    };

    json initialize(const json& params);
    json completion(const json& params) const;
    json symbols(const json& params) const;
    void update(const std::string& uri, long long version, std::string text, std::vector<json>& out);
    json publish(const std::string& uri) const;

    FileLoader loader_;
    Mode mode_;
    bool initialized_ = false;
    bool shutdown_ = false;
    bool exited_ = false;
    std::map<std::string, OpenDocument> documents_;
};

/// Serves until `exit` or end of input; returns the process exit status.
int run(std::istream& in, std::ostream& out);

}  // namespace medford::lsp
