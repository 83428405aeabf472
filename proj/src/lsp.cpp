#include "medford/lsp.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <istream>
#include <ostream>
#include <regex>

namespace medford::lsp {

namespace {

constexpr std::size_t kMaxMessageBytes = 64u << 20;
constexpr int kParseError = -32700;
constexpr int kInvalidRequest = -32600;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kServerNotInitialized = -32002;

constexpr int kCompletionField = 5;
constexpr int kCompletionClass = 7;
constexpr int kSymbolClass = 5;

json response(const json& id, json result) { return {{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}}; }

json error_response(const json& id, int code, const std::string& message) {
    return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

json notification(const std::string& method, json params) {
    return {{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}};
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return out;
}

/// Byte offset of UTF-16 column `units` within `line`.
std::size_t utf16_to_byte(std::string_view line, std::size_t units) {
    std::size_t i = 0, seen = 0;
    while (i < line.size() && seen < units) {
        auto c = static_cast<unsigned char>(line[i]);
        std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
        seen += len == 4 ? 2 : 1;
        i = std::min(line.size(), i + len);
    }
    return i;
}

/// UTF-16 length of the first `bytes` bytes of `line`.
std::size_t byte_to_utf16(std::string_view line, std::size_t bytes) {
    std::size_t units = 0;
    for (std::size_t i = 0; i < bytes && i < line.size(); ++i) {
        auto c = static_cast<unsigned char>(line[i]);
        if ((c & 0xC0) == 0x80) continue;
        units += (c >> 3) == 0x1E ? 2 : 1;
    }
    return units + (bytes > line.size() ? bytes - line.size() : 0);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (prefix.size() > s.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i)
        if (std::tolower(static_cast<unsigned char>(s[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
            return false;
    return true;
}

std::string describe_field(const FieldSpec& f) {
    std::string s = to_string(f.type) + ", " + std::string(to_string(f.presence));
    if (f.multiple) s += ", multiple";
    return s;
}

std::string describe_token(const TokenSpec& t) {
    std::string s(to_string(t.presence));
    if (t.multiple) s += ", multiple";
    s += ", " + std::to_string(t.fields.size()) + " field(s)";
    return s;
}

json position(std::size_t line, std::size_t character) { return {{"line", line}, {"character", character}}; }

}  // namespace

std::optional<std::string> read_message(std::istream& in) {
    std::size_t length = 0;
    bool have_length = false;
    std::string header;
    while (std::getline(in, header)) {
        if (!header.empty() && header.back() == '\r') header.pop_back();
        if (header.empty()) {
            if (have_length) break;
            continue;
        }
        auto colon = header.find(':');
        if (colon == std::string::npos) continue;
        std::string name = header.substr(0, colon);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
        if (name == "content-length") {
            try {
                length = std::stoull(header.substr(colon + 1));
                have_length = true;
            } catch (const std::exception&) {
                have_length = false;
            }
        }
    }
    if (!have_length || !in || length > kMaxMessageBytes) return std::nullopt;
    std::string body(length, '\0');
    in.read(body.data(), static_cast<std::streamsize>(length));
    if (static_cast<std::size_t>(in.gcount()) != length) return std::nullopt;
    return body;
}

void write_message(std::ostream& out, const json& msg) {
    auto body = msg.dump(-1, ' ', false, json::error_handler_t::replace);
    out << "Content-Length: " << body.size() << "\r\n\r\n" << body;
    out.flush();
}

std::string uri_to_path(const std::string& uri) {
    constexpr std::string_view scheme = "file://";
    if (!uri.starts_with(scheme)) return uri;
    std::string rest = uri.substr(scheme.size());
    // drop an authority ("localhost" or empty)
    if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(slash);
    std::string out;
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == '%' && i + 2 < rest.size() && hex_value(rest[i + 1]) >= 0 && hex_value(rest[i + 2]) >= 0) {
            out += static_cast<char>(hex_value(rest[i + 1]) * 16 + hex_value(rest[i + 2]));
            i += 2;
        } else {
            out += rest[i];
        }
    }
    return out;
}

std::string path_to_uri(const std::string& path) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out = "file://";
    for (unsigned char c : std::filesystem::absolute(path).generic_string()) {
        if (std::isalnum(c) || c == '/' || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xF];
        }
    }
    return out;
}

json to_lsp(const Diagnostic& d) {
    auto line = d.where.line > 0 ? d.where.line - 1 : 0;
    auto col = d.where.col > 0 ? d.where.col - 1 : 0;
    return {{"range", {{"start", position(line, col)}, {"end", position(line, col + d.where.length)}}},
            {"severity", d.is_error() ? 1 : 2},
            {"code", d.code},
            {"source", "medford"},
            {"message", d.message}};
}

Server::Server(FileLoader loader) : loader_(std::move(loader)), mode_(base_mode()) {}

std::vector<json> Server::handle(const json& msg) {
    std::vector<json> out;
    if (!msg.is_object() || !msg.contains("method") || !msg["method"].is_string()) {
        if (msg.is_object() && msg.contains("id") && !msg.contains("result") && !msg.contains("error"))
            out.push_back(error_response(msg["id"], kInvalidRequest, "missing method"));
        return out;
    }
    const std::string method = msg["method"];
    const bool is_request = msg.contains("id");
    const json id = is_request ? msg["id"] : json();
    const json params = msg.value("params", json::object());

    if (method == "exit") {
        exited_ = true;
        return out;
    }
    if (!initialized_ && method != "initialize") {
        if (is_request) out.push_back(error_response(id, kServerNotInitialized, "server not initialized"));
        return out;
    }
    if (shutdown_) {
        if (is_request) out.push_back(error_response(id, kInvalidRequest, "server is shutting down"));
        return out;
    }

    try {
        if (method == "initialize") {
            if (!is_request) return out;
            if (initialized_) {
                out.push_back(error_response(id, kInvalidRequest, "initialize was already received"));
                return out;
            }
            initialized_ = true;
            auto result = initialize(params);
            out.push_back(response(id, result));
            if (result.contains("_warning")) {
                out.back()["result"].erase("_warning");
                out.push_back(notification("window/showMessage",
                                           {{"type", 2}, {"message", result["_warning"].get<std::string>()}}));
            }
        } else if (method == "initialized") {
        } else if (method == "shutdown") {
            shutdown_ = true;
            if (is_request) out.push_back(response(id, nullptr));
        } else if (method == "textDocument/didOpen") {
            const auto& doc = params.at("textDocument");
            update(doc.at("uri"), doc.value("version", 0LL), doc.at("text"), out);
        } else if (method == "textDocument/didChange") {
            const auto& doc = params.at("textDocument");
            const auto& changes = params.at("contentChanges");
            if (changes.empty()) return out;
            update(doc.at("uri"), doc.value("version", 0LL), changes.back().at("text"), out);
        } else if (method == "textDocument/didClose") {
            std::string uri = params.at("textDocument").at("uri");
            documents_.erase(uri);
            out.push_back(notification("textDocument/publishDiagnostics",
                                       {{"uri", uri}, {"diagnostics", json::array()}}));
        } else if (method == "textDocument/completion") {
            if (is_request) out.push_back(response(id, completion(params)));
        } else if (method == "textDocument/documentSymbol") {
            if (is_request) out.push_back(response(id, symbols(params)));
        } else if (is_request) {
            out.push_back(error_response(id, kMethodNotFound, "unknown method " + method));
        }
    } catch (const json::exception& e) {
        if (is_request) out.push_back(error_response(id, kInvalidParams, e.what()));
    }
    return out;
}

json Server::initialize(const json& params) {
    std::string name = "base";
    std::optional<std::filesystem::path> mvd;
    if (const char* env = std::getenv("MEDFORD_MVD"); env && *env) mvd = env;
    if (auto opts = params.find("initializationOptions"); opts != params.end() && opts->is_object()) {
        if (opts->contains("mode") && (*opts)["mode"].is_string()) name = (*opts)["mode"];
        if (opts->contains("mvd") && (*opts)["mvd"].is_string()) mvd = (*opts)["mvd"].get<std::string>();
    }

    json result = {
        {"capabilities",
         {{"textDocumentSync", {{"openClose", true}, {"change", 1}}},
          {"completionProvider", {{"triggerCharacters", {"@", "-"}}}},
          {"documentSymbolProvider", true}}},
        {"serverInfo", {{"name", "medford"}}}};

    auto selected = select_mode(name, mvd);
    if (selected.mode) {
        mode_ = std::move(*selected.mode);
    } else {
        std::string why = selected.diagnostics.empty() ? "unknown error" : selected.diagnostics.front().message;
        result["_warning"] = "cannot load mode '" + name + "' (" + why + "); using base";
    }
    return result;
}

void Server::update(const std::string& uri, long long version, std::string text, std::vector<json>& out) {
    auto it = documents_.find(uri);
    if (it != documents_.end() && version <= it->second.version) return;  // stale

    OpenDocument doc;
    doc.version = version;
    doc.text = std::move(text);
    auto path = uri_to_path(uri);
    try {
        doc.analysis = analyze(path, doc.text, mode_, loader_);
        doc.diagnostics = doc.analysis.diagnostics;
    } catch (const std::exception& e) {
        doc.analysis = Analysis{};
        doc.diagnostics = {{"E-INTERNAL", Severity::Error, std::string("internal error: ") + e.what(), path, {1, 1, 0}}};
    }
    documents_.insert_or_assign(uri, std::move(doc));
    out.push_back(publish(uri));
}

json Server::publish(const std::string& uri) const {
    const auto& doc = documents_.at(uri);
    json diags = json::array();
    auto lines = split_lines(doc.text);
    for (const auto& d : doc.diagnostics) {
        auto lsp = to_lsp(d);
        // LSP columns are UTF-16 units
        if (d.where.line >= 1 && d.where.line <= lines.size()) {
            auto line = lines[d.where.line - 1];
            auto start = d.where.col > 0 ? d.where.col - 1 : 0;
            lsp["range"]["start"]["character"] = byte_to_utf16(line, start);
            lsp["range"]["end"]["character"] = byte_to_utf16(line, start + d.where.length);
        }
        diags.push_back(std::move(lsp));
    }
    return notification("textDocument/publishDiagnostics",
                        {{"uri", uri}, {"version", doc.version}, {"diagnostics", diags}});
}

json Server::completion(const json& params) const {
    json items = json::array();
    auto it = documents_.find(params.at("textDocument").at("uri").get<std::string>());
    if (it == documents_.end()) return items;
    auto lines = split_lines(it->second.text);
    std::size_t line_no = params.at("position").at("line");
    std::size_t character = params.at("position").at("character");
    if (line_no >= lines.size()) return items;
    auto line = lines[line_no];
    std::string prefix(line.substr(0, utf16_to_byte(line, character)));

    static const std::regex minor_re(R"(^@([A-Za-z0-9_]+)-([A-Za-z0-9_]*)$)");
    static const std::regex major_re(R"(^@([A-Za-z0-9_]*)$)");
    std::smatch m;
    if (std::regex_match(prefix, m, minor_re)) {
        const auto* token = mode_.token(m[1].str());
        if (!token) return items;
        for (const auto& f : token->fields) {
            if (!starts_with_ci(f.minor, m[2].str())) continue;
            items.push_back({{"label", f.minor}, {"kind", kCompletionField}, {"detail", describe_field(f)},
                             {"insertText", f.minor}});
        }
    } else if (std::regex_match(prefix, m, major_re)) {
        for (const auto& t : mode_.tokens) {
            if (!starts_with_ci(t.major, m[1].str())) continue;
            items.push_back({{"label", t.major}, {"kind", kCompletionClass}, {"detail", describe_token(t)},
                             {"insertText", t.major}});
        }
    }
    return items;
}

json Server::symbols(const json& params) const {
    json out = json::array();
    auto it = documents_.find(params.at("textDocument").at("uri").get<std::string>());
    if (it == documents_.end() || it->second.analysis.workspace.documents.empty()) return out;
    auto lines = split_lines(it->second.text);
    auto line_end = [&](std::size_t line) -> std::size_t {
        return line >= 1 && line <= lines.size() ? byte_to_utf16(lines[line - 1], lines[line - 1].size()) : 0;
    };

    std::function<json(const Block&)> symbol = [&](const Block& b) {
        std::size_t first = b.where.line > 0 ? b.where.line - 1 : 0;
        std::size_t last = std::max(b.last_line, b.where.line);
        json children = json::array();
        for (const auto& c : b.children) children.push_back(symbol(c));
        return json{{"name", "@" + b.major + (b.name.empty() ? "" : " " + b.name.substr(0, b.name.find('\n')))},
                    {"kind", kSymbolClass},
                    {"range", {{"start", position(first, 0)}, {"end", position(last - 1, line_end(last))}}},
                    {"selectionRange", {{"start", position(first, 0)}, {"end", position(first, line_end(first + 1))}}},
                    {"children", children}};
    };
    for (const auto& b : it->second.analysis.workspace.root().blocks) out.push_back(symbol(b));
    return out;
}

int run(std::istream& in, std::ostream& out) {
    Server server;
    while (!server.exited()) {
        auto body = read_message(in);
        if (!body) break;
        json msg;
        try {
            msg = json::parse(*body);
        } catch (const json::exception& e) {
            write_message(out, error_response(nullptr, kParseError, e.what()));
            continue;
        }
        for (const auto& reply : server.handle(msg)) write_message(out, reply);
    }
    return server.exit_code();
}

}  // namespace medford::lsp
