// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "corpus.hpp"
#include "dialect.hpp"
#include "json.hpp"
#include "medford/analysis.hpp"
#include "medford/exif.hpp"
#include "medford/lsp.hpp"
#include "medford/zip.hpp"

using namespace medford;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

fs::path data(const std::string& rel) { return fs::path(MEDFORD_TEST_DATA) / rel; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

struct Run {
    int status = -1;
    std::string out;
};

/// Runs a shell command under a wall-clock limit and captures its stdout.
/// Status 124 means the limit was hit.
Run run(const std::string& command, int seconds = 5) {
    Run r;
    std::string full = "timeout " + std::to_string(seconds) + " " + command;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw Failure("cannot run: " + command);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string cli() { return quote(MEDFORD_CLI); }

std::vector<json> json_lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("medford-accept-" + tag + "-" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::size_t count(const std::vector<Diagnostic>& diags, Severity s) {
    std::size_t n = 0;
    for (const auto& d : diags) n += d.severity == s;
    return n;
}

std::string codes_of(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) out += (out.empty() ? "" : ",") + d.code;
    return out.empty() ? "none" : out;
}

Mode institution_mode() {
    auto sel = select_mode("institution", data("fixtures/schemas/MEDFORD.mvd"));
    expect(sel.mode.has_value() && sel.diagnostics.empty(), "institution mode did not load");
    return *sel.mode;
}

// 1
std::string golden_expand() {
    auto r = run(cli() + " expand " + quote(data("fixtures/expand/input.mfd").string()));
    expect(r.status == 0, "expand exited " + std::to_string(r.status));
    expect(r.out == slurp(data("fixtures/expand/expected.mfd")), "expand output differs from golden file:\n" + r.out);
    return "";
}

// 2
std::string dialect_equivalence() {
    std::mt19937 rng(20261015);
    for (int i = 0; i < 50; ++i) {
        auto r = dialect::generate(rng);
        auto a = load_document(SourceFile::from_text("v1.mfd", r.v1));
        auto b = load_document(SourceFile::from_text("v2.mfd", r.v2));
        std::string tag = "document " + std::to_string(i) + ": ";
        expect(a.diagnostics.empty(), tag + "v1 rendering has diagnostics " + codes_of(a.diagnostics));
        expect(b.diagnostics.empty(), tag + "v2 rendering has diagnostics " + codes_of(b.diagnostics));
        expect(structurally_equal(a, b), tag + "expanded documents differ");
    }
    return "50 documents";
}

// 3
std::string name_uniqueness() {
    auto check = [](const std::string& rel) {
        auto p = data(rel);
        return analyze(p.string(), slurp(p), base_mode()).diagnostics;
    };
    auto different = check("corpus/same_name_different_major.mfd");
    expect(different.empty(), "same name under different majors reported " + codes_of(different));
    auto same = check("corpus/duplicate_name.mfd");
    expect(same.size() == 1 && same[0].code == "E-DUPLICATE-NAME",
           "same name under one major reported " + codes_of(same));
    return "";
}

// 4
std::string import_resolution() {
    auto p = data("fixtures/corals/reefs.mfd");
    auto a = analyze(p.string(), slurp(p), base_mode());
    expect(!has_errors(a.diagnostics), "CoralsMFD fixture reported " + codes_of(a.diagnostics));
    const MinorEntry* entry = nullptr;
    for_each_block(a.workspace.root().blocks, [&](const Block& b) {
        if (b.major == "Reef")
            if (auto e = b.first("Species")) entry = e;
    });
    expect(entry != nullptr, "no @Reef-Species entry");
    auto ref = a.resolution.find(entry);
    expect(ref && ref->target, "reference did not resolve");
    expect(ref->target->major == "Species" && ref->target->name == "P.Dam", "resolved to the wrong block");
    const auto& target_file = a.workspace.documents.at(ref->target_doc).key;
    expect(target_file.filename() == "corals_metadata.mfd", "resolved into " + target_file.string());

    auto r = run(cli() + " validate --format json " + quote(data("fixtures/cycle/a.mfd").string()));
    expect(r.status != 124, "cyclic import did not terminate within 5 s");
    bool cycle = false;
    for (const auto& d : json_lines(r.out)) cycle |= d["code"] == "E-IMPORT-CYCLE";
    expect(cycle && r.status == 1, "cyclic import did not report E-IMPORT-CYCLE");
    return "";
}

// 5
std::string schema_validation() {
    auto mode = institution_mode();
    auto missing = data("fixtures/schemas/institution_missing_phone.mfd");
    auto a = analyze(missing.string(), slurp(missing), mode).diagnostics;
    expect(count(a, Severity::Warning) == 1 && count(a, Severity::Error) == 0 && a[0].code == "W-DESIRABLE-MISSING",
           "missing phone reported " + codes_of(a));
    auto zero = data("fixtures/schemas/version_zero.mfd");
    auto b = analyze(zero.string(), slurp(zero), mode).diagnostics;
    expect(count(b, Severity::Error) == 1 && b.size() == 1 && b[0].code == "E-CONSTRAINT",
           "Version 0 reported " + codes_of(b));
    return "";
}

// 6
std::string bag_round_trip() {
    TempDir tmp("bag");
    auto zip_path = tmp.path() / "project.zip";
    auto created = run(cli() + " bag create " + quote(data("fixtures/bag/project.mfd").string()) + " --out " +
                       quote(zip_path.string()) + " --date 2026-01-01 2>&1");
    expect(created.status == 0, "bag create failed:\n" + created.out);
    auto verified = run(cli() + " bag verify --format json " + quote(zip_path.string()));
    expect(verified.status == 0 && verified.out.empty(), "bag verify reported:\n" + verified.out);

    std::string note;
    std::string python = MEDFORD_PYTHON;
    if (python.empty() || run(quote(python) + " -c 'import bagit' 2>/dev/null").status != 0) {
        note = "bagit oracle unavailable, skipped";
    } else {
        auto extracted = tmp.path() / "extracted";
        std::string script =
            "import sys, zipfile, bagit\n"
            "zipfile.ZipFile(sys.argv[1]).extractall(sys.argv[2])\n"
            "bagit.Bag(sys.argv[2]).validate()\n"
            "print('valid')\n";
        spit(tmp.path() / "oracle.py", script);
        auto oracle = run(quote(python) + " " + quote((tmp.path() / "oracle.py").string()) + " " +
                          quote(zip_path.string()) + " " + quote(extracted.string()) + " 2>&1",
                          20);
        expect(oracle.status == 0 && oracle.out == "valid\n", "bagit oracle rejected the bag:\n" + oracle.out);
        note = "bagit oracle agrees";
    }

    auto bytes = slurp(zip_path);
    bytes[zip::data_offset(bytes, "data/data/counts.csv") + 3] ^= 0x01;
    auto mutated = tmp.path() / "mutated.zip";
    spit(mutated, bytes);
    auto after = run(cli() + " bag verify --format json " + quote(mutated.string()));
    auto diags = json_lines(after.out);
    expect(after.status == 1 && diags.size() == 1 && diags[0]["code"] == "E-BAG-HASH",
           "mutated bag reported:\n" + after.out);
    return note;
}

// 7
std::string corpus_fixpoint() {
    auto files = corpus::files(data("corpus"));
    expect(files.size() >= 30, "corpus has only " + std::to_string(files.size()) + " files");
    std::set<std::string> seen;
    for (const auto& f : files) {
        auto text = slurp(f);
        auto first = load_document(SourceFile::from_text(f.string(), text));
        auto again = serialize(first);
        auto second = load_document(SourceFile::from_text(f.string(), again));
        expect(structurally_equal(first, second), f.filename().string() + " is not a fixpoint");
        for (const auto& d : analyze(f.string(), text, base_mode()).diagnostics) seen.insert(d.code);
    }
    for (const auto& code : corpus::base_reachable_codes())
        expect(seen.count(code) == 1, "no corpus file produces " + code);
    return std::to_string(files.size()) + " files, " + std::to_string(seen.size()) + " codes";
}

// 8
std::string exif_oracle() {
    auto ii = read_exif(slurp(data("fixtures/exif/gps_ii.jpg")));
    auto mm = read_exif(slurp(data("fixtures/exif/gps_mm.jpg")));
    expect(ii == mm, "II and MM fixtures decode differently");
    auto oracle = json::parse(slurp(data("fixtures/exif/expected.json")));
    const auto& want = oracle.at("gps_ii.jpg");
    expect(ii.gps.has_value(), "no GPS position decoded");
    double dlat = std::abs(ii.gps->lat - want.at("lat").get<double>());
    double dlon = std::abs(ii.gps->lon - want.at("lon").get<double>());
    expect(dlat <= 1e-6 && dlon <= 1e-6, "GPS disagrees with the reference reader");
    expect(ii.datetime_original == want.at("datetime_original").get<std::string>(), "DateTimeOriginal differs");
    expect(ii.make == want.at("make").get<std::string>() && ii.model == want.at("model").get<std::string>(),
           "camera identity differs");
    char buf[64];
    std::snprintf(buf, sizeof buf, "max GPS error %.1e deg", std::max(dlat, dlon));
    return buf;
}

// 9
std::string lsp_transcript() {
    TempDir tmp("lsp");
    auto mvd = data("fixtures/schemas/MEDFORD.mvd").string();
    auto file = tmp.path() / "reef.mfd";
    const std::string bad =
        "@Institution Tufts University\n@Institution-city Medford\n@Institution-phone not a phone\n\n"
        "@Institution Tufts University\n\n@Version 0\n";
    const std::string good =
        "@Institution Tufts University\n@Institution-address 177 College Ave\n@Institution-city Medford\n"
        "@Institution-province MA\n@Institution-country USA\n@Institution-URI https://www.tufts.edu\n"
        "@Institution-phone +1 617 627 3000\n";
    const std::string typing = good + "@Institution-\n";
    spit(file, bad);
    auto uri = lsp::path_to_uri(file.string());

    std::ostringstream script;
    auto send = [&](json msg) {
        msg["jsonrpc"] = "2.0";
        lsp::write_message(script, msg);
    };
    send({{"id", 1},
          {"method", "initialize"},
          {"params", {{"rootUri", nullptr}, {"initializationOptions", {{"mode", "institution"}, {"mvd", mvd}}}}}});
    send({{"method", "initialized"}, {"params", json::object()}});
    send({{"method", "textDocument/didOpen"},
          {"params", {{"textDocument", {{"uri", uri}, {"languageId", "medford"}, {"version", 1}, {"text", bad}}}}}});
    send({{"method", "textDocument/didChange"},
          {"params", {{"textDocument", {{"uri", uri}, {"version", 2}}}, {"contentChanges", {{{"text", good}}}}}}});
    send({{"method", "textDocument/didChange"},
          {"params", {{"textDocument", {{"uri", uri}, {"version", 3}}}, {"contentChanges", {{{"text", typing}}}}}}});
    send({{"id", 2},
          {"method", "textDocument/completion"},
          {"params", {{"textDocument", {{"uri", uri}}}, {"position", {{"line", 7}, {"character", 13}}}}}});
    send({{"id", 3}, {"method", "shutdown"}});
    send({{"method", "exit"}});
    auto input = tmp.path() / "session.in";
    spit(input, script.str());

    auto r = run(cli() + " lsp < " + quote(input.string()));
    expect(r.status == 0, "lsp exited with status " + std::to_string(r.status));
    std::vector<json> replies;
    std::istringstream out(r.out);
    while (auto body = lsp::read_message(out)) replies.push_back(json::parse(*body));

    std::vector<json> published;
    const json* completion = nullptr;
    bool initialized = false, shut_down = false;
    for (const auto& m : replies) {
        if (m.value("method", "") == "textDocument/publishDiagnostics") published.push_back(m["params"]);
        if (m.contains("error")) throw Failure("server error: " + m.dump());
        if (m.value("id", 0) == 1) initialized = m["result"].contains("capabilities");
        if (m.value("id", 0) == 2) completion = &m;
        if (m.value("id", 0) == 3) shut_down = m.contains("result") && m["result"].is_null();
    }
    expect(initialized, "no initialize result");
    expect(published.size() == 3, "expected three publishDiagnostics, got " + std::to_string(published.size()));
    expect(!published[0]["diagnostics"].empty(), "bad file published no diagnostics");
    expect(published[1]["diagnostics"].empty() && published[1]["version"] == 2, "fixed file still has diagnostics");
    expect(completion != nullptr, "no completion response");
    std::vector<std::string> labels;
    for (const auto& item : (*completion)["result"]) labels.push_back(item["label"]);
    expect(labels == std::vector<std::string>{"address", "city", "province", "country", "URI", "phone"},
           "completion returned " + (*completion)["result"].dump());
    expect(shut_down, "no shutdown result");

    // The server must agree with the command line on identical bytes.
    auto v = run(cli() + " validate --mode institution --mvd " + quote(mvd) + " --format json " +
                 quote(file.string()));
    std::set<std::string> from_cli, from_lsp;
    for (const auto& d : json_lines(v.out)) {
        std::size_t line = d["line"], col = d["col"], len = d["length"];
        from_cli.insert(std::to_string(line - 1) + ":" + std::to_string(col - 1) + "+" + std::to_string(len) + " " +
                        d["code"].get<std::string>() + " " + d["severity"].get<std::string>());
    }
    for (const auto& d : published[0]["diagnostics"]) {
        const auto& s = d["range"]["start"];
        const auto& e = d["range"]["end"];
        std::size_t len = e["line"] == s["line"] ? e["character"].get<std::size_t>() - s["character"].get<std::size_t>()
                                                 : 0;
        from_lsp.insert(std::to_string(s["line"].get<int>()) + ":" + std::to_string(s["character"].get<int>()) + "+" +
                        std::to_string(len) + " " + d["code"].get<std::string>() + " " +
                        (d["severity"] == 1 ? "error" : "warning"));
    }
    expect(from_cli.size() >= 3 && from_cli == from_lsp, "diagnostics differ between validate and lsp");
    return std::to_string(from_cli.size()) + " diagnostics match validate";
}

struct Criterion {
    int number;
    std::string title;
    double budget_s;
    std::function<std::string()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "golden expand output", 1, golden_expand},
        {2, "v1/v2 macro dialect equivalence", 5, dialect_equivalence},
        {3, "name uniqueness per major token", 1, name_uniqueness},
        {4, "import and reference resolution, cycle termination", 5, import_resolution},
        {5, "Institution schema: warn on Desirable, error on constraint", 1, schema_validation},
        {6, "bag round trip, BagIt oracle, single-byte mutation", 10, bag_round_trip},
        {7, "parse/serialize fixpoint over the corpus", 5, corpus_fixpoint},
        {8, "EXIF byte orders agree with reference reader", 1, exif_oracle},
        {9, "LSP transcript and diagnostics parity", 5, lsp_transcript},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string note, error;
        try {
            note = c.check();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty() && secs > c.budget_s)
            error = "took " + std::to_string(secs) + " s, budget " + std::to_string(c.budget_s) + " s";
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3fs", secs);
        std::cout << (error.empty() ? "PASS" : "FAIL") << " [" << c.number << "] " << c.title << " (" << timing << ")";
        if (!error.empty()) std::cout << ": " << error;
        else if (!note.empty()) std::cout << ": " << note;
        std::cout << "\n";
        failed += !error.empty();
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
