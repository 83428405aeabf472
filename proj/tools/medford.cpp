#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "medford/analysis.hpp"
#include "medford/bagit.hpp"
#include "medford/document.hpp"
#include "medford/exif.hpp"
#include "medford/lsp.hpp"

namespace fs = std::filesystem;
using namespace medford;

namespace {

enum class Format { Human, Json };

void emit(const std::vector<Diagnostic>& diags, Format format, std::string_view source, std::ostream& out) {
    for (const auto& d : diags) {
        if (format == Format::Json) out << to_json_line(d) << "\n";
        else out << to_human(d, source);
    }
}

std::optional<fs::path> mvd_path(const std::string& flag) {
    if (!flag.empty()) return fs::path(flag);
    if (const char* env = std::getenv("MEDFORD_MVD"); env && *env) return fs::path(env);
    return std::nullopt;
}

std::optional<Mode> pick_mode(const std::string& name, const std::string& mvd, Format format) {
    auto selected = select_mode(name, mvd_path(mvd));
    emit(selected.diagnostics, format, {}, std::cout);
    return selected.mode;
}

int cmd_validate(const std::vector<std::string>& paths, const std::string& mode_name, const std::string& mvd,
                 Format format) {
    auto mode = pick_mode(mode_name, mvd, format);
    if (!mode) return 1;
    bool errors = false;
    for (const auto& path : paths) {
        try {
            auto src = read_source(path);
            auto a = analyze(src.path, src.text, *mode);
            emit(a.diagnostics, format, src.text, std::cout);
            errors = errors || has_errors(a.diagnostics);
        } catch (const Error& e) {
            emit({{e.code(), Severity::Error, e.what(), path, {1, 1, 0}}}, format, {}, std::cout);
            errors = true;
        }
    }
    return errors ? 1 : 0;
}

int cmd_expand(const std::string& path) {
    try {
        auto src = read_source(path);
        auto doc = load_document(src);
        std::vector<Diagnostic> errors;
        for (const auto& d : doc.diagnostics)
            if (d.is_error()) errors.push_back(d);
        if (!errors.empty()) {
            emit(errors, Format::Human, src.text, std::cerr);
            return 1;
        }
        std::cout << serialize(doc);
        return 0;
    } catch (const Error& e) {
        std::cerr << path << ": error: [" << e.code() << "] " << e.what() << "\n";
        return 1;
    }
}

int cmd_bag_create(const std::string& path, const std::string& out, const std::string& mode_name,
                   const std::string& mvd, const std::string& date) {
    auto mode = pick_mode(mode_name, mvd, Format::Human);
    if (!mode) return 1;
    try {
        auto src = read_source(path);
        auto a = analyze(src.path, src.text, *mode);
        auto roles = bagit::collect_file_roles(a.workspace);
        auto diags = a.diagnostics;
        diags.insert(diags.end(), roles.diagnostics.begin(), roles.diagnostics.end());
        sort_diagnostics(diags);
        if (has_errors(diags)) {
            emit(diags, Format::Human, src.text, std::cerr);
            std::cerr << "bag not created: fix the errors above first\n";
            return 1;
        }
        auto result = bagit::create_bag(a.workspace, roles.roles, out, {date});
        emit(result.diagnostics, Format::Human, {}, std::cerr);
        return result.written ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << path << ": error: [" << e.code() << "] " << e.what() << "\n";
        return 1;
    }
}

int cmd_bag_verify(const std::string& zip, Format format) {
    auto diags = bagit::verify_bag(zip);
    emit(diags, format, {}, std::cout);
    return has_errors(diags) ? 1 : 0;
}

int cmd_exif(const std::string& image, std::string name) {
    std::ifstream in(image, std::ios::binary);
    if (!in) {
        std::cerr << image << ": error: [E-IO] cannot read file\n";
        return 1;
    }
    std::ostringstream bytes;
    bytes << in.rdbuf();
    try {
        auto rec = read_exif(bytes.str());
        if (name.empty()) name = fs::path(image).filename().string();
        std::cout << serialize(exif_to_block(rec, name));
        return 0;
    } catch (const Error& e) {
        std::cerr << image << ": error: [" << e.code() << "] " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MEDFORD metadata toolchain"};
    app.require_subcommand(1);

    std::map<std::string, Format> formats{{"human", Format::Human}, {"json", Format::Json}};
    Format format = Format::Human;
    std::string mode = "base";
    std::string mvd;

    auto* validate = app.add_subcommand("validate", "Check .mfd files against a validation mode");
    std::vector<std::string> paths;
    validate->add_option("paths", paths, "Files to validate")->required()->check(CLI::ExistingFile);
    validate->add_option("--mode", mode, "Validation mode");
    validate->add_option("--mvd", mvd, "Validation map (default: $MEDFORD_MVD)");
    validate->add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(formats));

    auto* expand = app.add_subcommand("expand", "Print the macro-expanded document");
    std::string expand_path;
    expand->add_option("path", expand_path)->required()->check(CLI::ExistingFile);

    auto* bag = app.add_subcommand("bag", "Create or verify BagIt archives");
    bag->require_subcommand(1);
    auto* create = bag->add_subcommand("create", "Package a document and its data files");
    std::string create_path, out, date;
    create->add_option("path", create_path)->required()->check(CLI::ExistingFile);
    create->add_option("--out", out, "Zip file to write")->required();
    create->add_option("--mode", mode, "Validation mode");
    create->add_option("--mvd", mvd, "Validation map (default: $MEDFORD_MVD)");
    create->add_option("--date", date, "Bagging-Date (YYYY-MM-DD)");
    auto* verify = bag->add_subcommand("verify", "Check a bag's structure and checksums");
    std::string zip;
    verify->add_option("zip", zip)->required()->check(CLI::ExistingFile);
    verify->add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(formats));

    auto* exif = app.add_subcommand("exif", "Print a @Photo block from a JPEG's EXIF data");
    std::string image, name;
    exif->add_option("image", image)->required()->check(CLI::ExistingFile);
    exif->add_option("name", name, "Block name (default: the file name)");

    auto* lsp = app.add_subcommand("lsp", "Run the language server on stdin/stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*validate) return cmd_validate(paths, mode, mvd, format);
    if (*expand) return cmd_expand(expand_path);
    if (*create) return cmd_bag_create(create_path, out, mode, mvd, date);
    if (*verify) return cmd_bag_verify(zip, format);
    if (*exif) return cmd_exif(image, name);
    if (*lsp) {
        std::ios::sync_with_stdio(false);
        return lsp::run(std::cin, std::cout);
    }
    return 2;
}
