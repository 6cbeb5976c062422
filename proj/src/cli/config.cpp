#include "curvegnn/cli/config.hpp"

#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "curvegnn/common/csv.hpp"
#include "curvegnn/common/errors.hpp"

namespace curvegnn::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile parse_config(const std::string& text, const std::string& source) {
    ConfigFile cfg;
    cfg.source = source;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    std::set<std::string> seen;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(source, lineno, "expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(source, lineno, "empty key");
        if (!seen.insert(key).second) throw ParseError(source, lineno, "key '" + key + "' set twice");
        cfg.entries.push_back({key, value, lineno});
    }
    return cfg;
}

ConfigFile read_config(const std::string& path) { return parse_config(read_text_file(path), path); }

void apply_config(CLI::App& app, const ConfigFile& cfg) {
    for (const auto& e : cfg.entries) {
        if (e.key == "config" || e.key == "help") {
            throw ParseError(cfg.source, e.line, "key '" + e.key + "' is not allowed in a config file");
        }
        CLI::Option* opt = app.get_option_no_throw("--" + e.key);
        if (opt == nullptr) throw ParseError(cfg.source, e.line, "unknown key '" + e.key + "'");
        if (opt->count() > 0) continue;  // the command line wins
        try {
            opt->add_result(e.value);
            opt->run_callback();
        } catch (const CLI::Error& err) {
            throw ParseError(cfg.source, e.line, "bad value for '" + e.key + "': " + err.what());
        }
    }
}

}  // namespace curvegnn::cli
