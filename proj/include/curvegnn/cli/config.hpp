#pragma once

#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace curvegnn::cli {

struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Flat key=value lines; '#' starts a comment line, blank lines are skipped,
/// keys and values are trimmed. Repeated keys are a ParseError.
struct ConfigFile {
    std::string source;
    std::vector<ConfigEntry> entries;
};

ConfigFile parse_config(const std::string& text, const std::string& source);
ConfigFile read_config(const std::string& path);

/// Feeds entries into the options of an already-parsed command: key k maps
/// to option --k. Options given on the command line win. Unknown keys and
/// values the option rejects raise ParseError with the file line.
void apply_config(CLI::App& app, const ConfigFile& cfg);

}  // namespace curvegnn::cli
