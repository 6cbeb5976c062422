#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace curvegnn {

struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based, parallel to rows

    /// Column index by name; throws ValidationError when absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Comma-separated file with a header row. Blank lines and lines starting
/// with '#' are skipped. No quoting.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& source);

/// Shortest decimal text that parses back to the same double ("inf"/"-inf"/"nan" for non-finite).
std::string format_double(double v);

/// Strict parse of a full token; throws ParseError on trailing junk.
double parse_double(const std::string& token, const std::string& source, std::size_t line);
long long parse_int(const std::string& token, const std::string& source, std::size_t line);

/// Writes text to a file, throwing ValidationError when the file cannot be opened.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace curvegnn
