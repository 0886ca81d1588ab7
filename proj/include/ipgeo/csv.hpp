#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ipgeo {

// Minimal RFC-4180 field splitter (quoted fields, embedded commas and
// doubled quotes; no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

std::string csv_escape(std::string_view field);

// Streaming CSV reader with a named header.
class CsvReader {
public:
    // Throws ConfigError if the file or its header cannot be read.
    explicit CsvReader(const std::string& path);

    // Column index lookup; -1 if absent.
    int column(std::string_view name) const;

    // Reads the next data row into `fields`; false at EOF. Blank lines
    // are skipped. `line_no` reports the 1-based physical line.
    bool next(std::vector<std::string>& fields, size_t& line_no);

    const std::vector<std::string>& header() const { return header_; }

private:
    std::ifstream in_;
    std::string path_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, int> index_;
    size_t line_no_ = 1;
    std::string buf_;
};

} // namespace ipgeo
