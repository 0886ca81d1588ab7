#include "ipgeo/csv.hpp"

#include "ipgeo/util.hpp"

namespace ipgeo {

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // tolerate CRLF
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

CsvReader::CsvReader(const std::string& path) : in_(path), path_(path) {
    if (!in_) throw ConfigError("cannot open CSV file: " + path);
    std::string line;
    if (!std::getline(in_, line)) throw ConfigError("unreadable CSV header: " + path);
    header_ = split_csv_line(line);
    for (size_t i = 0; i < header_.size(); ++i) index_[trim(header_[i])] = int(i);
}

int CsvReader::column(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? -1 : it->second;
}

bool CsvReader::next(std::vector<std::string>& fields, size_t& line_no) {
    while (std::getline(in_, buf_)) {
        ++line_no_;
        if (buf_.empty() || (buf_.size() == 1 && buf_[0] == '\r')) continue;
        fields = split_csv_line(buf_);
        line_no = line_no_;
        return true;
    }
    return false;
}

} // namespace ipgeo
