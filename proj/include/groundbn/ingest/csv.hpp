#pragma once
// Minimal reader for small numeric CSV files. A first row that does not
// parse as numbers is returned as the header; blank lines and lines
// starting with '#' are skipped.

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "groundbn/errors.hpp"

namespace groundbn::ingest {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* end = s.data() + s.size();
    const char* first = s.data() + (s[0] == '+' ? 1 : 0);
    auto [p, ec] = std::from_chars(first, end, out);
    return ec == std::errc() && p == end;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in, const std::string& source = "csv") {
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto cells = detail::split(s);
        std::vector<double> row(cells.size());
        bool numeric = true;
        for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = detail::parse_number(cells[i], row[i]);
        if (!numeric) {
            if (first) {
                t.header = std::move(cells);
                first = false;
                continue;
            }
            throw Error(ErrorCode::MalformedInput, "non-numeric value on line " + std::to_string(lineno),
                        source + ":" + std::to_string(lineno));
        }
        first = false;
        t.rows.push_back(std::move(row));
        t.line_numbers.push_back(lineno);
    }
    return t;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open '" + path + "'", path);
    return read_csv(in, path);
}

// Rows of exactly `columns` numbers.
inline std::vector<std::vector<double>> numeric_columns(const CsvTable& t, std::size_t columns,
                                                        const std::string& source) {
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        if (t.rows[i].size() != columns)
            throw Error(ErrorCode::MalformedInput,
                        "expected " + std::to_string(columns) + " columns on line " + std::to_string(t.line_numbers[i]),
                        source + ":" + std::to_string(t.line_numbers[i]));
    return t.rows;
}

}  // namespace groundbn::ingest
