// Streaming CSV helpers for the CLI: comma-separated numeric rows, optional
// header line, constant memory. Errors carry 1-based row/column locations.
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace mdhc_cli {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CsvIoError : public CsvError {
public:
    using CsvError::CsvError;
};

inline void parse_row(const std::string& line, std::size_t row_no,
                      std::vector<double>& out) {
    out.clear();
    const char* p = line.data();
    const char* end = p + line.size();
    std::size_t col = 1;
    while (true) {
        const char* field_end = p;
        while (field_end != end && *field_end != ',') ++field_end;
        // tolerate surrounding spaces and a trailing CR
        const char* a = p;
        const char* b = field_end;
        while (a != b && (*a == ' ' || *a == '\t')) ++a;
        while (b != a && (*(b - 1) == ' ' || *(b - 1) == '\t' || *(b - 1) == '\r')) --b;
        double value = 0.0;
        auto res = std::from_chars(a, b, value);
        if (res.ec != std::errc() || res.ptr != b)
            throw CsvError("row " + std::to_string(row_no) + " column " +
                           std::to_string(col) + ": non-numeric cell '" +
                           std::string(p, field_end) + "'");
        out.push_back(value);
        if (field_end == end) break;
        p = field_end + 1;
        ++col;
    }
}

/// Streams numeric rows to `fn(row_index_0based, values)`. Returns the row
/// count. Enforces a constant column count across the stream.
inline std::size_t for_each_row(const std::string& path, bool skip_header,
                                const std::function<void(std::size_t, const std::vector<double>&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvIoError("cannot open input file: " + path);
    std::string line;
    std::size_t row_no = 0, count = 0;
    std::size_t dim = 0;
    std::vector<double> values;
    if (skip_header && std::getline(in, line)) ++row_no;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        parse_row(line, row_no, values);
        if (dim == 0)
            dim = values.size();
        else if (values.size() != dim)
            throw CsvError("row " + std::to_string(row_no) + ": expected " +
                           std::to_string(dim) + " columns, got " +
                           std::to_string(values.size()));
        fn(count++, values);
    }
    return count;
}

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::vector<int> read_label_column(const std::string& path, bool skip_header) {
    std::vector<int> labels;
    for_each_row(path, skip_header, [&](std::size_t, const std::vector<double>& row) {
        if (row.size() != 1)
            throw CsvError("label file " + path + ": expected a single column");
        labels.push_back(static_cast<int>(row[0]));
    });
    return labels;
}

} // namespace mdhc_cli
