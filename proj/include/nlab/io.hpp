#pragma once

#include <string>
#include <vector>

namespace nlab {

// Shortest-roundtrip decimal for doubles; stable across runs.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<double>& row);
    void add_row_strings(const std::vector<std::string>& row);
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
    std::size_t columns_;
};

std::string sha256_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

} // namespace nlab
