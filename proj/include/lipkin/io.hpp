// io.hpp - locale-independent numeric formatting, atomic file output and
// the flat key = value run-configuration format.

#pragma once

#include <map>
#include <string>
#include <vector>

namespace lipkin {

// 17 significant digits, C locale, nan spelled "nan".
std::string fmt_g17(double v);

// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);

// Comma-separated doubles ("qa,pa[,qb,pb]"); throws on malformed input.
std::vector<double> parse_double_list(const std::string& text);

// Flat `key = value` file with '#' comments and blank lines. Returns the
// key/value pairs in file order; syntax errors throw.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path);

}  // namespace lipkin
