#pragma once

#include <optional>
#include <string>
#include <vector>

namespace botamp::csv {

// Shortest round-trip decimal form of a double (std::to_chars), so repeated
// runs emit byte-identical files.
std::string format_double(double v);

// Strict double parse of a whole field. Returns nullopt on any trailing junk.
std::optional<double> parse_double(const std::string& s);

std::optional<long long> parse_int(const std::string& s);

// Split preserving empty tokens: "a;;b" -> {"a", "", "b"}, "" -> {""}.
std::vector<std::string> split(const std::string& s, char sep);

std::string join(const std::vector<std::string>& parts, char sep);

std::string trim(const std::string& s);

// One CSV record per inner vector. Handles quoted fields, embedded commas,
// doubled quotes, and newlines inside quotes. Throws IoError if the file
// cannot be opened.
std::vector<std::vector<std::string>> read_file(const std::string& path);

// Quotes a field only when it needs it.
std::string encode_field(const std::string& field);

std::string encode_row(const std::vector<std::string>& fields);

}  // namespace botamp::csv
