#pragma once

#include <string>
#include <vector>

namespace senti {

// Minimal RFC-4180 reader: quoted fields, doubled quotes, embedded commas
// and newlines, CRLF or LF records. Returns one vector of fields per record.
std::vector<std::vector<std::string>> parse_csv(const std::string& content);

std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Quotes a field iff it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

}  // namespace senti
