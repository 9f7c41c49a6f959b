#pragma once

#include <string>
#include <vector>

namespace climkit {

// Minimal strict CSV: comma separated, '#' comment lines and blank lines are
// skipped, no quoting. Throws DataError on unreadable files.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// Strict numeric parse; throws DataError naming the offending cell.
double parse_number(const std::string& cell, const std::string& context);
int parse_int(const std::string& cell, const std::string& context);

void write_text_file(const std::string& path, const std::string& content);

std::string format_sig(double value, int significant_digits);

}  // namespace climkit
