#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace stylo::csv {

using Row = std::vector<std::string>;

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

// Writes one record terminated by LF.
void write_row(std::ostream& out, const Row& row);

// Parses RFC 4180 style text (quoted fields may contain separators and newlines).
// CRLF line endings are accepted. Empty lines are skipped.
std::vector<Row> parse(std::string_view text);

std::string format_double(double value);

}  // namespace stylo::csv
