#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace certdag::csv {

using Row = std::vector<std::string>;

/// Parses RFC 4180 text (quoted fields may contain commas, quotes and newlines).
/// Throws CertdagError("MALFORMED_CSV") on an unterminated quote.
std::vector<Row> parse(std::string_view text);
std::vector<Row> read_file(const std::string& path);

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

}  // namespace certdag::csv
