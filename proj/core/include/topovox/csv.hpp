#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace topovox::csv {

using Row = std::vector<std::string>;

/// Shortest round-trip representation; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double value);
double parse_double(std::string_view text);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const Row& row);

/// RFC-4180 style reader: quoted fields, doubled quotes, CRLF tolerated.
std::vector<Row> read_all(std::istream& in);
std::vector<Row> read_file(const std::filesystem::path& path);

/// Column index of `name` in the header row; throws kFormat when absent.
std::size_t column(const Row& header, std::string_view name);

/// Writes `contents` to path via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace topovox::csv
