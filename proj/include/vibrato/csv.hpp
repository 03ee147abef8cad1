#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vibrato::csv {

/// Header row plus data rows, all cells as text.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index for a header name; throws DomainError when absent.
    std::size_t column(const std::string& name) const;
};

Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Table& table);
void write_csv_file(const std::string& path, const Table& table);

/// Locale-independent formatting with 12 significant digits ('.' decimal).
std::string format_double(double value);

/// Strict double parse of a full cell; throws DomainError on junk.
double parse_double(const std::string& cell);

}  // namespace vibrato::csv
