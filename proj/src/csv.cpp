#include "vibrato/csv.hpp"

#include "vibrato/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vibrato::csv {

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw DomainError("csv: no column named '" + name + "'");
}

namespace {

// One record, RFC 4180 quoting; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string cell;
    bool in_quotes = false;
    bool any = false;
    int ch;
    while ((ch = in.get()) != EOF) {
        any = true;
        const char c = static_cast<char>(ch);
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    cell.push_back('"');
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"' && cell.empty()) {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            cell.push_back(c);
        }
    }
    if (!any) return false;
    fields.push_back(std::move(cell));
    return true;
}

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

Table read_csv(std::istream& in) {
    Table table;
    std::vector<std::string> fields;
    if (!read_record(in, fields)) {
        return table;  // empty input => empty table
    }
    table.header = fields;
    while (read_record(in, fields)) {
        if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
        if (fields.size() != table.header.size()) {
            throw DomainError("csv: row with " + std::to_string(fields.size()) +
                              " cells, expected " + std::to_string(table.header.size()));
        }
        table.rows.push_back(fields);
    }
    return table;
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("csv: cannot open '" + path + "'");
    return read_csv(in);
}

void write_csv(std::ostream& out, const Table& table) {
    const auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            if (needs_quoting(row[i])) {
                out << '"';
                for (char c : row[i]) {
                    if (c == '"') out << '"';
                    out << c;
                }
                out << '"';
            } else {
                out << row[i];
            }
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
}

void write_csv_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("csv: cannot open '" + path + "' for writing");
    write_csv(out, table);
    if (!out) throw IoError("csv: write failure on '" + path + "'");
}

std::string format_double(double value) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, value,
                                   std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell) {
    std::size_t begin = cell.find_first_not_of(" \t");
    std::size_t end = cell.find_last_not_of(" \t");
    if (begin == std::string::npos) {
        throw DomainError("csv: empty numeric cell");
    }
    double value = 0.0;
    const char* first = cell.data() + begin;
    const char* last = cell.data() + end + 1;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw DomainError("csv: cannot parse '" + cell + "' as a number");
    }
    return value;
}

}  // namespace vibrato::csv
