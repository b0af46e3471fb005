#include "klkit/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace klkit {
namespace {

std::string cell_to_string(const CsvCell& cell) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* d = std::get_if<double>(&cell)) return format_significant(*d);
    return std::to_string(std::get<long long>(cell));
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
    throw std::runtime_error("csv: line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string format_significant(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvTable::add_row(std::vector<CsvCell> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("csv: row width " + std::to_string(row.size()) +
                                    " != column count " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    out << "schema_version";
    for (const std::string& c : columns) out << ',' << csv_escape(c);
    out << '\n';
    for (const std::vector<CsvCell>& row : rows) {
        out << kCsvSchemaVersion;
        for (const CsvCell& cell : row) out << ',' << csv_escape(cell_to_string(cell));
        out << '\n';
    }
    return out.str();
}

void write_csv_atomic(const std::string& path, const CsvTable& table) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("csv: cannot open " + tmp + " for writing");
        f << table.to_string();
        f.flush();
        if (!f) {
            std::remove(tmp.c_str());
            throw std::runtime_error("csv: write to " + tmp + " failed");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("csv: rename to " + path + " failed");
    }
}

ParsedCsv parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(field);
        field.clear();
        field_was_quoted = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted)
                    parse_fail(line, "quote inside unquoted field");
                in_quotes = true;
                field_was_quoted = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 >= text.size() || text[i + 1] != '\n')
                    parse_fail(line, "bare carriage return");
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                if (field_was_quoted) parse_fail(line, "data after closing quote");
                field += c;
        }
    }
    if (in_quotes) parse_fail(line, "unterminated quoted field");
    if (!field.empty() || field_was_quoted || !record.empty()) end_record();

    if (records.empty()) parse_fail(1, "empty input");
    const std::vector<std::string>& header = records.front();
    if (header.empty() || header[0] != "schema_version")
        parse_fail(1, "first column must be schema_version");

    ParsedCsv out;
    out.columns.assign(header.begin() + 1, header.end());
    for (std::size_t r = 1; r < records.size(); ++r) {
        std::vector<std::string>& row = records[r];
        if (row.size() != header.size())
            parse_fail(r + 1, "expected " + std::to_string(header.size()) + " fields, got " +
                                  std::to_string(row.size()));
        if (out.schema_version.empty()) {
            if (row[0] != kCsvSchemaVersion)
                parse_fail(r + 1, "unsupported schema version '" + row[0] + "'");
            out.schema_version = row[0];
        } else if (row[0] != out.schema_version)
            parse_fail(r + 1, "mixed schema versions '" + out.schema_version + "' and '" +
                                  row[0] + "'");
        out.rows.emplace_back(row.begin() + 1, row.end());
    }
    if (out.schema_version.empty()) out.schema_version = kCsvSchemaVersion;
    return out;
}

ParsedCsv read_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("csv: cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_csv(buf.str());
}

}  // namespace klkit
