#pragma once
// Versioned CSV emission and parsing.
//
// Every file carries a leading schema_version column whose value is "v1" on
// each data row, so any CSV reader can detect layout changes without
// out-of-band metadata.  Quoting follows RFC 4180: fields containing commas,
// quotes, or line breaks are quoted and embedded quotes are doubled.  Writes
// land in a temp file next to the target and are renamed into place.

#include <string>
#include <variant>
#include <vector>

namespace klkit {

inline constexpr const char* kCsvSchemaVersion = "v1";

// One output cell.  Doubles print with 12 significant digits so emitted
// tables diff cleanly against recorded oracles.
using CsvCell = std::variant<std::string, double, long long>;

// %.12g rendering shared by CSV output and the CLI summaries.
std::string format_significant(double x);

std::string csv_escape(const std::string& field);

struct CsvTable {
    std::vector<std::string> columns;         // schema_version is implicit
    std::vector<std::vector<CsvCell>> rows;   // each row matches columns

    void add_row(std::vector<CsvCell> row);   // throws on width mismatch
    std::string to_string() const;
};

// Serialize and atomically replace `path` (temp file + rename, same
// directory).  Throws std::runtime_error on any I/O failure.
void write_csv_atomic(const std::string& path, const CsvTable& table);

struct ParsedCsv {
    std::string schema_version;
    std::vector<std::string> columns;               // schema_version stripped
    std::vector<std::vector<std::string>> rows;
};

// Strict parse: rectangular rows, a schema_version first column, and one
// version string shared by all rows.  Errors carry 1-based line numbers.
ParsedCsv parse_csv(const std::string& text);
ParsedCsv read_csv(const std::string& path);

}  // namespace klkit
