#pragma once

// Report serialization: CSV tables and JSON documents.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qest {

using Json = nlohmann::ordered_json;

/// One CSV cell. Empty monostate prints as an empty field.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;
};

struct Report {
  Json document;  // JSON form: configuration, seed, results
  Table table;    // CSV form
};

enum class Format { csv, json };

Format parse_format(std::string_view name);

/// Shortest decimal that parses back to the same double; nan/inf spelled out.
std::string format_number(double v);

/// RFC-4180 field quoting: quoted when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view s);

std::string to_csv(const Table& table);
/// Two-space indented JSON with a trailing newline.
std::string to_json_text(const Json& doc);

std::string render(const Report& report, Format format);

/// Writes the rendered report to `path`, or to stdout when the path is empty
/// or "-". Throws IoError naming the path on failure.
void emit_report(const Report& report, Format format, const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace qest
