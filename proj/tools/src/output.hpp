#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace chainlab::cli {

using Cell = std::variant<std::string, double, long long>;

struct Column {
    std::string name;
    std::string unit;
};

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Shortest decimal that round-trips, independent of the locale.
std::string format_number(double x);

/// '#' units line, header, rows; LF endings, RFC-4180 quoting.
std::string to_csv(const Table& table);
/// {"columns": [...], "units": [...], "rows": [{column: value}, ...]}
nlohmann::json to_json(const Table& table);

/// Writes to a sibling temporary file, then renames over the target.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::string tool_version;
    std::string timestamp;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

/// UTC ISO-8601 time; SOURCE_DATE_EPOCH, when set, replaces the clock.
std::string iso_timestamp();

} // namespace chainlab::cli
