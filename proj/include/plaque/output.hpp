#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace plaque {

/// Shortest decimal form with 9 significant digits ("%.9g").
std::string format_number(double x);

/// Rounds to 9 significant digits so that JSON reports match the CSV text.
double round9(double x);

/// Recursively applies round9 to every floating-point number.
nlohmann::json rounded(const nlohmann::json& j);

/// Header line followed by one comma-separated row per entry.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Same layout with preformatted cells (for mixed text and numbers).
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

/// Space-time matrix: rows = snapshots, first column = t, then one column per
/// cell (header t,x0,x1,... with cell centres).
void write_space_time_csv(const std::filesystem::path& path, std::span<const double> times,
                          std::span<const double> cell_centres,
                          const std::vector<std::vector<double>>& rows);

/// Binary 8-bit greyscale (P5). Values are scaled linearly from the matrix
/// minimum (0) to its maximum (255); a constant matrix maps to 0.
void write_pgm(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows);

/// Pretty-printed JSON (two-space indent, trailing newline). Numbers are
/// rounded unless `exact` is set (used for re-runnable metadata).
void write_json(const std::filesystem::path& path, const nlohmann::json& j, bool exact = false);

}  // namespace plaque
