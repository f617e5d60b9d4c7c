#include "plaque/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "plaque/error.hpp"

namespace plaque {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!f) throw PreconditionError("cannot write '" + path.string() + "'");
  return f;
}

void close_checked(std::ofstream& f, const std::filesystem::path& path) {
  f.close();
  if (!f) throw PreconditionError("error while writing '" + path.string() + "'");
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double round9(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  return std::strtod(format_number(x).c_str(), nullptr);
}

nlohmann::json rounded(const nlohmann::json& j) {
  if (j.is_number_float()) return round9(j.get<double>());
  if (j.is_array() || j.is_object()) {
    nlohmann::json out = j;
    for (auto& item : out) item = rounded(item);
    return out;
  }
  return j;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto f = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << format_number(row[i]);
    f << '\n';
  }
  close_checked(f, path);
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  auto f = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << '\n';
  }
  close_checked(f, path);
}

void write_space_time_csv(const std::filesystem::path& path, std::span<const double> times,
                          std::span<const double> cell_centres,
                          const std::vector<std::vector<double>>& rows) {
  if (times.size() != rows.size()) throw PreconditionError("space-time CSV: row count mismatch");
  auto f = open_out(path);
  f << 't';
  for (double x : cell_centres) f << ',' << format_number(x);
  f << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    f << format_number(times[k]);
    for (double v : rows[k]) f << ',' << format_number(v);
    f << '\n';
  }
  close_checked(f, path);
}

void write_pgm(const std::filesystem::path& path, const std::vector<std::vector<double>>& rows) {
  const std::size_t h = rows.size();
  const std::size_t w = h ? rows.front().size() : 0;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& r : rows) {
    if (r.size() != w) throw PreconditionError("PGM: ragged matrix");
    for (double v : r) {
      if (first) {
        lo = hi = v;
        first = false;
      }
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  auto f = open_out(path, true);
  f << "P5\n" << w << ' ' << h << "\n255\n";
  const double span = hi - lo;
  for (const auto& r : rows) {
    for (double v : r) {
      const double s = span > 0.0 ? (v - lo) / span : 0.0;
      f.put(static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0))));
    }
  }
  close_checked(f, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j, bool exact) {
  auto f = open_out(path);
  f << (exact ? j : rounded(j)).dump(2) << '\n';
  close_checked(f, path);
}

}  // namespace plaque
