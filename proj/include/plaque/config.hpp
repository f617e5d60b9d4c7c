#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "plaque/error.hpp"
#include "plaque/kinetic.hpp"
#include "plaque/metrics.hpp"
#include "plaque/model.hpp"
#include "plaque/pde.hpp"
#include "plaque/stability.hpp"

namespace plaque {

/// Raised for malformed configuration text. `line()` is 0 when the source has
/// no line structure (JSON sidecars).
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& m) : Error("config", m), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct GridConfig {
  double L = 7.0 * std::numbers::pi;
  int N = 256;
};

struct RunSection {
  double t_end = 500;
  double snapshot_every = 1;
  std::uint64_t seed = 1;
  double amplitude = 0.01;
  ChemotaxisScheme scheme = ChemotaxisScheme::Upwind;
  Sensitivity sensitivity = Sensitivity::Standard;
  JacobianForm jacobian = JacobianForm::Printed;
  double dt_safety = 0.2;
  double wall_clock_budget = 0;
  std::vector<Component> record = {kE};
  bool heatmap = true;
  int threads = 1;
};

struct SweepSection {
  AxisRange theta{0.0, 0.6, 61};
  AxisRange xi{0.0, 20.0, 81};
  std::vector<double> eps = {0.1, 0.05, 0.025};
  double k2_max = 20;
  int k2_points = 401;
  int m_max = 40;
};

struct KineticSection {
  int M = 16;
  int M_C = 16;
  TransportScheme transport = TransportScheme::Central;
  double length = 12;  // dimensional
  int cells = 128;
  double t_probe = 1;
  double amplitude = 0.05;
  double dt_safety = 0.4;
  int decay_mode = 2;
  double decay_eps = 0.025;
  double decay_t_end = 1;
};

struct OdeSection {
  double t_end = 100;
  double dt = 1e-3;
  int record_every = 10;
  State5 initial = {1, 1, 1, 1, 1};  // multiples of the equilibrium
  double volume = 2;
  State5 appendix_initial = {1.2, 0.8, 1.3, 0.7, 0.5};
  double appendix_t_end = 10;
  double appendix_dt = 1.25e-5;
  int harness_points = 5;
  double harness_dt_max = 0.5;
  int harness_levels = 8;
  double harness_t_end = 20;
};

/// Fully resolved job description. Exactly one parameter block is active:
/// `dimensional` when set, otherwise `params`.
struct RunConfig {
  std::string preset = "paper-pars";
  ModelParams params;
  std::optional<DimensionalParams> dimensional;
  GridConfig grid;
  RunSection run;
  SweepSection sweep;
  RegimeThresholds metrics;
  KineticSection kinetic;
  OdeSection ode;

  /// Dimensionless coefficients of the active block.
  ModelParams model() const;
  /// Dimensional coefficients; the dimensional preset when only [params] is set.
  DimensionalParams dimensional_or_preset() const;

  void set_theta(double theta);
  void set_xi(double xi);
};

/// Names accepted by preset_config.
std::vector<std::string> preset_names();

/// Throws ConfigError for unknown names.
RunConfig preset_config(std::string_view name);

/// Strict INI reader. Sections: [params], [dimensional], [grid], [run],
/// [sweep], [metrics], [kinetic], [ode]; a top-level `preset = NAME` selects
/// the starting values (default paper-pars). Unknown sections or keys,
/// duplicates, malformed values and missing required keys raise ConfigError
/// with the line number. `[params] preset = none` makes every coefficient of
/// that block required.
RunConfig parse_config_text(std::string_view text, std::optional<std::string> preset = {});

/// JSON object with the same sections (a sidecar's "config" member or a bare
/// object).
RunConfig parse_config_json(const nlohmann::json& j, std::optional<std::string> preset = {});

/// Reads a file, choosing JSON when it starts with '{'. Throws ConfigError
/// when the file cannot be read.
RunConfig parse_config(const std::filesystem::path& path, std::optional<std::string> preset = {});

/// Canonical JSON form; parse_config_json(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

}  // namespace plaque
