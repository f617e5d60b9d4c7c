#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include "plaque/model.hpp"

namespace plaque {

/// Uniform cell-centred grid on [0, L].
struct Grid1D {
  double L = 0;
  int N = 0;

  Grid1D() = default;
  /// Throws ParameterError unless N >= 16 and L > 0.
  Grid1D(double length, int cells);

  double dx() const { return L / N; }
  double x(int i) const { return (i + 0.5) * dx(); }
};

struct FieldState {
  double t = 0;
  std::array<std::vector<double>, kNumComponents> u;

  explicit FieldState(int n = 0) {
    for (auto& f : u) f.assign(static_cast<std::size_t>(n), 0.0);
  }
  int size() const { return static_cast<int>(u[0].size()); }
  std::vector<double>& operator[](Component c) { return u[c]; }
  const std::vector<double>& operator[](Component c) const { return u[c]; }
};

/// How the chemotactic part of the R flux is discretised.
enum class ChemotaxisScheme {
  // Donor-cell mobility R with Phi1 evaluated in the receiving cell.
  // Keeps 0 <= R <= 1 for small enough steps.
  Upwind,
  // Arithmetic face means of Phi1(R) R times the central C gradient.
  Central,
};

/// Density dependence of the chemotactic sensitivity.
enum class Sensitivity {
  Standard,     // Phi1(R) R
  KineticLimit, // Phi0(R) Phi1(R) R, as produced by the velocity-jump model
};

ChemotaxisScheme scheme_from_name(std::string_view name);
std::string_view to_string(ChemotaxisScheme s);
Sensitivity sensitivity_from_name(std::string_view name);
std::string_view to_string(Sensitivity s);

struct PdeOptions {
  ChemotaxisScheme scheme = ChemotaxisScheme::Upwind;
  Sensitivity sensitivity = Sensitivity::Standard;
  bool reactions = true;  // test hook
  double dt_safety = 0.2;
};

/// A, S, R, C = U1 * (1 + amplitude * u_i), u_i ~ U[-1, 1] from mt19937_64(seed);
/// E = 0; R clamped to [0, 1].
FieldState init_state(const ModelParams& p, const Grid1D& g, std::uint64_t seed,
                      double amplitude);

/// Face values of Phi0(R) dR/dx - xi s(R) dC/dx at the N+1 faces; the two
/// boundary faces are exactly zero.
std::vector<double> flux_R(std::span<const double> R, std::span<const double> C,
                           const ModelParams& p, const Grid1D& g,
                           const PdeOptions& opt = {});

FieldState rhs(const FieldState& s, const ModelParams& p, const Grid1D& g,
               const PdeOptions& opt = {});

struct StepDiagnostics {
  long clamp_events = 0;
  double min_value = 0;  // over all fields after each step, before clamping
  double max_R = 0;
};

inline constexpr double kUpperTolR = 1e-9;
inline constexpr double kLowerTol = 1e-12;

/// Classical RK4 with reusable workspace. R values outside
/// [-kLowerTol, 1 + kUpperTolR] are clamped and counted.
class Rk4Stepper {
 public:
  Rk4Stepper(const ModelParams& p, const Grid1D& g, PdeOptions opt = {});

  /// Throws DivergenceError on NaN/Inf.
  void step(FieldState& s, double dt, StepDiagnostics& diag);

  /// Explicit stability bound for the current state: dt_safety times the
  /// smallest of the diffusive, reaction and chemotactic-CFL limits.
  double stable_dt(const FieldState& s) const;

  /// Time derivative of `s` written into `out` (same size).
  void eval(const FieldState& s, FieldState& out);

 private:

  ModelParams p_;
  Grid1D g_;
  PdeOptions opt_;
  FieldState k1_, k2_, k3_, k4_, tmp_;
  std::vector<double> flux_, fluxC_;
};

FieldState step(const FieldState& s, const ModelParams& p, const Grid1D& g, double dt,
                StepDiagnostics& diag, const PdeOptions& opt = {});

struct SimulationConfig {
  Grid1D grid{7.0 * std::numbers::pi, 256};
  double t_end = 500;
  double snapshot_every = 1;
  std::uint64_t seed = 1;
  double amplitude = 0.01;
  std::vector<Component> recorded = {kE};
  double wall_clock_budget = 0;  // seconds; 0 disables
  PdeOptions options{};
};

struct SpaceTimeRecord {
  ModelParams params;
  SimulationConfig config;
  std::vector<double> times;
  // snapshots[c][k][i]: component c, snapshot k, cell i. Only the recorded
  // components are filled.
  std::array<std::vector<std::vector<double>>, kNumComponents> snapshots;
  bool incomplete = false;
  long steps = 0;
  double dt_min = 0;
  double dt_max = 0;
  StepDiagnostics diagnostics;

  bool has(Component c) const { return !snapshots[c].empty(); }
};

/// Runs init_state then RK4 steps to t_end. Each snapshot interval is split
/// into equal steps no larger than the stability bound at its start.
SpaceTimeRecord simulate(const ModelParams& p, const SimulationConfig& cfg);

/// Same as simulate but starting from the given state (seed and amplitude
/// of the config are ignored).
SpaceTimeRecord simulate_from(const ModelParams& p, FieldState initial,
                              const SimulationConfig& cfg);

}  // namespace plaque
