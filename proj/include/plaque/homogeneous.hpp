#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plaque/model.hpp"

namespace plaque {

struct Trajectory {
  std::vector<double> t;
  std::vector<State5> u;
  State5 min{};  // componentwise minimum over the run
  double max_R = 0;

  std::vector<double> component(int c) const;
};

using VectorField = std::function<State5(const State5&)>;

/// Classical RK4 with a uniform step dt' = t_end / ceil(t_end / dt), every step
/// recorded. Throws PreconditionError for negative initial data or dt <= 0 and
/// DivergenceError on a non-finite state.
Trajectory rk4_integrate(const VectorField& f, const State5& initial, double t_end, double dt);

/// Reaction-only dimensionless system.
Trajectory ode_simulate(const ModelParams& p, const State5& initial, double t_end, double dt);

/// Reaction-only dimensional system (densities).
Trajectory ode_simulate(const DimensionalParams& d, const State5& initial, double t_end, double dt);

/// Total populations n = U |V| of a homogeneous system of volume |V|. Bilinear
/// and myelin saturation rates are rescaled p* = p/|V|, the source
/// alpha* = alpha |V| and the myelin capacity n_E_hat = E_bar |V|.
struct PopulationSystem {
  DimensionalParams d;
  double volume = 1;

  explicit PopulationSystem(const DimensionalParams& dp, double vol = 1.0);
  State5 rhs(const State5& n) const;
  double alpha_star() const { return d.alpha * volume; }
  double pC2_star() const { return d.pC2 / volume; }
  double nE_hat() const { return d.E_bar * volume; }
};

Trajectory population_simulate(const PopulationSystem& sys, const State5& initial, double t_end,
                               double dt);

/// Rates of the destroyed-myelin equation
///   E' = (n_hat - E) b62 b52 R^2/(r5 + b52 R) - r6 E.
struct MyelinRates {
  double b52 = 1, b62 = 1, r5 = 1, r6 = 1, n_hat = 1;

  static MyelinRates from(const PopulationSystem& sys);
  /// b52 = 1, b62 = Theta, r5 = Omega, r6 = Xi, n_hat = 1.
  static MyelinRates from(const ModelParams& p);
  double damage(double R) const { return b62 * b52 * R * R / (r5 + b52 * R); }
};

/// n_C(t) = e^{-dC t} [n_C(0) + p int_0^t e^{dC s} n_A n_R ds], trapezoidal rule
/// on the sample grid. Throws PreconditionError on mismatched or unsorted grids.
std::vector<double> closed_form_nC(std::span<const double> t, std::span<const double> nA,
                                   std::span<const double> nR, double dC, double pC2_star,
                                   double nC0);

/// n_E(t) = e^{-I(t)} [n_E(0) + n_hat int_0^t e^{I(u)} k(u) du],
/// I(t) = int_0^t (k + r6), k = b62 b52 n_R^2/(r5 + b52 n_R); trapezoidal
/// quadrature on the sample grid.
std::vector<double> closed_form_nE(std::span<const double> t, std::span<const double> nR,
                                   const MyelinRates& rates, double nE0);

/// Forward-Euler iteration U_{i+1} = U_i + F(U_i) dt.
struct EulerRun {
  double dt = 0;
  long steps = 0;
  State5 min{};
  State5 final{};
  bool positive = true;  // every component >= 0 at every computed step
  bool bounded = true;   // false if the run was stopped after exceeding 1e8
};

struct EulerPositivityReport {
  std::vector<EulerRun> runs;  // in dt_list order
  // Positivity at some dt implies positivity at every smaller dt in the list.
  bool refinement_consistent = true;
};

/// dt = 0 returns the initial state unchanged. Throws PreconditionError for
/// negative initial data or negative dt.
EulerPositivityReport euler_positivity_harness(const ModelParams& p, const State5& initial,
                                               std::span<const double> dt_list, double t_end);

struct DtStarReport {
  std::optional<double> dt_star;  // largest probed dt with positivity for every start
  std::vector<double> dt_probed;
  std::vector<int> violations;  // bounded runs losing positivity, per probed dt
  std::vector<int> unbounded;   // runs stopped after blowing up, per probed dt
  int initial_conditions = 0;
  double min_value_at_dt_star = 0;
};

/// Probes starts on a tensor grid {0, 1/(k-1), ..., 1} * 2 U1 (k = points per
/// axis) with dt = dt_max, dt_max/2, ... (levels values). dt_star is the
/// largest dt for which it and every smaller probed dt keep all bounded runs
/// >= 0. Starts with S = 0 lie on an invariant face where A and R blow up in
/// finite time; such runs are counted in `unbounded` instead.
DtStarReport positivity_dt_star(const ModelParams& p, int points_per_axis, double dt_max,
                                int levels, double t_end, int threads = 1);

/// Reduced (R, C) system with A, S, E at their quasi-steady values:
/// f(R) = a R (1 - (b/a) R), g(R, C) = (pC2 d3/p31) R - dC C.
struct ReducedSystem {
  double a = 0;
  double b = 0;
  double a_printed = 0;
  double b_printed = 0;
  bool corrected = true;  // a, b are the corrected coefficients
  double c_source = 0;    // pC2 d3 / p31
  double dC = 0;
  double A = 0;          // d3/p31
  double S0 = 0, S1 = 0;  // S = S0 + S1 R
  bool a_positive = false;

  double f(double R) const { return a * R * (1.0 - (b / a) * R); }
  double g(double R, double C) const { return c_source * R - dC * C; }
  double E(const DimensionalParams& d, double R) const;
  /// (R, C) = (a/b, c_source a/(b dC)); nullopt when b == 0.
  std::optional<std::pair<double, double>> fixed_point() const;
};

/// printed: a = p21 d2/p31 - d23 (alpha p31 - d1 d3)/(d2 d13) - d2, b = p12 d2/d13.
/// corrected (substituting A and S into the R equation):
/// a = p21 d3/p31 - d23 (alpha p31 - d1 d3)/(d3 d13) - d2, b = d23 p12/d13.
ReducedSystem reduced_system(const DimensionalParams& d, bool corrected = true);

/// Mean spacing of successive upward crossings of the time mean of `series`
/// for samples with t >= t_from; nullopt with fewer than three crossings.
std::optional<double> measure_period(std::span<const double> t, std::span<const double> series,
                                     double t_from);

}  // namespace plaque
