#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plaque/model.hpp"
#include "plaque/pde.hpp"

namespace plaque {

/// Symmetric midpoint nodes on [-V, V] (v = 0 is never a node).
struct VelocityGrid {
  double V = 1;
  int M = 16;
  std::vector<double> v;
  std::vector<double> w;
  double omega = 2;  // measure of [-V, V]

  /// Throws ParameterError unless M is even, M >= 2 and V > 0.
  VelocityGrid(double speed, int nodes);

  /// sum_j w_j v_j^2 (2 V^3 / 3 in the continuum).
  double second_moment() const;
};

/// Transport coefficients implied by the discrete velocity grids, for the
/// chemotactic sensitivity Phi0(R) Phi1(R) R that the velocity-jump model
/// produces: D_R = m2/(omega lambda), D_C = m2_C/(omega_C sigma),
/// chi = gamma m2 / V.
TransportCoefficients kinetic_transport_coefficients(const DimensionalParams& d,
                                                     const VelocityGrid& vr,
                                                     const VelocityGrid& vc);

/// (lambda / Phi0(R/R_M)) (-f_j + (1/omega) sum_k w_k f_k).
/// Throws NumericalError when Phi0 is not positive.
std::vector<double> turning_L0_R(std::span<const double> f, double R, double R_M, double lambda,
                                 const Squeeze& sq, const VelocityGrid& g);

/// lambda gamma Phi1(R/R_M) (v_j / V) dC/dx sum_k w_k f_k.
std::vector<double> turning_L1_R(std::span<const double> f, double R, double R_M, double dCdx,
                                 double lambda, double gamma, const Squeeze& sq,
                                 const VelocityGrid& g);

/// sigma (-f_j + (1/omega_C) sum_k w_k f_k).
std::vector<double> turning_LC(std::span<const double> f, double sigma, const VelocityGrid& g);

enum class TransportScheme { Central, Upwind };
TransportScheme transport_from_name(std::string_view name);
std::string_view to_string(TransportScheme s);

struct KineticOptions {
  double eps = 0.05;
  int M = 16;
  int M_C = 16;
  TransportScheme transport = TransportScheme::Central;
  bool interactions = true;  // all reaction, production and decay terms
  bool frozen_C = false;     // keep C at its initial profile
  double dt_safety = 0.4;
  double dt = 0;  // fixed step; 0 picks the stability bound
};

/// Distributions are stored cell-major: fR[i * M + j].
struct KineticState {
  double t = 0;
  int N = 0;
  int M = 0;
  int MC = 0;
  double eps = 0;
  std::vector<double> fR, fC;
  std::vector<double> A, S, E1, E2, E;
  std::vector<double> C_frozen;  // used instead of moments of fC when non-empty
};

/// Velocity-uniform lift of dimensional macroscopic data: fR = R/(2V),
/// fC = C/(2W). Myelin is split with E2 at the value that balances the slow
/// E1 <-> E2 exchange: E2 = (E_bar - E) b52 R/(r5 + b52 R).
KineticState lift(const DimensionalParams& d, const FieldState& macro, const KineticOptions& opt);

/// R, C from velocity quadrature; A, S, E passed through (E = E_bar - E1 - E2
/// is reported as the evolved E, which agrees to round-off).
FieldState moments(const KineticState& s, const DimensionalParams& d);

/// sum_j w_j v_j fR(i, j) per cell.
std::vector<double> flux_moment_R(const KineticState& s, const DimensionalParams& d);

struct KineticDiagnostics {
  long negative_events = 0;   // fR or fC entries below -1e-12 after a step
  double max_myelin_error = 0;  // max |E1 + E2 + E - E_bar|
};

class KineticSolver {
 public:
  KineticSolver(const DimensionalParams& d, const Grid1D& g, KineticOptions opt);

  /// Time derivative of every field of `s`.
  void rhs(const KineticState& s, KineticState& out);

  /// Forward Euler. Throws DivergenceError on NaN/Inf.
  void step(KineticState& s, double dt, KineticDiagnostics& diag);

  /// Largest step satisfying the relaxation, transport and diffusion limits,
  /// times dt_safety.
  double stable_dt() const;

  const VelocityGrid& vgrid_R() const { return vr_; }
  const VelocityGrid& vgrid_C() const { return vc_; }

 private:
  void advect(std::span<const double> f, int M, const VelocityGrid& g, std::vector<double>& out) const;

  DimensionalParams d_;
  Grid1D g_;
  KineticOptions opt_;
  VelocityGrid vr_, vc_;
  KineticState k_;
  std::vector<double> R_, C_, dC_, adv_;
};

struct KineticRun {
  KineticState state;
  FieldState macro;
  KineticDiagnostics diagnostics;
  long steps = 0;
  double dt = 0;
};

KineticRun run_kinetic(const DimensionalParams& d, const Grid1D& g, const FieldState& macro0,
                       double t_end, const KineticOptions& opt);

struct LimitEntry {
  double eps = 0;
  double error_R = 0;
  double error_C = 0;
  double error_A = 0;
  double error_S = 0;
  std::optional<double> order_R;  // against the previous entry
  long steps = 0;
  long negative_events = 0;
  std::string failure;  // non-empty if the kinetic run diverged
  FieldState macro;       // kinetic moments at t_probe
  std::vector<double> flux_R;
  FieldState reference;   // macroscopic solution at t_probe
};

struct DiffusiveLimitSetup {
  Grid1D grid{12.0, 128};  // dimensional length
  double t_probe = 1.0;
  double amplitude = 0.05;
  int threads = 1;
  KineticOptions kinetic{};
};

/// Smooth small-amplitude data around the dimensional equilibrium:
/// R = R*(1 + a cos(2 pi x/L)), C = C*(1 + a cos(3 pi x/L)), A, S, E at rest.
FieldState limit_initial_data(const DimensionalParams& d, const Grid1D& g, double amplitude);

/// Runs the kinetic model for each eps and the macroscopic PDE (kinetic-limit
/// sensitivity, coefficients from the discrete velocity moments) on the same
/// cells, and reports discrete L2 errors of the moments at t_probe. Entries
/// are ordered as eps_list regardless of completion order.
std::vector<LimitEntry> diffusive_limit_error(const DimensionalParams& d,
                                              std::span<const double> eps_list,
                                              const DiffusiveLimitSetup& setup);

/// Decay rate of a single cosine mode of R under pure transport and random
/// turning (no interactions, gamma = 0), measured between t = 0 and t_end
/// from a low-density background so that Phi0 ~ 1.
struct ModeDecay {
  double k = 0;
  double measured = 0;
  double predicted = 0;  // V^2/(3 lambda) k^2
};

ModeDecay mode_decay_rate(const DimensionalParams& d, const Grid1D& g, int mode, double eps,
                          double t_end, const KineticOptions& opt = {});

}  // namespace plaque
