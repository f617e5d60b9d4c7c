#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace plaque {

/// Component ordering used for every 5-vector in the library.
enum Component : int { kA = 0, kS = 1, kR = 2, kC = 3, kE = 4 };
inline constexpr int kNumComponents = 5;
using State5 = std::array<double, kNumComponents>;

inline constexpr std::array<std::string_view, kNumComponents> kComponentNames = {
    "A", "S", "R", "C", "E"};

enum class SqueezeKind { Cosine, Quadratic };

/// Volume-filling pair (Phi1, Phi0) on the dimensionless leukocyte density,
/// with the packing limit normalised to 1. Phi0(r) = Phi1(r) - r Phi1'(r).
///
/// Construction checks the admissibility properties on a grid: Phi1(0) = 1,
/// Phi1 in (0,1) on (0,1), Phi1 = 0 for r >= 1, Phi1' <= 0, Phi1'' <= 0.
/// Phi1' at r = 1 is the left derivative, so Phi0(1) = -Phi1'(1); Phi0 is
/// extended by its value at 1 for r > 1.
class Squeeze {
 public:
  explicit Squeeze(SqueezeKind kind = SqueezeKind::Cosine);

  static Squeeze from_name(std::string_view name);

  SqueezeKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept;

  double phi1(double r) const;
  double phi1_prime(double r) const;
  double phi0(double r) const;

  /// Unchecked evaluations for inner loops (r is clamped to >= 0).
  double phi1_fast(double r) const noexcept;
  double phi0_fast(double r) const noexcept;

  /// sup of Phi0 over [0, 1].
  double phi0_max() const noexcept;

 private:
  struct Unchecked {};
  Squeeze(SqueezeKind kind, Unchecked) : kind_(kind) {}
  static bool all_kinds_admissible();

  SqueezeKind kind_;
};

/// Dimensionless coefficients of the reaction-diffusion-chemotaxis model.
struct ModelParams {
  double beta = 0.2;
  double zeta = 2.0;
  double mu = 2.01;
  double delta = 0.1;
  double tau = 0.5;
  double xi = 6.0;
  double eta = 1.0;
  double phi = 1.0;
  double theta = 0.42;
  double Theta = 30.0;
  double Omega = 0.001;
  double Xi = 0.02;
  Squeeze squeeze{};

  /// Reference set: beta=0.2, zeta=2, mu=2.01, tau=0.5, eta=1, phi=1,
  /// delta=0.1, Theta=30, Xi=0.02, Omega=0.001, with theta=0.42, xi=6.
  static ModelParams paper_preset();

  /// Throws ParameterError if any coefficient is not strictly positive
  /// (theta may take any finite value since the Hopf roots can be negative).
  void validate() const;

  /// Non-fatal remarks, e.g. zeta >= mu.
  std::vector<std::string> warnings() const;

  ModelParams with_theta(double t) const {
    ModelParams p = *this;
    p.theta = t;
    return p;
  }
  ModelParams with_xi(double x) const {
    ModelParams p = *this;
    p.xi = x;
    return p;
  }
};

/// Reaction part of the dimensionless system at one point.
/// Throws DomainError when Omega + R == 0.
State5 reaction_terms(const State5& u, const ModelParams& p);

struct Equilibrium {
  double A = 0, S = 0, R = 0, C = 0, E = 0;
  bool admissible = false;
  std::vector<std::string> violated_conditions;

  State5 state() const { return {A, S, R, C, E}; }
};

/// Homogeneous steady state with positive leukocyte density. Admissibility is
/// reported through the flag, never thrown.
Equilibrium equilibrium(const ModelParams& p);

struct AdmissibilityBounds {
  double theta_bar;            // eta/mu + phi (zeta - mu)
  double theta_bar_minus_bp;   // theta_bar - beta phi
  bool contains(double theta) const {
    return theta < theta_bar && theta > theta_bar_minus_bp;
  }
};

AdmissibilityBounds admissibility_bounds(const ModelParams& p);

struct DimensionalParams {
  double alpha = 1.0;
  double p12 = 0.2, p31 = 2.01, p21 = 1.0, pC2 = 1.0;
  double d1 = 2.0, d2 = 0.42, d3 = 1.0, dC = 0.5, d13 = 1.0, d23 = 1.0;
  double b52 = 1.0, b62 = 30.0;
  double r5 = 0.001, r6 = 0.02;
  double R_M = 1.0;
  double E_bar = 1.0;
  double V_cap = 1.0;   // max leukocyte speed
  double W_cap = 1.0;   // max cytokine speed
  double lambda = 1.0;  // leukocyte turning rate
  double sigma = 10.0;  // cytokine turning rate
  double gamma = 4.0;   // microscopic chemotaxis rate
  int n = 1;
  Squeeze squeeze{};

  /// A dimensional set that maps exactly onto ModelParams::paper_preset()
  /// (xi = 6 under the printed chemotactic coefficient).
  static DimensionalParams paper_preset();

  void validate() const;
};

/// Measure of the velocity ball of radius `speed` in dimension n.
double ball_measure(double speed, int n);

struct TransportCoefficients {
  double D_R;
  double D_C;
  double chi;
  double omega;  // |V B^n|
};

/// D_R = V^2/((n+2) lambda), D_C = W^2/((n+2) sigma),
/// chi = gamma omega V/(n+1)^2.
TransportCoefficients transport_coefficients(const DimensionalParams& d);

ModelParams nondimensionalize(const DimensionalParams& d);

/// Same as nondimensionalize but with an externally supplied chemotactic
/// coefficient in place of the closed-form chi.
ModelParams nondimensionalize(const DimensionalParams& d, double chi);

/// Same map with all three transport coefficients supplied by the caller.
ModelParams nondimensionalize(const DimensionalParams& d, const TransportCoefficients& tc);

/// Density, space and time scalings between the dimensional and the
/// dimensionless model.
struct Scaling {
  double A, S, R, C, E;  // dimensional = scale * dimensionless
  double time;           // t_dim = time * t
  double length;         // x_dim = length * x

  static Scaling from(const DimensionalParams& d);
  static Scaling from(const DimensionalParams& d, const TransportCoefficients& tc);

  State5 to_dimensionless(const State5& dim) const;
  State5 to_dimensional(const State5& nd) const;
};

/// Right-hand side of the dimensional reaction system (no transport).
State5 dimensional_reaction_terms(const State5& u, const DimensionalParams& d);

}  // namespace plaque
