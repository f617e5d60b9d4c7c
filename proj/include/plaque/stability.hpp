#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "plaque/model.hpp"

namespace plaque {

using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Which cytokine row the Jacobian uses. `Printed` has row (0, 0, 1, -tau, 0),
/// the form behind the closed-form dispersion relation and threshold.
/// `Exact` differentiates the source A R and gives (R1, 0, A1, -tau, 0); it is
/// the linearisation the PDE solver actually follows.
enum class JacobianForm { Printed, Exact };
JacobianForm jacobian_form_from_name(std::string_view name);
std::string_view to_string(JacobianForm f);

/// Jacobian of the reaction terms at the equilibrium and the transport
/// matrix of the linearised system, both in (A, S, R, C, E) ordering.
struct LinearizedSystem {
  Matrix5 jacobian;
  Matrix5 diffusion;
};

/// Throws PreconditionError if the equilibrium is not admissible.
LinearizedSystem linearize(const ModelParams& p, const Equilibrium& eq,
                           JacobianForm form = JacobianForm::Printed);
LinearizedSystem linearize(const ModelParams& p, JacobianForm form = JacobianForm::Printed);

/// Coefficients of lambda^3 + a1 lambda^2 + a2 lambda + a3 for the (A,S,R)
/// block of the Jacobian.
struct RouthHurwitz {
  double a1 = 0, a2 = 0, a3 = 0;
  bool stable = false;
  double hopf_margin() const { return a1 * a2 - a3; }
};

RouthHurwitz routh_hurwitz(const ModelParams& p);

struct HopfThresholds {
  double theta_minus;
  double theta_plus;
};

double hopf_discriminant(const ModelParams& p);

/// nullopt when the discriminant is negative.
std::optional<HopfThresholds> theta_hopf(const ModelParams& p);

/// 2 pi / sqrt(a2); nullopt when a2 <= 0.
std::optional<double> hopf_period(double a2);
std::optional<double> hopf_period(const ModelParams& p);

/// h(k^2) = c2 k^4 + c1 k^2 + c0.
struct DispersionQuadratic {
  double c2 = 0, c1 = 0, c0 = 0;

  double operator()(double k2) const { return (c2 * k2 + c1) * k2 + c0; }
  /// Minimiser over k^2 >= 0.
  double argmin() const { return c1 < 0.0 ? -c1 / (2.0 * c2) : 0.0; }
  double minimum() const { return (*this)(argmin()); }
};

DispersionQuadratic dispersion_coefficients(const ModelParams& p);
double dispersion_h(double k2, const ModelParams& p);

/// Factor relating det(A - k^2 D) to h(k^2).
double determinant_prefactor(const ModelParams& p);

/// Threshold on xi above which h(k^2) dips below zero. nullopt when
/// Phi1(R1) R1 vanishes (R1 <= 0 or R1 >= 1).
std::optional<double> turing_threshold_xi(const ModelParams& p);

/// Homogeneously stable and xi strictly above the threshold.
bool turing_unstable(const ModelParams& p);

struct ModeSpectrum {
  double k = 0;
  std::array<std::complex<double>, 5> eigenvalues{};
  double max_real = 0;
};

struct GrowthScan {
  std::vector<ModeSpectrum> modes;
  std::vector<double> unstable_k;  // k with max Re lambda > 0

  const ModeSpectrum& fastest() const;
};

/// Eigenvalues of A - k^2 D for each wavenumber k.
GrowthScan growth_rates(const ModelParams& p, std::span<const double> k_list,
                        JacobianForm form = JacobianForm::Printed);

/// Smallest xi on [0, xi_max] at which some k in (0, k_max] has a positive
/// growth rate, by bisection on the eigenvalue route; nullopt if none.
std::optional<double> eigen_threshold_xi(const ModelParams& p, JacobianForm form,
                                         double xi_max = 100.0, double k_max = 10.0);

/// k_m = m pi / L for m = 0..m_max (zero-flux modes on [0, L]).
std::vector<double> neumann_wavenumbers(double length, int m_max);

enum class Regime { Inadmissible, HomogeneousUnstable, Stable, Turing };
std::string_view to_string(Regime r);

/// Exact tie xi == xi* is classified Stable.
Regime classify(const ModelParams& p);

struct DispersionSample {
  double k2;
  double h;
  double max_real;
};

struct StabilityReport {
  Equilibrium equilibrium;
  AdmissibilityBounds bounds{};
  RouthHurwitz rh;
  std::optional<HopfThresholds> hopf;
  bool hopf_point_admissible = false;  // theta_plus inside the admissible interval
  std::optional<double> xi_star;
  std::optional<double> hopf_period;
  bool homogeneous_stable = false;
  bool turing_unstable = false;
  Regime regime = Regime::Inadmissible;
  std::vector<DispersionSample> dispersion;
  // Zero-flux modes on a domain of the given length.
  std::vector<int> unstable_modes;  // indices m with max Re lambda(k_m) > 0
  int fastest_mode = -1;
  double fastest_rate = 0;
  // Set when the determinant route and the eigenvalue route disagree about
  // instability (e.g. oscillatory instabilities that h cannot see).
  bool routes_disagree = false;
};

/// Full linear analysis. When the equilibrium is inadmissible the report
/// carries only the thresholds and the regime.
StabilityReport analyze(const ModelParams& p, std::span<const double> k2_samples,
                        double domain_length, int m_max,
                        JacobianForm form = JacobianForm::Printed);

struct AxisRange {
  double lo;
  double hi;
  int points;
  double at(int i) const {
    return points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  }
};

struct BifurcationCell {
  double theta;
  double xi;
  Regime regime;
};

struct XiStarSample {
  double theta;
  std::optional<double> xi_star;
};

struct BifurcationDiagram {
  AxisRange theta;
  AxisRange xi;
  std::vector<BifurcationCell> cells;  // theta-major
  double theta_bar = 0;
  double theta_bar_minus_bp = 0;
  std::optional<HopfThresholds> hopf;
  std::vector<XiStarSample> xi_star_curve;
};

/// Classifies every (theta, xi) cell; work is split over `threads` workers
/// and results are ordered by input index.
BifurcationDiagram bifurcation_diagram(const ModelParams& base, AxisRange theta, AxisRange xi,
                                       int threads = 1);

}  // namespace plaque
