#include "plaque/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "plaque/error.hpp"

namespace plaque {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "parameter '" << name << "' must be finite and > 0 (got " << v << ")";
    throw ParameterError(os.str());
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << "parameter '" << name << "' must be finite and >= 0 (got " << v << ")";
    throw ParameterError(os.str());
  }
}

void check_admissible_pair(const Squeeze& s) {
  constexpr int kSamples = 400;
  constexpr double kTol = 1e-12;
  if (std::abs(s.phi1(0.0) - 1.0) > kTol) throw ParameterError("squeeze: Phi1(0) != 1");
  if (s.phi1(1.0) != 0.0 || s.phi1(1.5) != 0.0) {
    throw ParameterError("squeeze: Phi1 must vanish at and beyond the packing limit");
  }
  double prev_slope = s.phi1_prime(0.0);
  for (int i = 1; i < kSamples; ++i) {
    const double r = static_cast<double>(i) / kSamples;
    const double v = s.phi1(r);
    const double slope = s.phi1_prime(r);
    if (!(v > 0.0 && v < 1.0)) throw ParameterError("squeeze: Phi1 must lie in (0,1) on (0,1)");
    if (slope > kTol) throw ParameterError("squeeze: Phi1 must be nonincreasing");
    if (slope > prev_slope + kTol) throw ParameterError("squeeze: Phi1 must be concave");
    if (std::abs(s.phi0(r) - (v - slope * r)) > 1e-12) {
      throw ParameterError("squeeze: Phi0 != Phi1 - r Phi1'");
    }
    prev_slope = slope;
  }
}

}  // namespace

bool Squeeze::all_kinds_admissible() {
  for (auto k : {SqueezeKind::Cosine, SqueezeKind::Quadratic}) {
    check_admissible_pair(Squeeze(k, Unchecked{}));
  }
  return true;
}

// Every built-in pair is checked once, on first construction.
Squeeze::Squeeze(SqueezeKind kind) : kind_(kind) {
  static const bool checked = all_kinds_admissible();
  (void)checked;
}

Squeeze Squeeze::from_name(std::string_view name) {
  if (name == "cosine") return Squeeze(SqueezeKind::Cosine);
  if (name == "quadratic") return Squeeze(SqueezeKind::Quadratic);
  throw ParameterError("unknown squeeze function '" + std::string(name) + "'");
}

std::string_view Squeeze::name() const noexcept {
  switch (kind_) {
    case SqueezeKind::Cosine:
      return "cosine";
    case SqueezeKind::Quadratic:
      return "quadratic";
  }
  return "cosine";
}

double Squeeze::phi1(double r) const {
  if (r < 0.0) throw DomainError("squeeze: negative density");
  return phi1_fast(r);
}

double Squeeze::phi1_prime(double r) const {
  if (r < 0.0) throw DomainError("squeeze: negative density");
  // Left derivative at the packing limit; identically zero beyond it.
  if (r > 1.0) return 0.0;
  switch (kind_) {
    case SqueezeKind::Cosine:
      return -kHalfPi * std::sin(kHalfPi * r);
    case SqueezeKind::Quadratic:
      return -2.0 * r;
  }
  return 0.0;
}

double Squeeze::phi0(double r) const {
  if (r < 0.0) throw DomainError("squeeze: negative density");
  return phi0_fast(r);
}

double Squeeze::phi1_fast(double r) const noexcept {
  if (r >= 1.0) return 0.0;
  if (r < 0.0) r = 0.0;
  switch (kind_) {
    case SqueezeKind::Cosine:
      return std::cos(kHalfPi * r);
    case SqueezeKind::Quadratic:
      return 1.0 - r * r;
  }
  return 0.0;
}

double Squeeze::phi0_fast(double r) const noexcept {
  if (r < 0.0) r = 0.0;
  // Phi0 is taken constant beyond the packing limit so that transient
  // overshoots of R still diffuse.
  if (r > 1.0) r = 1.0;
  switch (kind_) {
    case SqueezeKind::Cosine:
      return std::cos(kHalfPi * r) + kHalfPi * r * std::sin(kHalfPi * r);
    case SqueezeKind::Quadratic:
      return 1.0 + r * r;
  }
  return 1.0;
}

double Squeeze::phi0_max() const noexcept {
  switch (kind_) {
    case SqueezeKind::Cosine:
      return kHalfPi;
    case SqueezeKind::Quadratic:
      return 2.0;
  }
  return kHalfPi;
}

ModelParams ModelParams::paper_preset() { return ModelParams{}; }

void ModelParams::validate() const {
  require_positive(beta, "beta");
  require_positive(zeta, "zeta");
  require_positive(mu, "mu");
  require_positive(delta, "delta");
  require_positive(tau, "tau");
  require_positive(xi, "xi");
  require_positive(eta, "eta");
  require_positive(phi, "phi");
  require_positive(Theta, "Theta");
  require_positive(Omega, "Omega");
  require_positive(Xi, "Xi");
  if (!std::isfinite(theta)) throw ParameterError("parameter 'theta' must be finite");
}

std::vector<std::string> ModelParams::warnings() const {
  std::vector<std::string> out;
  if (!(zeta < mu)) {
    out.emplace_back("zeta >= mu: the condition theta < eta/mu is no longer implied by theta < theta_bar");
  }
  return out;
}

State5 reaction_terms(const State5& u, const ModelParams& p) {
  const double A = u[kA], S = u[kS], R = u[kR], C = u[kC], E = u[kE];
  const double denom = p.Omega + R;
  if (denom == 0.0) throw DomainError("reaction_terms: Omega + R == 0");
  return {
      1.0 + p.beta * A * R - A * S - p.zeta * A,
      p.mu * A * S - S,
      p.eta * A * R - p.phi * R * S - p.theta * R,
      A * R - p.tau * C,
      p.Theta * R * R * (1.0 - E) / denom - p.Xi * E,
  };
}

AdmissibilityBounds admissibility_bounds(const ModelParams& p) {
  const double tb = p.eta / p.mu + p.phi * (p.zeta - p.mu);
  return {tb, tb - p.beta * p.phi};
}

Equilibrium equilibrium(const ModelParams& p) {
  Equilibrium e;
  e.A = 1.0 / p.mu;
  e.S = (p.eta - p.theta * p.mu) / (p.mu * p.phi);
  e.R = (-p.theta * p.mu + p.eta + p.mu * p.phi * (p.zeta - p.mu)) / (p.beta * p.mu * p.phi);
  e.C = e.R / (p.mu * p.tau);
  const double r2t = e.R * e.R * p.Theta;
  e.E = r2t / (r2t + e.R * p.Xi + p.Xi * p.Omega);

  auto check = [&](bool ok, const char* what) {
    if (!ok) e.violated_conditions.emplace_back(what);
  };
  check(e.A > 0.0, "A1 > 0");
  check(e.S > 0.0, "S1 > 0");
  check(e.R > 0.0, "R1 > 0");
  check(e.R <= 1.0, "R1 <= 1");
  check(e.C > 0.0, "C1 > 0");
  check(e.E > 0.0, "E1 > 0");
  const auto b = admissibility_bounds(p);
  check(p.theta < p.eta / p.mu, "theta < eta/mu");
  check(p.theta < b.theta_bar, "theta < theta_bar");
  check(p.theta > b.theta_bar_minus_bp, "theta > theta_bar - beta phi");
  e.admissible = e.violated_conditions.empty();
  return e;
}

DimensionalParams DimensionalParams::paper_preset() { return DimensionalParams{}; }

void DimensionalParams::validate() const {
  require_positive(alpha, "alpha");
  require_positive(p12, "p12");
  require_positive(p31, "p31");
  require_positive(p21, "p21");
  require_positive(pC2, "pC2");
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  require_positive(dC, "dC");
  require_positive(d13, "d13");
  require_positive(d23, "d23");
  require_positive(b52, "b52");
  require_positive(b62, "b62");
  require_positive(r5, "r5");
  require_positive(r6, "r6");
  require_positive(R_M, "R_M");
  require_positive(E_bar, "E_bar");
  require_positive(V_cap, "V_cap");
  require_positive(W_cap, "W_cap");
  require_positive(lambda, "lambda");
  require_positive(sigma, "sigma");
  require_nonnegative(gamma, "gamma");
  if (n < 1 || n > 3) throw ParameterError("parameter 'n' must be 1, 2 or 3");
}

double ball_measure(double speed, int n) {
  switch (n) {
    case 1:
      return 2.0 * speed;
    case 2:
      return std::numbers::pi * speed * speed;
    case 3:
      return 4.0 / 3.0 * std::numbers::pi * speed * speed * speed;
    default:
      throw ParameterError("space dimension must be 1, 2 or 3");
  }
}

TransportCoefficients transport_coefficients(const DimensionalParams& d) {
  if (d.lambda == 0.0) throw ParameterError("lambda is zero: D_R undefined");
  if (d.sigma == 0.0) throw ParameterError("sigma is zero: D_C undefined");
  const double n = d.n;
  TransportCoefficients t{};
  t.omega = ball_measure(d.V_cap, d.n);
  t.D_R = d.V_cap * d.V_cap / ((n + 2.0) * d.lambda);
  t.D_C = d.W_cap * d.W_cap / ((n + 2.0) * d.sigma);
  t.chi = d.gamma * t.omega * d.V_cap / ((n + 1.0) * (n + 1.0));
  return t;
}

ModelParams nondimensionalize(const DimensionalParams& d) {
  return nondimensionalize(d, transport_coefficients(d).chi);
}

ModelParams nondimensionalize(const DimensionalParams& d, double chi) {
  auto tc = transport_coefficients(d);
  tc.chi = chi;
  return nondimensionalize(d, tc);
}

ModelParams nondimensionalize(const DimensionalParams& d, const TransportCoefficients& tc) {
  auto nonzero = [](double v, const char* name) {
    if (v == 0.0) throw ParameterError(std::string("zero denominator: '") + name + "'");
  };
  nonzero(d.d3, "d3");
  nonzero(d.d13, "d13");
  nonzero(d.b52, "b52");
  nonzero(d.R_M, "R_M");
  nonzero(tc.D_R, "D_R");
  const double d3sq = d.d3 * d.d3;

  ModelParams p;
  p.beta = d.R_M * d.p12 / d.d3;
  p.zeta = d.d1 / d.d3;
  p.mu = d.p31 * d.alpha / d3sq;
  p.delta = tc.D_C / tc.D_R;
  p.tau = d.dC / d.d3;
  p.xi = tc.chi * d.pC2 * d.alpha * d.R_M / (tc.D_R * d3sq);
  p.eta = d.p21 * d.alpha / d3sq;
  p.phi = d.d23 / d.d13;
  p.theta = d.d2 / d.d3;
  // The density scale R_M enters through the quadratic damage term.
  p.Theta = d.b62 * d.R_M / d.d3;
  p.Omega = d.r5 / (d.R_M * d.b52);
  p.Xi = d.r6 / d.d3;
  p.squeeze = d.squeeze;
  return p;
}

Scaling Scaling::from(const DimensionalParams& d) { return from(d, transport_coefficients(d)); }

Scaling Scaling::from(const DimensionalParams& d, const TransportCoefficients& tc) {
  Scaling s{};
  s.A = d.alpha / d.d3;
  s.S = d.d3 / d.d13;
  s.R = d.R_M;
  s.C = d.pC2 * d.alpha * d.R_M / (d.d3 * d.d3);
  s.E = d.E_bar;
  s.time = 1.0 / d.d3;
  s.length = std::sqrt(tc.D_R / d.d3);
  return s;
}

State5 Scaling::to_dimensionless(const State5& u) const {
  return {u[kA] / A, u[kS] / S, u[kR] / R, u[kC] / C, u[kE] / E};
}

State5 Scaling::to_dimensional(const State5& u) const {
  return {u[kA] * A, u[kS] * S, u[kR] * R, u[kC] * C, u[kE] * E};
}

State5 dimensional_reaction_terms(const State5& u, const DimensionalParams& d) {
  const double A = u[kA], S = u[kS], R = u[kR], C = u[kC], E = u[kE];
  const double damage = d.b52 * d.b62 * R / (d.r5 + d.b52 * R);
  return {
      d.alpha + d.p12 * A * R - d.d13 * A * S - d.d1 * A,
      d.p31 * S * A - d.d3 * S,
      d.p21 * R * A - d.d23 * R * S - d.d2 * R,
      d.pC2 * A * R - d.dC * C,
      (d.E_bar - E) * damage * R - d.r6 * E,
  };
}

}  // namespace plaque
