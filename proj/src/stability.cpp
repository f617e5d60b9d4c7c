#include "plaque/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "plaque/error.hpp"

namespace plaque {

JacobianForm jacobian_form_from_name(std::string_view name) {
  if (name == "printed") return JacobianForm::Printed;
  if (name == "exact") return JacobianForm::Exact;
  throw ParameterError("unknown jacobian form '" + std::string(name) + "'");
}

std::string_view to_string(JacobianForm f) {
  return f == JacobianForm::Printed ? "printed" : "exact";
}

LinearizedSystem linearize(const ModelParams& p, const Equilibrium& eq, JacobianForm form) {
  if (!eq.admissible) {
    throw PreconditionError("linearize: equilibrium is not admissible");
  }
  const double R1 = eq.R;
  LinearizedSystem sys;
  Matrix5& a = sys.jacobian;
  a.setZero();
  a(0, 0) = -p.mu;
  a(0, 1) = -1.0 / p.mu;
  a(0, 2) = p.beta / p.mu;
  a(1, 0) = (p.eta - p.theta * p.mu) / p.phi;
  a(2, 0) = R1 * p.eta;
  a(2, 1) = -R1 * p.phi;
  if (form == JacobianForm::Printed) {
    a(3, 2) = 1.0;
  } else {
    a(3, 0) = R1;
    a(3, 2) = eq.A;
  }
  a(3, 3) = -p.tau;
  const double r_omega = R1 + p.Omega;
  const double core = R1 * (R1 * p.Theta + p.Xi) + p.Xi * p.Omega;
  a(4, 2) = R1 * p.Theta * p.Xi * (R1 + 2.0 * p.Omega) / (r_omega * core);
  a(4, 4) = -p.Xi - R1 * R1 * p.Theta / r_omega;

  Matrix5& d = sys.diffusion;
  d.setZero();
  d(2, 2) = p.squeeze.phi0(R1);
  d(2, 3) = -p.xi * p.squeeze.phi1(R1) * R1;
  d(3, 3) = p.delta;
  return sys;
}

LinearizedSystem linearize(const ModelParams& p, JacobianForm form) {
  return linearize(p, equilibrium(p), form);
}

RouthHurwitz routh_hurwitz(const ModelParams& p) {
  const double R1 = equilibrium(p).R;
  RouthHurwitz rh;
  rh.a1 = p.mu;
  rh.a2 = -R1 * p.beta * p.eta / p.mu - p.theta / p.phi + p.eta / (p.mu * p.phi);
  rh.a3 = R1 * p.beta * (p.eta - p.theta * p.mu) / p.mu;
  rh.stable = rh.a1 > 0.0 && rh.a3 > 0.0 && rh.a1 * rh.a2 > rh.a3;
  return rh;
}

double hopf_discriminant(const ModelParams& p) {
  const double sq = p.mu - p.zeta * p.phi + p.mu * p.phi;
  return p.eta * p.eta + 2.0 * p.eta * p.mu * (p.phi - 1.0) - 2.0 * p.zeta * p.eta * p.phi +
         sq * sq;
}

std::optional<HopfThresholds> theta_hopf(const ModelParams& p) {
  const double disc = hopf_discriminant(p);
  if (disc < 0.0) return std::nullopt;
  const double centre = p.eta / p.mu + 0.5 * (-p.mu * (1.0 + p.phi) + (p.eta + p.zeta * p.phi));
  const double half = 0.5 * std::sqrt(disc);
  return HopfThresholds{centre - half, centre + half};
}

std::optional<double> hopf_period(double a2) {
  if (!(a2 > 0.0)) return std::nullopt;
  return 2.0 * std::numbers::pi / std::sqrt(a2);
}

std::optional<double> hopf_period(const ModelParams& p) { return hopf_period(routh_hurwitz(p).a2); }

DispersionQuadratic dispersion_coefficients(const ModelParams& p) {
  const double R1 = equilibrium(p).R;
  const double f0 = p.squeeze.phi0(std::max(R1, 0.0));
  const double f1 = p.squeeze.phi1(std::max(R1, 0.0));
  const double rbp = R1 * p.beta * p.phi;
  DispersionQuadratic q;
  q.c2 = p.delta * f0;
  q.c1 = p.delta * rbp - f1 * R1 * p.xi + f0 * p.tau;
  q.c0 = p.tau * rbp;
  return q;
}

double dispersion_h(double k2, const ModelParams& p) { return dispersion_coefficients(p)(k2); }

double determinant_prefactor(const ModelParams& p) {
  const double R1 = equilibrium(p).R;
  return (p.theta * p.mu - p.eta) * (R1 * (R1 * p.Theta + p.Xi) + p.Xi * p.Omega) /
         (p.mu * p.phi * (R1 + p.Omega));
}

std::optional<double> turing_threshold_xi(const ModelParams& p) {
  const double R1 = equilibrium(p).R;
  if (!(R1 > 0.0) || R1 >= 1.0) return std::nullopt;
  const double f0 = p.squeeze.phi0(R1);
  const double f1r = p.squeeze.phi1(R1) * R1;
  if (f1r <= 0.0) return std::nullopt;
  const double rbp = R1 * p.beta * p.phi;
  return (2.0 * std::sqrt(p.delta * f0 * p.tau * rbp) + p.delta * rbp + f0 * p.tau) / f1r;
}

bool turing_unstable(const ModelParams& p) { return classify(p) == Regime::Turing; }

const ModeSpectrum& GrowthScan::fastest() const {
  if (modes.empty()) throw PreconditionError("growth scan is empty");
  return *std::max_element(modes.begin(), modes.end(), [](const auto& a, const auto& b) {
    return a.max_real < b.max_real;
  });
}

GrowthScan growth_rates(const ModelParams& p, std::span<const double> k_list,
                        JacobianForm form) {
  const auto eq = equilibrium(p);
  if (!eq.admissible) throw PreconditionError("growth_rates: equilibrium is not admissible");
  const auto sys = linearize(p, eq, form);
  GrowthScan scan;
  scan.modes.reserve(k_list.size());
  Eigen::EigenSolver<Matrix5> solver;
  for (double k : k_list) {
    const Matrix5 m = sys.jacobian - k * k * sys.diffusion;
    solver.compute(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigenvalue solver did not converge at k = " << k;
      throw NumericalError(os.str());
    }
    ModeSpectrum ms;
    ms.k = k;
    ms.max_real = -INFINITY;
    for (int i = 0; i < 5; ++i) {
      ms.eigenvalues[i] = solver.eigenvalues()(i);
      ms.max_real = std::max(ms.max_real, ms.eigenvalues[i].real());
    }
    if (ms.max_real > 0.0) scan.unstable_k.push_back(k);
    scan.modes.push_back(ms);
  }
  return scan;
}

std::optional<double> eigen_threshold_xi(const ModelParams& p, JacobianForm form, double xi_max,
                                         double k_max) {
  constexpr int kSamples = 400;
  std::vector<double> ks(kSamples);
  for (int i = 0; i < kSamples; ++i) ks[i] = k_max * (i + 1) / kSamples;
  auto unstable = [&](double xi) {
    return !growth_rates(p.with_xi(xi), ks, form).unstable_k.empty();
  };
  if (unstable(0.0)) return 0.0;
  if (!unstable(xi_max)) return std::nullopt;
  double lo = 0.0, hi = xi_max;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (unstable(mid) ? hi : lo) = mid;
  }
  return hi;
}

std::vector<double> neumann_wavenumbers(double length, int m_max) {
  std::vector<double> k(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m) k[m] = m * std::numbers::pi / length;
  return k;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Inadmissible:
      return "inadmissible";
    case Regime::HomogeneousUnstable:
      return "homogeneous-unstable";
    case Regime::Stable:
      return "stable";
    case Regime::Turing:
      return "turing";
  }
  return "inadmissible";
}

Regime classify(const ModelParams& p) {
  if (!equilibrium(p).admissible) return Regime::Inadmissible;
  if (!routh_hurwitz(p).stable) return Regime::HomogeneousUnstable;
  const auto xs = turing_threshold_xi(p);
  if (xs && p.xi > *xs) return Regime::Turing;
  return Regime::Stable;
}

StabilityReport analyze(const ModelParams& p, std::span<const double> k2_samples,
                        double domain_length, int m_max, JacobianForm form) {
  StabilityReport rep;
  rep.equilibrium = equilibrium(p);
  rep.bounds = admissibility_bounds(p);
  rep.rh = routh_hurwitz(p);
  rep.hopf = theta_hopf(p);
  if (rep.hopf) {
    rep.hopf_point_admissible = rep.bounds.contains(rep.hopf->theta_plus);
  }
  rep.regime = classify(p);
  if (!rep.equilibrium.admissible) return rep;

  rep.xi_star = turing_threshold_xi(p);
  rep.hopf_period = hopf_period(rep.rh.a2);
  rep.homogeneous_stable = rep.rh.stable;
  rep.turing_unstable = rep.regime == Regime::Turing;

  std::vector<double> ks;
  ks.reserve(k2_samples.size());
  for (double k2 : k2_samples) ks.push_back(std::sqrt(std::max(k2, 0.0)));
  const auto scan = growth_rates(p, ks, form);
  const auto q = dispersion_coefficients(p);
  bool eig_unstable_continuous = false;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    rep.dispersion.push_back({k2_samples[i], q(k2_samples[i]), scan.modes[i].max_real});
    if (k2_samples[i] > 0.0 && scan.modes[i].max_real > 0.0) eig_unstable_continuous = true;
  }

  if (domain_length > 0.0 && m_max >= 0) {
    const auto km = neumann_wavenumbers(domain_length, m_max);
    const auto modes = growth_rates(p, km, form);
    for (int m = 0; m <= m_max; ++m) {
      const double rate = modes.modes[m].max_real;
      if (rate > 0.0) rep.unstable_modes.push_back(m);
      if (rep.fastest_mode < 0 || rate > rep.fastest_rate) {
        rep.fastest_mode = m;
        rep.fastest_rate = rate;
      }
    }
  }
  // The eigenvalue route only counts nonzero wavenumbers, since k = 0 is
  // governed by the homogeneous verdict.
  if (rep.homogeneous_stable) {
    rep.routes_disagree = rep.turing_unstable != eig_unstable_continuous;
  }
  return rep;
}

BifurcationDiagram bifurcation_diagram(const ModelParams& base, AxisRange theta, AxisRange xi,
                                       int threads) {
  if (theta.points < 2 || xi.points < 2) {
    throw PreconditionError("bifurcation_diagram: resolution must be >= 2 per axis");
  }
  if (!std::isfinite(theta.lo) || !std::isfinite(theta.hi) || !std::isfinite(xi.lo) ||
      !std::isfinite(xi.hi)) {
    throw PreconditionError("bifurcation_diagram: ranges must be finite");
  }
  BifurcationDiagram out;
  out.theta = theta;
  out.xi = xi;
  const auto b = admissibility_bounds(base);
  out.theta_bar = b.theta_bar;
  out.theta_bar_minus_bp = b.theta_bar_minus_bp;
  out.hopf = theta_hopf(base);

  const std::size_t total = static_cast<std::size_t>(theta.points) * xi.points;
  out.cells.resize(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const int i = static_cast<int>(idx / xi.points);
      const int j = static_cast<int>(idx % xi.points);
      ModelParams p = base;
      p.theta = theta.at(i);
      p.xi = xi.at(j);
      out.cells[idx] = {p.theta, p.xi, classify(p)};
    }
  };
  const std::size_t nthreads = std::clamp<std::size_t>(threads, 1, total);
  if (nthreads == 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  out.xi_star_curve.reserve(theta.points);
  for (int i = 0; i < theta.points; ++i) {
    ModelParams p = base;
    p.theta = theta.at(i);
    std::optional<double> xs;
    if (equilibrium(p).admissible) xs = turing_threshold_xi(p);
    out.xi_star_curve.push_back({p.theta, xs});
  }
  return out;
}

}  // namespace plaque
