#include "plaque/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "plaque/error.hpp"
#include "plaque/metrics.hpp"

namespace plaque {

VelocityGrid::VelocityGrid(double speed, int nodes) : V(speed), M(nodes) {
  if (!(speed > 0.0) || !std::isfinite(speed)) throw ParameterError("velocity grid: V must be > 0");
  if (nodes < 2 || nodes % 2 != 0) throw ParameterError("velocity grid: M must be even and >= 2");
  omega = 2.0 * V;
  const double h = omega / M;
  v.resize(M);
  w.assign(M, h);
  for (int j = 0; j < M; ++j) v[j] = -V + (j + 0.5) * h;
}

double VelocityGrid::second_moment() const {
  double s = 0.0;
  for (int j = 0; j < M; ++j) s += w[j] * v[j] * v[j];
  return s;
}

TransportCoefficients kinetic_transport_coefficients(const DimensionalParams& d,
                                                     const VelocityGrid& vr,
                                                     const VelocityGrid& vc) {
  if (d.n != 1) throw ParameterError("kinetic solver is one-dimensional (n must be 1)");
  TransportCoefficients tc{};
  tc.omega = vr.omega;
  tc.D_R = vr.second_moment() / (vr.omega * d.lambda);
  tc.D_C = vc.second_moment() / (vc.omega * d.sigma);
  tc.chi = d.gamma * vr.second_moment() / vr.V;
  return tc;
}

namespace {

double quad(std::span<const double> f, const VelocityGrid& g) {
  double s = 0.0;
  for (int j = 0; j < g.M; ++j) s += g.w[j] * f[j];
  return s;
}

void check_sizes(std::span<const double> f, const VelocityGrid& g) {
  if (static_cast<int>(f.size()) != g.M) {
    throw PreconditionError("turning operator: distribution size does not match velocity grid");
  }
}

}  // namespace

std::vector<double> turning_L0_R(std::span<const double> f, double R, double R_M, double lambda,
                                 const Squeeze& sq, const VelocityGrid& g) {
  check_sizes(f, g);
  const double p0 = sq.phi0(std::max(R, 0.0) / R_M);
  if (!(p0 > 0.0)) throw NumericalError("turning_L0_R: Phi0(R) is not positive");
  const double avg = quad(f, g) / g.omega;
  std::vector<double> out(g.M);
  for (int j = 0; j < g.M; ++j) out[j] = (lambda / p0) * (avg - f[j]);
  return out;
}

std::vector<double> turning_L1_R(std::span<const double> f, double R, double R_M, double dCdx,
                                 double lambda, double gamma, const Squeeze& sq,
                                 const VelocityGrid& g) {
  check_sizes(f, g);
  const double amp = lambda * gamma * sq.phi1(std::max(R, 0.0) / R_M) * dCdx * quad(f, g);
  std::vector<double> out(g.M);
  for (int j = 0; j < g.M; ++j) out[j] = amp * g.v[j] / g.V;
  return out;
}

std::vector<double> turning_LC(std::span<const double> f, double sigma, const VelocityGrid& g) {
  check_sizes(f, g);
  const double avg = quad(f, g) / g.omega;
  std::vector<double> out(g.M);
  for (int j = 0; j < g.M; ++j) out[j] = sigma * (avg - f[j]);
  return out;
}

TransportScheme transport_from_name(std::string_view name) {
  if (name == "central") return TransportScheme::Central;
  if (name == "upwind") return TransportScheme::Upwind;
  throw ParameterError("unknown transport scheme '" + std::string(name) + "'");
}

std::string_view to_string(TransportScheme s) {
  return s == TransportScheme::Central ? "central" : "upwind";
}

KineticState lift(const DimensionalParams& d, const FieldState& macro, const KineticOptions& opt) {
  if (!(opt.eps > 0.0)) throw ParameterError("kinetic: eps must be > 0");
  const int n = macro.size();
  KineticState s;
  s.N = n;
  s.M = opt.M;
  s.MC = opt.M_C;
  s.eps = opt.eps;
  s.fR.resize(static_cast<std::size_t>(n) * opt.M);
  s.fC.resize(static_cast<std::size_t>(n) * opt.M_C);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < opt.M; ++j) s.fR[i * opt.M + j] = macro.u[kR][i] / (2.0 * d.V_cap);
    for (int j = 0; j < opt.M_C; ++j) s.fC[i * opt.M_C + j] = macro.u[kC][i] / (2.0 * d.W_cap);
  }
  s.A = macro.u[kA];
  s.S = macro.u[kS];
  s.E = macro.u[kE];
  s.E1.resize(n);
  s.E2.resize(n);
  for (int i = 0; i < n; ++i) {
    const double R = macro.u[kR][i];
    const double healthy = d.E_bar - s.E[i];
    s.E2[i] = healthy * d.b52 * R / (d.r5 + d.b52 * R);
    s.E1[i] = healthy - s.E2[i];
  }
  if (opt.frozen_C) s.C_frozen = macro.u[kC];
  return s;
}

FieldState moments(const KineticState& s, const DimensionalParams& d) {
  const VelocityGrid vr(d.V_cap, s.M), vc(d.W_cap, s.MC);
  FieldState m(s.N);
  m.t = s.t;
  for (int i = 0; i < s.N; ++i) {
    m.u[kR][i] = quad(std::span(s.fR).subspan(static_cast<std::size_t>(i) * s.M, s.M), vr);
    m.u[kC][i] = s.C_frozen.empty()
                     ? quad(std::span(s.fC).subspan(static_cast<std::size_t>(i) * s.MC, s.MC), vc)
                     : s.C_frozen[i];
  }
  m.u[kA] = s.A;
  m.u[kS] = s.S;
  m.u[kE] = s.E;
  return m;
}

std::vector<double> flux_moment_R(const KineticState& s, const DimensionalParams& d) {
  const VelocityGrid vr(d.V_cap, s.M);
  std::vector<double> out(s.N, 0.0);
  for (int i = 0; i < s.N; ++i) {
    for (int j = 0; j < s.M; ++j) out[i] += vr.w[j] * vr.v[j] * s.fR[i * s.M + j];
  }
  return out;
}

KineticSolver::KineticSolver(const DimensionalParams& d, const Grid1D& g, KineticOptions opt)
    : d_(d), g_(g), opt_(opt), vr_(d.V_cap, opt.M), vc_(d.W_cap, opt.M_C) {
  d.validate();
  if (d.n != 1) throw ParameterError("kinetic solver is one-dimensional (n must be 1)");
  if (!(opt.eps > 0.0)) throw ParameterError("kinetic: eps must be > 0");
  if (!(opt.dt_safety > 0.0 && opt.dt_safety <= 1.0)) {
    throw ParameterError("kinetic: dt safety factor must lie in (0, 1]");
  }
}

// Writes -v df/dx per (cell, velocity). Walls reflect specularly: the ghost
// value beyond a wall for velocity v is the boundary cell's value at -v,
// which keeps the discrete mass exactly conserved.
void KineticSolver::advect(std::span<const double> f, int M, const VelocityGrid& g,
                           std::vector<double>& out) const {
  const int n = g_.N;
  const double dx = g_.dx();
  out.assign(f.size(), 0.0);
  auto at = [&](int i, int j) -> double {
    if (i < 0) return f[static_cast<std::size_t>(0) * M + (M - 1 - j)];
    if (i >= n) return f[static_cast<std::size_t>(n - 1) * M + (M - 1 - j)];
    return f[static_cast<std::size_t>(i) * M + j];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < M; ++j) {
      const double v = g.v[j];
      double grad;
      if (opt_.transport == TransportScheme::Central) {
        grad = (at(i + 1, j) - at(i - 1, j)) / (2.0 * dx);
      } else {
        grad = v > 0.0 ? (at(i, j) - at(i - 1, j)) / dx : (at(i + 1, j) - at(i, j)) / dx;
      }
      out[static_cast<std::size_t>(i) * M + j] = -v * grad;
    }
  }
}

void KineticSolver::rhs(const KineticState& s, KineticState& out) {
  const int n = s.N;
  const int M = s.M, MC = s.MC;
  const double eps = s.eps;
  const double inv_eps = 1.0 / eps;
  const double inv_eps2 = inv_eps * inv_eps;
  const Squeeze& sq = d_.squeeze;
  out.N = n;
  out.M = M;
  out.MC = MC;
  out.eps = eps;
  out.t = s.t;
  out.fR.assign(s.fR.size(), 0.0);
  out.fC.assign(s.fC.size(), 0.0);
  out.A.assign(n, 0.0);
  out.S.assign(n, 0.0);
  out.E1.assign(n, 0.0);
  out.E2.assign(n, 0.0);
  out.E.assign(n, 0.0);

  R_.assign(n, 0.0);
  C_.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < M; ++j) R_[i] += vr_.w[j] * s.fR[i * M + j];
    if (s.C_frozen.empty()) {
      for (int j = 0; j < MC; ++j) C_[i] += vc_.w[j] * s.fC[i * MC + j];
    } else {
      C_[i] = s.C_frozen[i];
    }
  }
  dC_.assign(n, 0.0);
  const double dx = g_.dx();
  for (int i = 0; i < n; ++i) {
    const double cl = C_[std::max(i - 1, 0)];
    const double cr = C_[std::min(i + 1, n - 1)];
    dC_[i] = (cr - cl) / (2.0 * dx);
  }

  advect(s.fR, M, vr_, adv_);
  for (int i = 0; i < n; ++i) {
    const double r = R_[i] / d_.R_M;
    const double relax = d_.lambda / sq.phi0_fast(r);
    const double avg = R_[i] / vr_.omega;
    const double bias = d_.lambda * d_.gamma * sq.phi1_fast(r) * dC_[i] * R_[i] / vr_.V;
    const double growth = opt_.interactions ? d_.p21 * s.A[i] - d_.d23 * s.S[i] - d_.d2 : 0.0;
    for (int j = 0; j < M; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * M + j;
      const double f = s.fR[k];
      out.fR[k] = inv_eps * adv_[k] + inv_eps2 * relax * (avg - f) +
                  inv_eps * bias * vr_.v[j] + growth * f;
    }
  }

  if (s.C_frozen.empty()) {
    advect(s.fC, MC, vc_, adv_);
    for (int i = 0; i < n; ++i) {
      const double avg = C_[i] / vc_.omega;
      const double source = opt_.interactions ? d_.pC2 * s.A[i] * R_[i] / vc_.omega : 0.0;
      const double decay = opt_.interactions ? d_.dC : 0.0;
      for (int j = 0; j < MC; ++j) {
        const std::size_t k = static_cast<std::size_t>(i) * MC + j;
        const double f = s.fC[k];
        out.fC[k] = inv_eps * adv_[k] + inv_eps2 * d_.sigma * (avg - f) + source - decay * f;
      }
    }
  }

  if (!opt_.interactions) return;
  for (int i = 0; i < n; ++i) {
    const double a = s.A[i], sv = s.S[i], r = R_[i];
    out.A[i] = d_.alpha + d_.p12 * a * r - d_.d13 * a * sv - d_.d1 * a;
    out.S[i] = d_.p31 * sv * a - d_.d3 * sv;
    const double slow = eps * (d_.b52 * s.E1[i] * r - d_.r5 * s.E2[i]);
    const double fast = d_.b62 * s.E2[i] * r - d_.r6 * s.E[i];
    out.E1[i] = -slow;
    out.E2[i] = slow - fast;
    out.E[i] = fast;
  }
}

void KineticSolver::step(KineticState& s, double dt, KineticDiagnostics& diag) {
  rhs(s, k_);
  bool finite = true;
  auto update = [&](std::vector<double>& u, const std::vector<double>& du) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      u[i] += dt * du[i];
      finite = finite && std::isfinite(u[i]);
    }
  };
  update(s.fR, k_.fR);
  update(s.fC, k_.fC);
  update(s.A, k_.A);
  update(s.S, k_.S);
  update(s.E1, k_.E1);
  update(s.E2, k_.E2);
  update(s.E, k_.E);
  if (!finite) {
    std::ostringstream os;
    os << "kinetic solver produced a non-finite value at t = " << s.t << " (dt = " << dt << ")";
    throw DivergenceError(s.t, dt, os.str());
  }
  for (double f : s.fR) diag.negative_events += f < -kLowerTol;
  for (double f : s.fC) diag.negative_events += f < -kLowerTol;
  for (int i = 0; i < s.N; ++i) {
    diag.max_myelin_error =
        std::max(diag.max_myelin_error, std::abs(s.E1[i] + s.E2[i] + s.E[i] - d_.E_bar));
  }
  s.t += dt;
}

double KineticSolver::stable_dt() const {
  const double eps = opt_.eps;
  const double dx = g_.dx();
  const double p0max = d_.squeeze.phi0_max();
  // Relaxation: turning rates are at most lambda/eps^2 (Phi0 >= 1) and sigma/eps^2.
  double bound = std::min(eps * eps / d_.lambda, eps * eps / d_.sigma);
  // Forward Euler on a damped advection mode a i - s is stable for
  // dt <= 2 s / (s^2 + a^2).
  auto damped = [&](double speed, double rate) {
    const double a = speed / (eps * dx);
    return 2.0 * rate / (rate * rate + a * a);
  };
  bound = std::min(bound, damped(d_.V_cap, d_.lambda / (p0max * eps * eps)));
  bound = std::min(bound, damped(d_.W_cap, d_.sigma / (eps * eps)));
  // Limiting diffusion.
  bound = std::min(bound, dx * dx / (2.0 * p0max * vr_.second_moment() / (vr_.omega * d_.lambda)));
  bound = std::min(bound, dx * dx / (2.0 * vc_.second_moment() / (vc_.omega * d_.sigma)));
  if (opt_.transport == TransportScheme::Upwind) {
    bound = std::min(bound, eps * dx / std::max(d_.V_cap, d_.W_cap));
  }
  if (opt_.interactions) {
    const double rate = std::max({d_.d1 + d_.d13 + d_.p12, d_.p31 + d_.d3, d_.b62 * d_.R_M + d_.r6,
                                  d_.p21 + d_.d23 + d_.d2, d_.dC});
    bound = std::min(bound, 1.0 / rate);
  }
  return opt_.dt_safety * bound;
}

KineticRun run_kinetic(const DimensionalParams& d, const Grid1D& g, const FieldState& macro0,
                       double t_end, const KineticOptions& opt) {
  if (!(t_end >= 0.0)) throw ParameterError("kinetic: t_end must be >= 0");
  if (macro0.size() != g.N) throw PreconditionError("kinetic: initial data does not match grid");
  KineticSolver solver(d, g, opt);
  KineticRun run;
  run.state = lift(d, macro0, opt);
  const double bound = opt.dt > 0.0 ? opt.dt : solver.stable_dt();
  const long nsteps = t_end > 0.0 ? std::max(1L, static_cast<long>(std::ceil(t_end / bound))) : 0;
  run.dt = nsteps > 0 ? t_end / nsteps : 0.0;
  for (long k = 0; k < nsteps; ++k) solver.step(run.state, run.dt, run.diagnostics);
  run.state.t = t_end;
  run.steps = nsteps;
  run.macro = moments(run.state, d);
  return run;
}

FieldState limit_initial_data(const DimensionalParams& d, const Grid1D& g, double amplitude) {
  const ModelParams p = nondimensionalize(d);
  const auto eq = equilibrium(p);
  if (!eq.admissible) throw PreconditionError("limit data: equilibrium is not admissible");
  const State5 u = Scaling::from(d).to_dimensional(eq.state());
  FieldState s(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    s.u[kA][i] = u[kA];
    s.u[kS][i] = u[kS];
    s.u[kR][i] = u[kR] * (1.0 + amplitude * std::cos(2.0 * std::numbers::pi * x / g.L));
    s.u[kC][i] = u[kC] * (1.0 + amplitude * std::cos(3.0 * std::numbers::pi * x / g.L));
    s.u[kE][i] = u[kE];
  }
  return s;
}

namespace {

double l2_error(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s * dx);
}

}  // namespace

std::vector<LimitEntry> diffusive_limit_error(const DimensionalParams& d,
                                              std::span<const double> eps_list,
                                              const DiffusiveLimitSetup& setup) {
  if (eps_list.empty()) throw ParameterError("diffusive limit: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw ParameterError("diffusive limit: eps must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw ParameterError("diffusive limit: eps list must be strictly decreasing");
    }
  }
  const Grid1D& g = setup.grid;
  const FieldState macro0 = limit_initial_data(d, g, setup.amplitude);

  // Macroscopic reference on the same cells.
  const VelocityGrid vr(d.V_cap, setup.kinetic.M), vc(d.W_cap, setup.kinetic.M_C);
  const TransportCoefficients tc = kinetic_transport_coefficients(d, vr, vc);
  const ModelParams p = nondimensionalize(d, tc);
  const Scaling sc = Scaling::from(d, tc);
  FieldState nd(g.N);
  for (int i = 0; i < g.N; ++i) {
    State5 u{};
    for (int c = 0; c < kNumComponents; ++c) u[c] = macro0.u[c][i];
    const State5 v = sc.to_dimensionless(u);
    for (int c = 0; c < kNumComponents; ++c) nd.u[c][i] = v[c];
  }
  SimulationConfig cfg;
  cfg.grid = Grid1D(g.L / sc.length, g.N);
  cfg.t_end = setup.t_probe / sc.time;
  cfg.snapshot_every = cfg.t_end;
  cfg.recorded = {kA, kS, kR, kC, kE};
  cfg.options.scheme = ChemotaxisScheme::Central;
  cfg.options.sensitivity = Sensitivity::KineticLimit;
  const SpaceTimeRecord ref = simulate_from(p, nd, cfg);
  FieldState macro_ref(g.N);
  for (int i = 0; i < g.N; ++i) {
    State5 u{};
    for (int c = 0; c < kNumComponents; ++c) u[c] = ref.snapshots[c].back()[i];
    const State5 v = sc.to_dimensional(u);
    for (int c = 0; c < kNumComponents; ++c) macro_ref.u[c][i] = v[c];
  }

  std::vector<LimitEntry> out(eps_list.size());
  auto job = [&](std::size_t idx) {
    LimitEntry& e = out[idx];
    e.eps = eps_list[idx];
    e.reference = macro_ref;
    KineticOptions ko = setup.kinetic;
    ko.eps = e.eps;
    try {
      const KineticRun run = run_kinetic(d, g, macro0, setup.t_probe, ko);
      e.steps = run.steps;
      e.negative_events = run.diagnostics.negative_events;
      e.error_R = l2_error(run.macro.u[kR], macro_ref.u[kR], g.dx());
      e.error_C = l2_error(run.macro.u[kC], macro_ref.u[kC], g.dx());
      e.error_A = l2_error(run.macro.u[kA], macro_ref.u[kA], g.dx());
      e.error_S = l2_error(run.macro.u[kS], macro_ref.u[kS], g.dx());
      e.macro = run.macro;
      e.flux_R = flux_moment_R(run.state, d);
    } catch (const Error& err) {
      e.failure = err.what();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(setup.threads, 1, eps_list.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) job(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < eps_list.size(); i += workers) job(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    const auto& a = out[i - 1];
    const auto& b = out[i];
    if (a.failure.empty() && b.failure.empty() && a.error_R > 0.0 && b.error_R > 0.0) {
      out[i].order_R = std::log(a.error_R / b.error_R) / std::log(a.eps / b.eps);
    }
  }
  return out;
}

ModeDecay mode_decay_rate(const DimensionalParams& d, const Grid1D& g, int mode, double eps,
                          double t_end, const KineticOptions& opt) {
  if (mode < 1) throw ParameterError("mode decay: mode must be >= 1");
  DimensionalParams dd = d;
  dd.gamma = 0.0;
  KineticOptions ko = opt;
  ko.eps = eps;
  ko.interactions = false;
  const double background = 0.01 * d.R_M;
  FieldState macro(g.N);
  for (int i = 0; i < g.N; ++i) {
    macro.u[kR][i] = background * (1.0 + 0.5 * std::cos(mode * std::numbers::pi * g.x(i) / g.L));
  }
  const auto a0 = cosine_amplitudes(macro.u[kR], mode)[mode];
  const KineticRun run = run_kinetic(dd, g, macro, t_end, ko);
  const auto a1 = cosine_amplitudes(run.macro.u[kR], mode)[mode];
  ModeDecay md;
  md.k = mode * std::numbers::pi / g.L;
  md.measured = -std::log(a1 / a0) / t_end;
  md.predicted = d.V_cap * d.V_cap / (3.0 * d.lambda) * md.k * md.k;
  return md;
}

}  // namespace plaque
