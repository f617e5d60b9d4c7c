#include "plaque/pde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "plaque/error.hpp"

namespace plaque {

Grid1D::Grid1D(double length, int cells) : L(length), N(cells) {
  if (cells < 16) throw ParameterError("grid: N must be >= 16");
  if (!(length > 0.0) || !std::isfinite(length)) throw ParameterError("grid: L must be > 0");
}

ChemotaxisScheme scheme_from_name(std::string_view name) {
  if (name == "upwind") return ChemotaxisScheme::Upwind;
  if (name == "central") return ChemotaxisScheme::Central;
  throw ParameterError("unknown chemotaxis scheme '" + std::string(name) + "'");
}

std::string_view to_string(ChemotaxisScheme s) {
  return s == ChemotaxisScheme::Upwind ? "upwind" : "central";
}

Sensitivity sensitivity_from_name(std::string_view name) {
  if (name == "standard") return Sensitivity::Standard;
  if (name == "kinetic") return Sensitivity::KineticLimit;
  throw ParameterError("unknown sensitivity form '" + std::string(name) + "'");
}

std::string_view to_string(Sensitivity s) {
  return s == Sensitivity::Standard ? "standard" : "kinetic";
}

FieldState init_state(const ModelParams& p, const Grid1D& g, std::uint64_t seed,
                      double amplitude) {
  if (!(amplitude >= 0.0)) throw ParameterError("init_state: amplitude must be >= 0");
  const auto eq = equilibrium(p);
  if (!eq.admissible) throw PreconditionError("init_state: equilibrium is not admissible");
  FieldState s(g.N);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const State5 base = eq.state();
  // Draw order is component-major so the stream layout is easy to reproduce.
  for (Component c : {kA, kS, kR, kC}) {
    for (int i = 0; i < g.N; ++i) {
      s.u[c][i] = base[c] * (1.0 + amplitude * unif(rng));
    }
  }
  for (auto& r : s.u[kR]) r = std::clamp(r, 0.0, 1.0);
  return s;
}

namespace {

// Writes the N+1 face values of Phi0 R_x - xi s(R) C_x into `out`.
void face_flux(std::span<const double> R, std::span<const double> C, const ModelParams& p,
               double dx, const PdeOptions& opt, std::vector<double>& out) {
  const std::size_t n = R.size();
  out.assign(n + 1, 0.0);
  const Squeeze& sq = p.squeeze;
  const bool kinetic = opt.sensitivity == Sensitivity::KineticLimit;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double r0 = R[i], r1 = R[i + 1];
    const double f00 = sq.phi0_fast(r0), f01 = sq.phi0_fast(r1);
    const double diff = 0.5 * (f00 + f01) * (r1 - r0) / dx;
    const double grad_c = (C[i + 1] - C[i]) / dx;
    double chemo;
    if (opt.scheme == ChemotaxisScheme::Central) {
      double s0 = sq.phi1_fast(r0) * r0, s1 = sq.phi1_fast(r1) * r1;
      if (kinetic) {
        s0 *= f00;
        s1 *= f01;
      }
      chemo = p.xi * 0.5 * (s0 + s1) * grad_c;
    } else {
      const double u = p.xi * grad_c;
      const double m0 = kinetic ? r0 * f00 : r0;
      const double m1 = kinetic ? r1 * f01 : r1;
      chemo = u >= 0.0 ? u * m0 * sq.phi1_fast(r1) : u * m1 * sq.phi1_fast(r0);
    }
    out[i + 1] = diff - chemo;
  }
}

}  // namespace

std::vector<double> flux_R(std::span<const double> R, std::span<const double> C,
                           const ModelParams& p, const Grid1D& g, const PdeOptions& opt) {
  if (R.size() != C.size()) throw PreconditionError("flux_R: field sizes differ");
  std::vector<double> out;
  face_flux(R, C, p, g.dx(), opt, out);
  return out;
}

Rk4Stepper::Rk4Stepper(const ModelParams& p, const Grid1D& g, PdeOptions opt)
    : p_(p), g_(g), opt_(opt), k1_(g.N), k2_(g.N), k3_(g.N), k4_(g.N), tmp_(g.N) {}

void Rk4Stepper::eval(const FieldState& s, FieldState& out) {
  const int n = g_.N;
  const double dx = g_.dx();
  const auto& A = s.u[kA];
  const auto& S = s.u[kS];
  const auto& R = s.u[kR];
  const auto& C = s.u[kC];
  const auto& E = s.u[kE];

  face_flux(R, C, p_, dx, opt_, flux_);
  fluxC_.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = 0; i + 1 < n; ++i) fluxC_[i + 1] = p_.delta * (C[i + 1] - C[i]) / dx;

  for (int i = 0; i < n; ++i) {
    out.u[kR][i] = (flux_[i + 1] - flux_[i]) / dx;
    out.u[kC][i] = (fluxC_[i + 1] - fluxC_[i]) / dx;
    out.u[kA][i] = out.u[kS][i] = out.u[kE][i] = 0.0;
  }
  if (!opt_.reactions) return;
  for (int i = 0; i < n; ++i) {
    const double a = A[i], sv = S[i], r = R[i], c = C[i], e = E[i];
    out.u[kA][i] += 1.0 + p_.beta * a * r - a * sv - p_.zeta * a;
    out.u[kS][i] += p_.mu * a * sv - sv;
    out.u[kR][i] += p_.eta * a * r - p_.phi * r * sv - p_.theta * r;
    out.u[kC][i] += a * r - p_.tau * c;
    out.u[kE][i] += p_.Theta * r * r * (1.0 - e) / (p_.Omega + r) - p_.Xi * e;
  }
}

FieldState rhs(const FieldState& s, const ModelParams& p, const Grid1D& g,
               const PdeOptions& opt) {
  if (s.size() != g.N) throw PreconditionError("rhs: state size does not match grid");
  Rk4Stepper st(p, g, opt);
  FieldState out(g.N);
  out.t = s.t;
  st.eval(s, out);
  return out;
}

void Rk4Stepper::step(FieldState& s, double dt, StepDiagnostics& diag) {
  if (dt == 0.0) return;
  const int n = g_.N;
  auto axpy = [n](const FieldState& base, double h, const FieldState& k, FieldState& out) {
    for (int c = 0; c < kNumComponents; ++c) {
      for (int i = 0; i < n; ++i) out.u[c][i] = base.u[c][i] + h * k.u[c][i];
    }
  };
  eval(s, k1_);
  axpy(s, 0.5 * dt, k1_, tmp_);
  eval(tmp_, k2_);
  axpy(s, 0.5 * dt, k2_, tmp_);
  eval(tmp_, k3_);
  axpy(s, dt, k3_, tmp_);
  eval(tmp_, k4_);
  const double w = dt / 6.0;
  double lo = INFINITY;
  double hi_r = -INFINITY;
  bool finite = true;
  for (int c = 0; c < kNumComponents; ++c) {
    auto& u = s.u[c];
    for (int i = 0; i < n; ++i) {
      const double v =
          u[i] + w * (k1_.u[c][i] + 2.0 * k2_.u[c][i] + 2.0 * k3_.u[c][i] + k4_.u[c][i]);
      finite = finite && std::isfinite(v);
      u[i] = v;
      lo = std::min(lo, v);
    }
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite value at t = " << s.t << " with dt = " << dt;
    throw DivergenceError(s.t, dt, os.str());
  }
  for (auto& r : s.u[kR]) {
    hi_r = std::max(hi_r, r);
    if (r > 1.0 + kUpperTolR) {
      r = 1.0;
      ++diag.clamp_events;
    } else if (r < -kLowerTol) {
      r = 0.0;
      ++diag.clamp_events;
    }
  }
  diag.min_value = std::min(diag.min_value, lo);
  diag.max_R = std::max(diag.max_R, hi_r);
  s.t += dt;
}

double Rk4Stepper::stable_dt(const FieldState& s) const {
  const double dx = g_.dx();
  const Squeeze& sq = p_.squeeze;
  double bound = dx * dx / (2.0 * sq.phi0_max() * std::max(1.0, p_.delta));

  if (opt_.reactions) {
    // Gershgorin bound on the spectral radius of the reaction Jacobian.
    double rho = 0.0;
    for (int i = 0; i < g_.N; ++i) {
      const double a = std::abs(s.u[kA][i]), sv = std::abs(s.u[kS][i]);
      const double r = std::abs(s.u[kR][i]), e = s.u[kE][i];
      const double row_a = std::abs(p_.beta * r - sv - p_.zeta) + a + p_.beta * a;
      const double row_s = std::abs(p_.mu * sv) + std::abs(p_.mu * a - 1.0);
      const double row_r = p_.eta * r + std::abs(p_.eta * a - p_.phi * sv - p_.theta) + p_.phi * r;
      const double row_c = r + a + p_.tau;
      const double den = p_.Omega + r;
      const double row_e = p_.Theta * r * (r + 2.0 * p_.Omega) * std::abs(1.0 - e) / (den * den) +
                           p_.Theta * r * r / den + p_.Xi;
      rho = std::max({rho, row_a, row_s, row_r, row_c, row_e});
    }
    if (rho > 0.0) bound = std::min(bound, 1.0 / rho);
  }

  double umax = 0.0;
  const auto& C = s.u[kC];
  for (int i = 0; i + 1 < g_.N; ++i) umax = std::max(umax, std::abs(C[i + 1] - C[i]) / dx);
  umax *= p_.xi;
  if (opt_.sensitivity == Sensitivity::KineticLimit) umax *= sq.phi0_max();
  if (umax > 0.0) bound = std::min(bound, dx / umax);
  return opt_.dt_safety * bound;
}

FieldState step(const FieldState& s, const ModelParams& p, const Grid1D& g, double dt,
                StepDiagnostics& diag, const PdeOptions& opt) {
  if (!(dt >= 0.0)) throw PreconditionError("step: dt must be >= 0");
  FieldState out = s;
  Rk4Stepper st(p, g, opt);
  st.step(out, dt, diag);
  return out;
}

SpaceTimeRecord simulate(const ModelParams& p, const SimulationConfig& cfg) {
  return simulate_from(p, init_state(p, cfg.grid, cfg.seed, cfg.amplitude), cfg);
}

SpaceTimeRecord simulate_from(const ModelParams& p, FieldState initial,
                              const SimulationConfig& cfg) {
  p.validate();
  if (initial.size() != cfg.grid.N) throw PreconditionError("simulate: state size does not match grid");
  if (!(cfg.t_end > 0.0)) throw ParameterError("simulate: t_end must be > 0");
  if (!(cfg.snapshot_every > 0.0)) throw ParameterError("simulate: snapshot interval must be > 0");
  if (!(cfg.options.dt_safety > 0.0 && cfg.options.dt_safety <= 1.0)) {
    throw ParameterError("simulate: dt safety factor must lie in (0, 1]");
  }
  if (cfg.recorded.empty()) throw ParameterError("simulate: no fields selected for recording");

  SpaceTimeRecord rec;
  rec.params = p;
  rec.config = cfg;
  rec.dt_min = INFINITY;
  rec.dt_max = 0.0;

  FieldState s = std::move(initial);
  s.t = 0.0;
  Rk4Stepper stepper(p, cfg.grid, cfg.options);

  auto record = [&](double t) {
    rec.times.push_back(t);
    for (Component c : cfg.recorded) rec.snapshots[c].push_back(s.u[c]);
  };
  record(0.0);

  const auto start = std::chrono::steady_clock::now();
  const long intervals = static_cast<long>(std::ceil(cfg.t_end / cfg.snapshot_every - 1e-9));
  for (long k = 1; k <= intervals; ++k) {
    const double t0 = s.t;
    const double t1 = std::min(cfg.t_end, static_cast<double>(k) * cfg.snapshot_every);
    const double span = t1 - t0;
    const double bound = stepper.stable_dt(s);
    const long nsteps = std::max(1L, static_cast<long>(std::ceil(span / bound)));
    const double dt = span / static_cast<double>(nsteps);
    for (long j = 0; j < nsteps; ++j) stepper.step(s, dt, rec.diagnostics);
    s.t = t1;
    rec.steps += nsteps;
    rec.dt_min = std::min(rec.dt_min, dt);
    rec.dt_max = std::max(rec.dt_max, dt);
    record(t1);
    if (cfg.wall_clock_budget > 0.0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start;
      if (el.count() > cfg.wall_clock_budget && k < intervals) {
        rec.incomplete = true;
        break;
      }
    }
  }
  return rec;
}

}  // namespace plaque
