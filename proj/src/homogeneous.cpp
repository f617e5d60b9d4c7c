#include "plaque/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "plaque/error.hpp"

namespace plaque {

namespace {

void require_nonnegative_state(const State5& u, const char* what) {
  for (int c = 0; c < kNumComponents; ++c) {
    if (!(u[c] >= 0.0) || !std::isfinite(u[c])) {
      std::ostringstream os;
      os << what << ": initial " << kComponentNames[c] << " must be finite and >= 0 (got " << u[c]
         << ")";
      throw PreconditionError(os.str());
    }
  }
}

// Component size past which a forward-Euler run is declared unbounded.
constexpr double kBlowUp = 1e8;

State5 axpy(const State5& u, double h, const State5& k) {
  State5 r;
  for (int c = 0; c < kNumComponents; ++c) r[c] = u[c] + h * k[c];
  return r;
}

bool finite(const State5& u) {
  return std::all_of(u.begin(), u.end(), [](double v) { return std::isfinite(v); });
}

void check_grid(std::span<const double> t, std::size_t n, const char* what) {
  if (t.size() != n) {
    throw PreconditionError(std::string(what) + ": trajectories are not sampled on a common grid");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw PreconditionError(std::string(what) + ": time grid not increasing");
  }
}

}  // namespace

std::vector<double> Trajectory::component(int c) const {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i][c];
  return out;
}

Trajectory rk4_integrate(const VectorField& f, const State5& initial, double t_end, double dt) {
  require_nonnegative_state(initial, "ode");
  if (!(dt > 0.0)) throw PreconditionError("ode: dt must be > 0");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw PreconditionError("ode: t_end must be >= 0");
  const long n = t_end > 0.0 ? static_cast<long>(std::ceil(t_end / dt - 1e-12)) : 0;
  const double h = n > 0 ? t_end / n : 0.0;
  Trajectory tr;
  tr.t.reserve(n + 1);
  tr.u.reserve(n + 1);
  State5 u = initial;
  tr.t.push_back(0.0);
  tr.u.push_back(u);
  tr.min = u;
  tr.max_R = u[kR];
  for (long i = 0; i < n; ++i) {
    const State5 k1 = f(u);
    const State5 k2 = f(axpy(u, 0.5 * h, k1));
    const State5 k3 = f(axpy(u, 0.5 * h, k2));
    const State5 k4 = f(axpy(u, h, k3));
    for (int c = 0; c < kNumComponents; ++c) {
      u[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    const double t = (i + 1) * h;
    if (!finite(u)) {
      std::ostringstream os;
      os << "ode: non-finite state at t = " << t;
      throw DivergenceError(t, h, os.str());
    }
    tr.t.push_back(t);
    tr.u.push_back(u);
    for (int c = 0; c < kNumComponents; ++c) tr.min[c] = std::min(tr.min[c], u[c]);
    tr.max_R = std::max(tr.max_R, u[kR]);
  }
  return tr;
}

Trajectory ode_simulate(const ModelParams& p, const State5& initial, double t_end, double dt) {
  p.validate();
  return rk4_integrate([&](const State5& u) { return reaction_terms(u, p); }, initial, t_end, dt);
}

Trajectory ode_simulate(const DimensionalParams& d, const State5& initial, double t_end,
                        double dt) {
  d.validate();
  return rk4_integrate([&](const State5& u) { return dimensional_reaction_terms(u, d); }, initial,
                       t_end, dt);
}

PopulationSystem::PopulationSystem(const DimensionalParams& dp, double vol) : d(dp), volume(vol) {
  d.validate();
  if (!(vol > 0.0) || !std::isfinite(vol)) throw ParameterError("population: volume must be > 0");
}

State5 PopulationSystem::rhs(const State5& n) const {
  const double V = volume;
  const double A = n[kA], S = n[kS], R = n[kR], C = n[kC], E = n[kE];
  const double b52 = d.b52 / V, b62 = d.b62 / V;
  return {
      d.alpha * V + (d.p12 / V) * A * R - (d.d13 / V) * A * S - d.d1 * A,
      (d.p31 / V) * S * A - d.d3 * S,
      (d.p21 / V) * R * A - (d.d23 / V) * R * S - d.d2 * R,
      (d.pC2 / V) * A * R - d.dC * C,
      (d.E_bar * V - E) * b62 * b52 * R / (d.r5 + b52 * R) * R - d.r6 * E,
  };
}

Trajectory population_simulate(const PopulationSystem& sys, const State5& initial, double t_end,
                               double dt) {
  return rk4_integrate([&](const State5& n) { return sys.rhs(n); }, initial, t_end, dt);
}

MyelinRates MyelinRates::from(const PopulationSystem& sys) {
  return {sys.d.b52 / sys.volume, sys.d.b62 / sys.volume, sys.d.r5, sys.d.r6, sys.nE_hat()};
}

MyelinRates MyelinRates::from(const ModelParams& p) { return {1.0, p.Theta, p.Omega, p.Xi, 1.0}; }

std::vector<double> closed_form_nC(std::span<const double> t, std::span<const double> nA,
                                   std::span<const double> nR, double dC, double pC2_star,
                                   double nC0) {
  check_grid(t, nA.size(), "closed_form_nC");
  check_grid(t, nR.size(), "closed_form_nC");
  std::vector<double> out(t.size());
  if (t.empty()) return out;
  // J(t) = e^{-dC t} int_0^t e^{dC s} g(s) ds, accumulated interval by interval
  // with the trapezoidal rule so that no factor e^{dC t} is ever formed.
  double J = 0.0;
  out[0] = nC0 * std::exp(-dC * t[0]);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = t[i] - t[i - 1];
    const double decay = std::exp(-dC * h);
    const double g0 = pC2_star * nA[i - 1] * nR[i - 1];
    const double g1 = pC2_star * nA[i] * nR[i];
    J = J * decay + 0.5 * h * (g0 * decay + g1);
    out[i] = nC0 * std::exp(-dC * t[i]) + J;
  }
  return out;
}

std::vector<double> closed_form_nE(std::span<const double> t, std::span<const double> nR,
                                   const MyelinRates& r, double nE0) {
  check_grid(t, nR.size(), "closed_form_nE");
  std::vector<double> out(t.size());
  if (t.empty()) return out;
  // Same interval recursion with the integrating factor e^{-(I(t_i) - I(t_{i-1}))}.
  double I = 0.0;
  double J = 0.0;
  out[0] = nE0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double h = t[i] - t[i - 1];
    const double k0 = r.damage(nR[i - 1]);
    const double k1 = r.damage(nR[i]);
    const double dI = 0.5 * h * ((k0 + r.r6) + (k1 + r.r6));
    const double decay = std::exp(-dI);
    I += dI;
    J = J * decay + 0.5 * h * (r.n_hat * k0 * decay + r.n_hat * k1);
    out[i] = nE0 * std::exp(-I) + J;
  }
  return out;
}

EulerPositivityReport euler_positivity_harness(const ModelParams& p, const State5& initial,
                                               std::span<const double> dt_list, double t_end) {
  p.validate();
  require_nonnegative_state(initial, "euler harness");
  EulerPositivityReport rep;
  for (double dt : dt_list) {
    if (!(dt >= 0.0)) throw PreconditionError("euler harness: dt must be >= 0");
    EulerRun run;
    run.dt = dt;
    State5 u = initial;
    run.min = u;
    if (dt > 0.0 && t_end > 0.0) {
      run.steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
      for (long i = 0; i < run.steps; ++i) {
        const State5 next = axpy(u, dt, reaction_terms(u, p));
        if (!finite(next) || *std::max_element(next.begin(), next.end()) > kBlowUp) {
          run.bounded = false;
          break;
        }
        u = next;
        for (int c = 0; c < kNumComponents; ++c) run.min[c] = std::min(run.min[c], u[c]);
      }
    }
    run.final = u;
    run.positive = *std::min_element(run.min.begin(), run.min.end()) >= 0.0;
    rep.runs.push_back(run);
  }
  for (const auto& a : rep.runs) {
    for (const auto& b : rep.runs) {
      if (a.positive && b.dt < a.dt && !b.positive) rep.refinement_consistent = false;
    }
  }
  return rep;
}

DtStarReport positivity_dt_star(const ModelParams& p, int points_per_axis, double dt_max,
                                int levels, double t_end, int threads) {
  p.validate();
  if (points_per_axis < 2) throw ParameterError("dt*: need at least 2 points per axis");
  if (levels < 1 || !(dt_max > 0.0)) throw ParameterError("dt*: need dt_max > 0 and levels >= 1");
  const auto eq = equilibrium(p);
  if (!eq.admissible) throw PreconditionError("dt*: equilibrium is not admissible");
  const State5 u1 = eq.state();

  std::vector<State5> starts;
  const int k = points_per_axis;
  int total = 1;
  for (int c = 0; c < kNumComponents; ++c) total *= k;
  starts.reserve(total);
  for (int idx = 0; idx < total; ++idx) {
    State5 s;
    int rest = idx;
    for (int c = 0; c < kNumComponents; ++c) {
      s[c] = 2.0 * u1[c] * (rest % k) / (k - 1.0);
      rest /= k;
    }
    starts.push_back(s);
  }

  DtStarReport rep;
  rep.initial_conditions = total;
  std::vector<double> dts;
  for (int l = 0; l < levels; ++l) dts.push_back(dt_max / std::ldexp(1.0, l));
  rep.dt_probed = dts;
  rep.violations.assign(dts.size(), 0);
  rep.unbounded.assign(dts.size(), 0);
  std::vector<double> min_values(dts.size(), std::numeric_limits<double>::infinity());

  const int workers = std::clamp(threads, 1, total);
  std::vector<std::vector<int>> viol(workers, std::vector<int>(dts.size(), 0));
  std::vector<std::vector<int>> unbounded(workers, std::vector<int>(dts.size(), 0));
  std::vector<std::vector<double>> mins(
      workers, std::vector<double>(dts.size(), std::numeric_limits<double>::infinity()));
  auto work = [&](int w) {
    for (int i = w; i < total; i += workers) {
      const auto rep_i = euler_positivity_harness(p, starts[i], dts, t_end);
      for (std::size_t l = 0; l < dts.size(); ++l) {
        const auto& run = rep_i.runs[l];
        if (!run.bounded) {
          ++unbounded[w][l];
          continue;
        }
        if (!run.positive) ++viol[w][l];
        mins[w][l] = std::min(mins[w][l], *std::min_element(run.min.begin(), run.min.end()));
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (int w = 0; w < workers; ++w) {
    for (std::size_t l = 0; l < dts.size(); ++l) {
      rep.violations[l] += viol[w][l];
      rep.unbounded[l] += unbounded[w][l];
      min_values[l] = std::min(min_values[l], mins[w][l]);
    }
  }
  // Walk from the smallest dt upwards while positivity keeps holding.
  for (std::size_t l = dts.size(); l-- > 0;) {
    if (rep.violations[l] != 0) break;
    rep.dt_star = dts[l];
    rep.min_value_at_dt_star = min_values[l];
  }
  return rep;
}

double ReducedSystem::E(const DimensionalParams& d, double R) const {
  const double num = R * R * d.E_bar * d.b52 * d.b62;
  return num / (d.r6 * (d.r5 + R * d.b52) + R * R * d.b52 * d.b62);
}

std::optional<std::pair<double, double>> ReducedSystem::fixed_point() const {
  if (b == 0.0) return std::nullopt;
  const double R = a / b;
  return std::make_pair(R, c_source * R / dC);
}

ReducedSystem reduced_system(const DimensionalParams& d, bool corrected) {
  for (double v : {d.d3, d.p31, d.d13, d.d2}) {
    if (!(v > 0.0)) throw PreconditionError("reduced system: d3, p31, d13, d2 must be > 0");
  }
  ReducedSystem r;
  r.A = d.d3 / d.p31;
  r.S0 = (d.alpha * d.p31 - d.d1 * d.d3) / (d.d3 * d.d13);
  r.S1 = d.p12 / d.d13;
  r.c_source = d.pC2 * d.d3 / d.p31;
  r.dC = d.dC;
  r.a_printed = d.p21 * d.d2 / d.p31 - d.d23 * (d.alpha * d.p31 - d.d1 * d.d3) / (d.d2 * d.d13) - d.d2;
  r.b_printed = d.p12 * d.d2 / d.d13;
  const double a_corr = d.p21 * d.d3 / d.p31 - d.d23 * r.S0 - d.d2;
  const double b_corr = d.d23 * d.p12 / d.d13;
  r.corrected = corrected;
  r.a = corrected ? a_corr : r.a_printed;
  r.b = corrected ? b_corr : r.b_printed;
  r.a_positive = r.a > 0.0;
  return r;
}

std::optional<double> measure_period(std::span<const double> t, std::span<const double> series,
                                     double t_from) {
  if (t.size() != series.size()) throw PreconditionError("measure_period: size mismatch");
  std::size_t i0 = 0;
  while (i0 < t.size() && t[i0] < t_from) ++i0;
  if (t.size() - i0 < 4) return std::nullopt;
  double mean = 0.0;
  for (std::size_t i = i0; i < t.size(); ++i) mean += series[i];
  mean /= static_cast<double>(t.size() - i0);
  std::vector<double> crossings;
  for (std::size_t i = i0 + 1; i < t.size(); ++i) {
    const double a = series[i - 1] - mean, b = series[i] - mean;
    if (a < 0.0 && b >= 0.0) crossings.push_back(t[i - 1] + (t[i] - t[i - 1]) * (-a) / (b - a));
  }
  if (crossings.size() < 3) return std::nullopt;
  return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace plaque
