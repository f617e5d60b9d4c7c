#include "plaque/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "plaque/error.hpp"
#include "plaque/homogeneous.hpp"
#include "plaque/kinetic.hpp"
#include "plaque/metrics.hpp"
#include "plaque/output.hpp"
#include "plaque/pde.hpp"
#include "plaque/stability.hpp"

namespace plaque {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json state_json(const State5& u) {
  json j;
  for (int c = 0; c < kNumComponents; ++c) j[std::string(kComponentNames[c])] = u[c];
  return j;
}

/// Writes files into the output directory and pairs each with a sidecar that
/// holds the complete configuration of the job.
class Emitter {
 public:
  Emitter(std::string command, const RunConfig& cfg, fs::path dir)
      : command_(std::move(command)), config_(to_json(cfg)), dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw PreconditionError("cannot create output directory '" + dir_.string() + "'");
    }
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void added(const std::string& name) {
    json meta;
    meta["command"] = command_;
    meta["file"] = name;
    meta["config"] = config_;
    write_json(dir_ / (name + ".meta.json"), meta, true);
    result.files.push_back(name);
  }

  CommandResult result;

 private:
  std::string command_;
  json config_;
  fs::path dir_;
};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1.0);
  return v;
}

State5 scaled_equilibrium(const ModelParams& p, const State5& factors) {
  const auto eq = equilibrium(p);
  if (!eq.admissible) throw PreconditionError("the equilibrium is not admissible for these parameters");
  State5 u = eq.state();
  for (int c = 0; c < kNumComponents; ++c) u[c] *= factors[c];
  return u;
}

json bounds_json(const ModelParams& p) {
  const auto b = admissibility_bounds(p);
  json j;
  j["theta_bar"] = b.theta_bar;
  j["theta_bar_minus_beta_phi"] = b.theta_bar_minus_bp;
  j["theta_admissible"] = b.contains(p.theta);
  return j;
}

// ---------------------------------------------------------------- equilibrium

void cmd_equilibrium(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  const auto eq = equilibrium(p);
  json j;
  j["theta"] = p.theta;
  j["admissible"] = eq.admissible;
  j["violated_conditions"] = eq.violated_conditions;
  j["equilibrium"] = state_json(eq.state());
  j["bounds"] = bounds_json(p);
  if (eq.admissible) {
    const State5 r = reaction_terms(eq.state(), p);
    double res = 0.0;
    for (double v : r) res = std::max(res, std::abs(v));
    j["residual_inf"] = res;
  }
  if (cfg.dimensional) {
    j["dimensional_equilibrium"] = state_json(Scaling::from(*cfg.dimensional).to_dimensional(eq.state()));
  }
  j["warnings"] = p.warnings();
  write_json(em.path("equilibrium.json"), j);
  em.added("equilibrium.json");
  em.result.summary = j;
}

// ------------------------------------------------------------------ stability

json stability_json(const StabilityReport& r, const ModelParams& p, JacobianForm form) {
  json j;
  j["theta"] = p.theta;
  j["xi"] = p.xi;
  j["jacobian"] = std::string(to_string(form));
  j["admissible"] = r.equilibrium.admissible;
  j["equilibrium"] = state_json(r.equilibrium.state());
  j["theta_bar"] = r.bounds.theta_bar;
  j["theta_bar_minus_beta_phi"] = r.bounds.theta_bar_minus_bp;
  j["theta_plus"] = r.hopf ? json(r.hopf->theta_plus) : json(nullptr);
  j["theta_minus"] = r.hopf ? json(r.hopf->theta_minus) : json(nullptr);
  j["hopf_point_admissible"] = r.hopf_point_admissible;
  j["routh_hurwitz"] = {{"a1", r.rh.a1},
                        {"a2", r.rh.a2},
                        {"a3", r.rh.a3},
                        {"a1a2_minus_a3", r.rh.hopf_margin()},
                        {"stable", r.rh.stable}};
  j["hopf_period"] = opt(r.hopf_period);
  j["xi_star"] = opt(r.xi_star);
  j["homogeneous_stable"] = r.homogeneous_stable;
  j["turing_unstable"] = r.turing_unstable;
  j["regime"] = std::string(to_string(r.regime));
  if (r.equilibrium.admissible) {
    const auto q = dispersion_coefficients(p);
    j["k2_star"] = q.argmin();
    j["h_min"] = q.minimum();
  }
  j["unstable_modes"] = r.unstable_modes;
  j["fastest_mode"] = r.fastest_mode;
  j["fastest_rate"] = r.fastest_rate;
  j["routes_disagree"] = r.routes_disagree;
  return j;
}

void cmd_stability(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  const auto k2 = linspace(0.0, cfg.sweep.k2_max, cfg.sweep.k2_points);
  const auto rep = analyze(p, k2, cfg.grid.L, cfg.sweep.m_max, cfg.run.jacobian);
  json j = stability_json(rep, p, cfg.run.jacobian);
  j["domain_length"] = cfg.grid.L;
  if (rep.equilibrium.admissible) {
    const JacobianForm other =
        cfg.run.jacobian == JacobianForm::Printed ? JacobianForm::Exact : JacobianForm::Printed;
    const auto alt = analyze(p, k2, cfg.grid.L, cfg.sweep.m_max, other);
    j["alternate_jacobian"] = {{"jacobian", std::string(to_string(other))},
                               {"fastest_mode", alt.fastest_mode},
                               {"fastest_rate", alt.fastest_rate},
                               {"unstable_modes", alt.unstable_modes}};
  }
  write_json(em.path("stability.json"), j);
  em.added("stability.json");
  em.result.summary = j;
}

// ----------------------------------------------------------------- dispersion

void cmd_dispersion(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  if (!equilibrium(p).admissible) throw PreconditionError("dispersion: equilibrium is not admissible");
  const auto k2 = linspace(0.0, cfg.sweep.k2_max, cfg.sweep.k2_points);
  std::vector<double> ks;
  for (double v : k2) ks.push_back(std::sqrt(v));
  const auto printed = growth_rates(p, ks, JacobianForm::Printed);
  const auto exact = growth_rates(p, ks, JacobianForm::Exact);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < k2.size(); ++i) {
    rows.push_back({k2[i], dispersion_h(k2[i], p), printed.modes[i].max_real,
                    exact.modes[i].max_real});
  }
  write_csv(em.path("dispersion.csv"), {"k2", "h", "max_re_printed", "max_re_exact"}, rows);
  em.added("dispersion.csv");

  const auto km = neumann_wavenumbers(cfg.grid.L, cfg.sweep.m_max);
  const auto mp = growth_rates(p, km, JacobianForm::Printed);
  const auto me = growth_rates(p, km, JacobianForm::Exact);
  rows.clear();
  for (std::size_t m = 0; m < km.size(); ++m) {
    rows.push_back({static_cast<double>(m), km[m], km[m] * km[m], mp.modes[m].max_real,
                    me.modes[m].max_real});
  }
  write_csv(em.path("modes.csv"), {"m", "k", "k2", "rate_printed", "rate_exact"}, rows);
  em.added("modes.csv");

  const auto q = dispersion_coefficients(p);
  auto fastest = [&](const GrowthScan& s) {
    int best = 0;
    for (std::size_t m = 1; m < s.modes.size(); ++m) {
      if (s.modes[m].max_real > s.modes[best].max_real) best = static_cast<int>(m);
    }
    return json{{"mode", best}, {"rate", s.modes[best].max_real}};
  };
  json j;
  j["c2"] = q.c2;
  j["c1"] = q.c1;
  j["c0"] = q.c0;
  j["k2_star"] = q.argmin();
  j["h_min"] = q.minimum();
  j["xi_star"] = opt(turing_threshold_xi(p));
  j["domain_length"] = cfg.grid.L;
  j["fastest_printed"] = fastest(mp);
  j["fastest_exact"] = fastest(me);
  write_json(em.path("dispersion.json"), j);
  em.added("dispersion.json");
  em.result.summary = j;
}

// --------------------------------------------------------------- bifurcation

void cmd_bifurcation(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  const auto d = bifurcation_diagram(p, cfg.sweep.theta, cfg.sweep.xi, cfg.run.threads);
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : d.cells) {
    rows.push_back({format_number(c.theta), format_number(c.xi),
                    std::to_string(static_cast<int>(c.regime)), std::string(to_string(c.regime))});
  }
  write_table(em.path("bifurcation.csv"), {"theta", "xi", "regime_code", "regime"}, rows);
  em.added("bifurcation.csv");

  rows.clear();
  for (const auto& s : d.xi_star_curve) {
    rows.push_back({format_number(s.theta), s.xi_star ? format_number(*s.xi_star) : ""});
  }
  write_table(em.path("xi_star.csv"), {"theta", "xi_star"}, rows);
  em.added("xi_star.csv");

  // Regime map, xi increasing upwards, theta to the right.
  std::vector<std::vector<double>> img(d.xi.points, std::vector<double>(d.theta.points, 0.0));
  for (int i = 0; i < d.theta.points; ++i) {
    for (int k = 0; k < d.xi.points; ++k) {
      img[d.xi.points - 1 - k][i] = static_cast<int>(d.cells[i * d.xi.points + k].regime);
    }
  }
  write_pgm(em.path("bifurcation.pgm"), img);
  em.added("bifurcation.pgm");

  json counts;
  for (Regime r : {Regime::Inadmissible, Regime::HomogeneousUnstable, Regime::Stable, Regime::Turing}) {
    counts[std::string(to_string(r))] =
        std::count_if(d.cells.begin(), d.cells.end(), [&](const auto& c) { return c.regime == r; });
  }
  json j;
  j["theta_range"] = {d.theta.lo, d.theta.hi, d.theta.points};
  j["xi_range"] = {d.xi.lo, d.xi.hi, d.xi.points};
  j["theta_bar"] = d.theta_bar;
  j["theta_bar_minus_beta_phi"] = d.theta_bar_minus_bp;
  j["theta_plus"] = d.hopf ? json(d.hopf->theta_plus) : json(nullptr);
  j["theta_minus"] = d.hopf ? json(d.hopf->theta_minus) : json(nullptr);
  j["regime_counts"] = counts;
  j["regime_codes"] = {{"0", "inadmissible"}, {"1", "homogeneous-unstable"}, {"2", "stable"},
                       {"3", "turing"}};
  write_json(em.path("bifurcation.json"), j);
  em.added("bifurcation.json");
  em.result.summary = j;
}

// ------------------------------------------------------------------- simulate

void cmd_simulate(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  SimulationConfig sc;
  sc.grid = Grid1D(cfg.grid.L, cfg.grid.N);
  sc.t_end = cfg.run.t_end;
  sc.snapshot_every = cfg.run.snapshot_every;
  sc.seed = cfg.run.seed;
  sc.amplitude = cfg.run.amplitude;
  sc.recorded = cfg.run.record;
  sc.wall_clock_budget = cfg.run.wall_clock_budget;
  sc.options.scheme = cfg.run.scheme;
  sc.options.sensitivity = cfg.run.sensitivity;
  sc.options.dt_safety = cfg.run.dt_safety;
  const SpaceTimeRecord rec = simulate(p, sc);

  std::vector<double> xs(sc.grid.N);
  for (int i = 0; i < sc.grid.N; ++i) xs[i] = sc.grid.x(i);
  for (Component c : cfg.run.record) {
    const std::string name(kComponentNames[c]);
    write_space_time_csv(em.path(name + ".csv"), rec.times, xs, rec.snapshots[c]);
    em.added(name + ".csv");
    if (cfg.run.heatmap) {
      write_pgm(em.path(name + ".pgm"), rec.snapshots[c]);
      em.added(name + ".pgm");
    }
  }

  json j;
  j["theta"] = p.theta;
  j["xi"] = p.xi;
  j["incomplete"] = rec.incomplete;
  j["t_reached"] = rec.times.empty() ? 0.0 : rec.times.back();
  j["steps"] = rec.steps;
  j["dt_min"] = rec.dt_min;
  j["dt_max"] = rec.dt_max;
  j["clamp_events"] = rec.diagnostics.clamp_events;
  j["min_value"] = rec.diagnostics.min_value;
  j["max_R"] = rec.diagnostics.max_R;
  const json& cj = to_json(cfg);
  j["thresholds"] = cj["metrics"];
  if (rec.has(kE) && rec.times.size() >= 10) {
    const auto m = pattern_metrics(rec, cfg.metrics);
    j["regime"] = std::string(to_string(m.regime));
    j["oscillation_score"] = m.oscillation_score;
    j["early_oscillation_score"] = m.early_oscillation_score;
    j["late_oscillation_score"] = m.late_oscillation_score;
    j["late_drift"] = m.late_drift;
    j["reference_variance"] = m.reference_variance;
    j["late_variance"] = m.late_variance;
    j["final_mode_E"] = m.mode_E.back();
    if (!m.mode_R.empty()) j["final_mode_R"] = m.mode_R.back();
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < m.times.size(); ++k) {
      rows.push_back({m.times[k], m.variance_E[k], static_cast<double>(m.mode_E[k])});
    }
    write_csv(em.path("metrics.csv"), {"t", "variance_E", "mode_E"}, rows);
    em.added("metrics.csv");
  } else {
    j["regime"] = nullptr;
  }
  write_json(em.path("simulate.json"), j);
  em.added("simulate.json");
  em.result.partial = rec.incomplete;
  em.result.summary = j;
}

// -------------------------------------------------------------- kinetic-limit

void cmd_kinetic_limit(const RunConfig& cfg, Emitter& em) {
  const DimensionalParams d = dimensional_for(cfg);
  DiffusiveLimitSetup setup;
  setup.grid = Grid1D(cfg.kinetic.length, cfg.kinetic.cells);
  setup.t_probe = cfg.kinetic.t_probe;
  setup.amplitude = cfg.kinetic.amplitude;
  setup.threads = cfg.run.threads;
  setup.kinetic.M = cfg.kinetic.M;
  setup.kinetic.M_C = cfg.kinetic.M_C;
  setup.kinetic.transport = cfg.kinetic.transport;
  setup.kinetic.dt_safety = cfg.kinetic.dt_safety;
  const auto entries = diffusive_limit_error(d, cfg.sweep.eps, setup);

  std::vector<std::vector<std::string>> rows;
  const std::array<std::pair<const char*, double LimitEntry::*>, 4> fields = {{
      {"R", &LimitEntry::error_R},
      {"C", &LimitEntry::error_C},
      {"A", &LimitEntry::error_A},
      {"S", &LimitEntry::error_S},
  }};
  bool partial = false;
  json list = json::array();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    json je{{"eps", e.eps}, {"steps", e.steps}, {"negative_events", e.negative_events}};
    if (!e.failure.empty()) {
      partial = true;
      je["failure"] = e.failure;
      rows.push_back({format_number(e.eps), "all", "", ""});
      list.push_back(je);
      continue;
    }
    for (const auto& [name, member] : fields) {
      std::string order;
      if (i > 0 && entries[i - 1].failure.empty()) {
        const double a = entries[i - 1].*member, b = e.*member;
        if (a > 0.0 && b > 0.0) order = format_number(std::log(a / b) / std::log(entries[i - 1].eps / e.eps));
      }
      rows.push_back({format_number(e.eps), name, format_number(e.*member), order});
      je[std::string("error_") + name] = e.*member;
    }
    je["order_R"] = opt(e.order_R);
    list.push_back(je);
  }
  write_table(em.path("kinetic_limit.csv"), {"eps", "field", "L2_error", "observed_order"}, rows);
  em.added("kinetic_limit.csv");

  // Moments of the smallest successful eps next to the macroscopic solution.
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    if (!it->failure.empty()) continue;
    std::vector<std::vector<double>> mrows;
    for (int i = 0; i < setup.grid.N; ++i) {
      mrows.push_back({setup.grid.x(i), it->macro.u[kA][i], it->macro.u[kS][i], it->macro.u[kR][i],
                       it->macro.u[kC][i], it->macro.u[kE][i], it->flux_R[i],
                       it->reference.u[kR][i], it->reference.u[kC][i]});
    }
    write_csv(em.path("kinetic_moments.csv"),
              {"x", "A", "S", "R", "C", "E", "J_R", "R_macro", "C_macro"}, mrows);
    em.added("kinetic_moments.csv");
    break;
  }

  KineticOptions ko = setup.kinetic;
  const auto md = mode_decay_rate(d, setup.grid, cfg.kinetic.decay_mode, cfg.kinetic.decay_eps,
                                  cfg.kinetic.decay_t_end, ko);
  const VelocityGrid vr(d.V_cap, cfg.kinetic.M), vc(d.W_cap, cfg.kinetic.M_C);
  const auto tc = kinetic_transport_coefficients(d, vr, vc);

  json j;
  j["entries"] = list;
  j["strictly_decreasing_R"] = [&] {
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (!entries[i].failure.empty() || !entries[i - 1].failure.empty()) return false;
      if (!(entries[i].error_R < entries[i - 1].error_R)) return false;
    }
    return true;
  }();
  j["transport_coefficients"] = {{"D_R", tc.D_R}, {"D_C", tc.D_C}, {"chi", tc.chi}};
  j["mode_decay"] = {{"mode", cfg.kinetic.decay_mode},
                     {"eps", cfg.kinetic.decay_eps},
                     {"k", md.k},
                     {"measured", md.measured},
                     {"predicted", md.predicted},
                     {"relative_error", std::abs(md.measured / md.predicted - 1.0)}};
  write_json(em.path("kinetic_limit.json"), j);
  em.added("kinetic_limit.json");
  em.result.partial = partial;
  em.result.summary = j;
}

// ------------------------------------------------------------------------ ode

void cmd_ode(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  const State5 u0 = scaled_equilibrium(p, cfg.ode.initial);
  const auto tr = ode_simulate(p, u0, cfg.ode.t_end, cfg.ode.dt);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    if (i % cfg.ode.record_every != 0 && i + 1 != tr.t.size()) continue;
    rows.push_back({tr.t[i], tr.u[i][kA], tr.u[i][kS], tr.u[i][kR], tr.u[i][kC], tr.u[i][kE]});
  }
  write_csv(em.path("trajectory.csv"), {"t", "A", "S", "R", "C", "E"}, rows);
  em.added("trajectory.csv");

  json j;
  j["theta"] = p.theta;
  j["initial"] = state_json(u0);
  j["final"] = state_json(tr.u.back());
  j["min"] = state_json(tr.min);
  j["max_R"] = tr.max_R;
  const auto R = tr.component(kR);
  j["measured_period_R"] = opt(measure_period(tr.t, R, 0.5 * cfg.ode.t_end));
  j["hopf_period"] = opt(hopf_period(p));
  const auto rh = routh_hurwitz(p);
  j["a1a2_minus_a3"] = rh.hopf_margin();
  write_json(em.path("ode.json"), j);
  em.added("ode.json");
  em.result.summary = j;
}

// ------------------------------------------------------------- appendix-check

double max_relative(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = std::max(std::abs(b[i]), std::numeric_limits<double>::min());
    m = std::max(m, std::abs(a[i] - b[i]) / den);
  }
  return m;
}

// Largest relative change of a closed form between step h (coarse) and h/2
// (fine) on the coarse samples.
double refinement_change(const std::vector<double>& coarse, const std::vector<double>& fine) {
  double m = 0.0;
  for (std::size_t i = 0; i < coarse.size() && 2 * i < fine.size(); ++i) {
    m = std::max(m, std::abs(coarse[i] - fine[2 * i]) / std::max(std::abs(fine[2 * i]), 1e-300));
  }
  return m;
}

json closed_form_check(const Trajectory& fine, const Trajectory& coarse, double dC, double pC2,
                       const MyelinRates& rates) {
  const State5& u0 = fine.u.front();
  const auto nC = closed_form_nC(fine.t, fine.component(kA), fine.component(kR), dC, pC2, u0[kC]);
  const auto nE = closed_form_nE(fine.t, fine.component(kR), rates, u0[kE]);
  const auto nC2 =
      closed_form_nC(coarse.t, coarse.component(kA), coarse.component(kR), dC, pC2, u0[kC]);
  const auto nE2 = closed_form_nE(coarse.t, coarse.component(kR), rates, u0[kE]);
  json j;
  j["samples"] = fine.t.size();
  j["nC_max_relative_error"] = max_relative(nC, fine.component(kC));
  j["nE_max_relative_error"] = max_relative(nE, fine.component(kE));
  j["nC_refinement_change"] = refinement_change(nC2, nC);
  j["nE_refinement_change"] = refinement_change(nE2, nE);
  return j;
}

void cmd_appendix_check(const RunConfig& cfg, Emitter& em) {
  const ModelParams p = cfg.model();
  const State5 u0 = scaled_equilibrium(p, cfg.ode.appendix_initial);
  const double h = cfg.ode.appendix_dt, T = cfg.ode.appendix_t_end;
  json j;
  {
    const auto fine = ode_simulate(p, u0, T, h);
    const auto coarse = ode_simulate(p, u0, T, 2.0 * h);
    j["dimensionless"] = closed_form_check(fine, coarse, p.tau, 1.0, MyelinRates::from(p));
  }
  {
    const DimensionalParams d = dimensional_for(cfg);
    const PopulationSystem sys(d, cfg.ode.volume);
    State5 n0 = Scaling::from(d).to_dimensional(u0);
    for (double& v : n0) v *= cfg.ode.volume;
    const auto fine = population_simulate(sys, n0, T, h);
    const auto coarse = population_simulate(sys, n0, T, 2.0 * h);
    json pj = closed_form_check(fine, coarse, d.dC, sys.pC2_star(), MyelinRates::from(sys));
    pj["volume"] = cfg.ode.volume;
    j["populations"] = pj;

    const auto full = Scaling::from(d).to_dimensional(equilibrium(nondimensionalize(d)).state());
    for (bool corrected : {false, true}) {
      const auto rs = reduced_system(d, corrected);
      json rj{{"a", rs.a}, {"b", rs.b}, {"a_positive", rs.a_positive}};
      if (const auto fp = rs.fixed_point()) {
        rj["fixed_point_R"] = fp->first;
        rj["fixed_point_C"] = fp->second;
        rj["matches_full_equilibrium"] =
            std::abs(fp->first - full[kR]) <= 1e-9 * std::max(1.0, std::abs(full[kR])) &&
            std::abs(fp->second - full[kC]) <= 1e-9 * std::max(1.0, std::abs(full[kC]));
      }
      j[corrected ? "reduced_corrected" : "reduced_printed"] = rj;
    }
    j["full_equilibrium_R"] = full[kR];
    j["full_equilibrium_C"] = full[kC];
  }

  const auto star = positivity_dt_star(p, cfg.ode.harness_points, cfg.ode.harness_dt_max,
                                       cfg.ode.harness_levels, cfg.ode.harness_t_end,
                                       cfg.run.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < star.dt_probed.size(); ++l) {
    rows.push_back({star.dt_probed[l], static_cast<double>(star.violations[l]),
                    static_cast<double>(star.unbounded[l])});
  }
  write_csv(em.path("positivity.csv"), {"dt", "violations", "unbounded"}, rows);
  em.added("positivity.csv");
  j["positivity"] = {{"initial_conditions", star.initial_conditions},
                     {"dt_star", opt(star.dt_star)},
                     {"min_value_at_dt_star", star.min_value_at_dt_star},
                     {"t_end", cfg.ode.harness_t_end}};

  const std::vector<double> dts = {0.0, 1e-3};
  const auto near = euler_positivity_harness(p, scaled_equilibrium(p, {1.05, 0.95, 1.05, 0.95, 1.0}),
                                             dts, cfg.ode.harness_t_end);
  j["euler_near_equilibrium"] = {{"dt", near.runs[1].dt},
                                 {"positive", near.runs[1].positive},
                                 {"min", *std::min_element(near.runs[1].min.begin(),
                                                           near.runs[1].min.end())}};
  write_json(em.path("appendix.json"), j);
  em.added("appendix.json");
  em.result.summary = j;
}

}  // namespace

std::vector<std::string> command_names() {
  return {"equilibrium", "stability",     "dispersion", "bifurcation",
          "simulate",    "kinetic-limit", "ode",        "appendix-check"};
}

DimensionalParams dimensional_for(const RunConfig& cfg) {
  if (cfg.dimensional) return *cfg.dimensional;
  RunConfig tmp = preset_config("paper-dimensional");
  tmp.set_theta(cfg.params.theta);
  tmp.set_xi(cfg.params.xi);
  const ModelParams a = tmp.model();
  const ModelParams& b = cfg.params;
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); };
  const bool same = close(a.beta, b.beta) && close(a.zeta, b.zeta) && close(a.mu, b.mu) &&
                    close(a.delta, b.delta) && close(a.tau, b.tau) && close(a.eta, b.eta) &&
                    close(a.phi, b.phi) && close(a.Theta, b.Theta) && close(a.Omega, b.Omega) &&
                    close(a.Xi, b.Xi) && a.squeeze.kind() == b.squeeze.kind();
  if (!same) {
    throw PreconditionError(
        "this command needs dimensional coefficients: add a [dimensional] block (only theta and xi "
        "can be mapped onto the dimensional preset)");
  }
  return *tmp.dimensional;
}

CommandResult run_command(std::string_view name, const RunConfig& cfg, const fs::path& out_dir) {
  const auto names = command_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ParameterError("unknown command '" + std::string(name) + "'");
  }
  Emitter em(std::string(name), cfg, out_dir);
  if (name == "equilibrium") {
    cmd_equilibrium(cfg, em);
  } else if (name == "stability") {
    cmd_stability(cfg, em);
  } else if (name == "dispersion") {
    cmd_dispersion(cfg, em);
  } else if (name == "bifurcation") {
    cmd_bifurcation(cfg, em);
  } else if (name == "simulate") {
    cmd_simulate(cfg, em);
  } else if (name == "kinetic-limit") {
    cmd_kinetic_limit(cfg, em);
  } else if (name == "ode") {
    cmd_ode(cfg, em);
  } else {
    cmd_appendix_check(cfg, em);
  }
  return em.result;
}

json error_json(std::string_view kind, std::string_view message, std::string_view command) {
  return {{"error", {{"kind", kind}, {"message", message}, {"command", command}}}};
}

}  // namespace plaque
