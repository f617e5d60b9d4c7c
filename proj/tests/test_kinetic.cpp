#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "plaque/error.hpp"
#include "plaque/kinetic.hpp"

using namespace plaque;

namespace {

double weighted_sum(const std::vector<double>& f, const VelocityGrid& g) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += g.w[j] * f[j];
  return s;
}

std::vector<double> random_distribution(std::mt19937_64& rng, int M) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> f(M);
  for (auto& x : f) x = u(rng);
  return f;
}

// Uniform macroscopic state at the dimensional equilibrium.
FieldState equilibrium_field(const DimensionalParams& d, const Grid1D& g) {
  const auto u = Scaling::from(d).to_dimensional(equilibrium(nondimensionalize(d)).state());
  FieldState m(g.N);
  for (int c = 0; c < kNumComponents; ++c) m.u[c].assign(g.N, u[c]);
  return m;
}

}  // namespace

TEST_CASE("velocity grid") {
  const VelocityGrid g(1.5, 16);
  double sw = 0.0;
  for (int j = 0; j < g.M; ++j) {
    CHECK(g.v[j] == doctest::Approx(-g.v[g.M - 1 - j]));
    CHECK(g.v[j] != 0.0);
    sw += g.w[j];
  }
  CHECK(sw == doctest::Approx(3.0));
  CHECK(g.omega == doctest::Approx(3.0));
  CHECK(g.second_moment() == doctest::Approx(2.0 * 1.5 * 1.5 * 1.5 / 3.0).epsilon(0.01));
  CHECK_THROWS_AS(VelocityGrid(1.0, 7), ParameterError);
  CHECK_THROWS_AS(VelocityGrid(0.0, 8), ParameterError);
}

TEST_CASE("random turning operator") {
  const VelocityGrid g(1.0, 16);
  const Squeeze sq;
  const std::vector<double> flat(16, 0.7);
  for (double v : turning_L0_R(flat, 0.3, 1.0, 1.0, sq, g)) CHECK(std::abs(v) < 1e-15);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const auto f = random_distribution(rng, 16);
    CHECK(std::abs(weighted_sum(turning_L0_R(f, 0.4, 1.0, 2.0, sq, g), g)) < 1e-12);
  }
  std::vector<double> spike(16, 0.0);
  spike[0] = 1.0;
  const auto out = turning_L0_R(spike, 0.2, 1.0, 1.0, sq, g);
  CHECK(out[0] < 0.0);
  for (int j = 1; j < 16; ++j) CHECK(out[j] > 0.0);
  CHECK(std::abs(weighted_sum(out, g)) < 1e-12);
  CHECK_THROWS_AS(turning_L0_R(std::vector<double>(8, 1.0), 0.2, 1.0, 1.0, sq, g),
                  PreconditionError);
}

TEST_CASE("chemotactic turning operator") {
  const VelocityGrid g(1.0, 16);
  const Squeeze sq;
  std::mt19937_64 rng(2);
  const auto f = random_distribution(rng, 16);
  for (double v : turning_L1_R(f, 0.3, 1.0, 0.0, 1.0, 4.0, sq, g)) CHECK(v == 0.0);
  for (double v : turning_L1_R(f, 1.0, 1.0, 0.5, 1.0, 4.0, sq, g)) CHECK(v == 0.0);
  for (double v : turning_L1_R(f, 1.2, 1.0, 0.5, 1.0, 4.0, sq, g)) CHECK(v == 0.0);
  for (int k = 0; k < 100; ++k) {
    const auto h = random_distribution(rng, 16);
    const auto out = turning_L1_R(h, 0.3, 1.0, 0.7, 1.3, 4.0, sq, g);
    CHECK(std::abs(weighted_sum(out, g)) < 1e-12);
  }
  // Points up the gradient.
  const auto up = turning_L1_R(f, 0.3, 1.0, 0.5, 1.0, 4.0, sq, g);
  CHECK(up[15] > 0.0);
  CHECK(up[0] < 0.0);
}

TEST_CASE("cytokine turning operator and relaxation") {
  const VelocityGrid g(2.0, 8);
  const double sigma = 3.0;
  for (double v : turning_LC(std::vector<double>(8, 0.4), sigma, g)) CHECK(std::abs(v) < 1e-15);
  std::mt19937_64 rng(3);
  auto f = random_distribution(rng, 8);
  CHECK(std::abs(weighted_sum(turning_LC(f, sigma, g), g)) < 1e-12);
  const double mean = weighted_sum(f, g) / g.omega;
  const double dt = 0.05;
  auto deviation = [&] {
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x - mean));
    return m;
  };
  double prev = deviation();
  for (int k = 0; k < 20; ++k) {
    const auto d = turning_LC(f, sigma, g);
    for (int j = 0; j < 8; ++j) f[j] += dt * d[j];
    const double now = deviation();
    CHECK(now / prev == doctest::Approx(1.0 - sigma * dt).epsilon(1e-9));
    prev = now;
  }
}

TEST_CASE("lift and moments") {
  const auto d = DimensionalParams::paper_preset();
  const Grid1D g(12.0, 32);
  FieldState m(g.N);
  for (int i = 0; i < g.N; ++i) {
    m.u[kA][i] = 0.5;
    m.u[kS][i] = 0.1;
    m.u[kR][i] = 0.3 + 0.1 * std::cos(g.x(i));
    m.u[kC][i] = 0.2;
    m.u[kE][i] = 0.6;
  }
  KineticOptions opt;
  const auto s = lift(d, m, opt);
  CHECK(s.fR[0] == doctest::Approx(m.u[kR][0] / (2.0 * d.V_cap)));
  const auto back = moments(s, d);
  for (int c = 0; c < kNumComponents; ++c) {
    for (int i = 0; i < g.N; ++i) CHECK(back.u[c][i] == doctest::Approx(m.u[c][i]));
  }
  for (double q : flux_moment_R(s, d)) CHECK(std::abs(q) < 1e-15);
  for (int i = 0; i < g.N; ++i) CHECK(std::abs(s.E1[i] + s.E2[i] + s.E[i] - d.E_bar) < 1e-15);
}

TEST_CASE("kinetic rhs structure") {
  const auto d = DimensionalParams::paper_preset();
  const Grid1D g(12.0, 32);
  KineticOptions opt;
  opt.eps = 0.05;
  KineticSolver solver(d, g, opt);
  const VelocityGrid& vr = solver.vgrid_R();
  const VelocityGrid& vc = solver.vgrid_C();

  const auto eq = lift(d, equilibrium_field(d, g), opt);
  KineticState out;
  solver.rhs(eq, out);
  for (int i = 0; i < g.N; ++i) {
    double dR = 0.0, dCyt = 0.0;
    for (int j = 0; j < eq.M; ++j) dR += vr.w[j] * out.fR[i * eq.M + j];
    for (int j = 0; j < eq.MC; ++j) dCyt += vc.w[j] * out.fC[i * eq.MC + j];
    CHECK(std::abs(dR) < 1e-9);
    CHECK(std::abs(dCyt) < 1e-9);
    CHECK(std::abs(out.A[i]) < 1e-9);
    CHECK(std::abs(out.S[i]) < 1e-9);
    CHECK(std::abs(out.E[i]) < 1e-9);
  }

  // Perturbed state: myelin rows telescope, cytokine production is pC2 A R.
  FieldState m = equilibrium_field(d, g);
  for (int i = 0; i < g.N; ++i) {
    m.u[kR][i] *= 1.0 + 0.2 * std::cos(0.5 * g.x(i));
    m.u[kA][i] *= 1.1;
    m.u[kE][i] *= 0.7;
  }
  const auto s = lift(d, m, opt);
  solver.rhs(s, out);
  for (int i = 0; i < g.N; ++i) {
    CHECK(std::abs(out.E1[i] + out.E2[i] + out.E[i]) < 1e-12);
    double dCyt = 0.0;
    for (int j = 0; j < s.MC; ++j) dCyt += vc.w[j] * out.fC[i * s.MC + j];
    CHECK(dCyt == doctest::Approx(d.pC2 * m.u[kA][i] * m.u[kR][i] - d.dC * m.u[kC][i]));
  }
}

TEST_CASE("myelin conservation and positivity over a run") {
  const auto d = DimensionalParams::paper_preset();
  const Grid1D g(12.0, 64);
  KineticOptions opt;
  opt.eps = 0.1;
  const auto run = run_kinetic(d, g, limit_initial_data(d, g, 0.05), 0.5, opt);
  CHECK(run.steps > 100);
  CHECK(run.diagnostics.max_myelin_error < 1e-10);
  CHECK(run.diagnostics.negative_events == 0);
}

TEST_CASE("transport conserves mass with reflecting walls") {
  const auto d = DimensionalParams::paper_preset();
  const Grid1D g(12.0, 64);
  for (auto scheme : {TransportScheme::Central, TransportScheme::Upwind}) {
    KineticOptions opt;
    opt.eps = 0.1;
    opt.interactions = false;
    opt.transport = scheme;
    FieldState m(g.N);
    for (int i = 0; i < g.N; ++i) {
      m.u[kR][i] = 0.2 + 0.1 * std::cos(3.14159 * g.x(i) / g.L);
      m.u[kC][i] = 0.1 + 0.05 * g.x(i) / g.L;
    }
    const auto run = run_kinetic(d, g, m, 0.3, opt);
    double r0 = 0.0, r1 = 0.0, c0 = 0.0, c1 = 0.0;
    for (int i = 0; i < g.N; ++i) {
      r0 += m.u[kR][i];
      r1 += run.macro.u[kR][i];
      c0 += m.u[kC][i];
      c1 += run.macro.u[kC][i];
    }
    CHECK(r1 == doctest::Approx(r0).epsilon(1e-12));
    CHECK(c1 == doctest::Approx(c0).epsilon(1e-12));
  }
}

TEST_CASE("pure diffusion mode decay") {
  const auto d = DimensionalParams::paper_preset();
  const auto md = mode_decay_rate(d, Grid1D(12.0, 128), 2, 0.025, 1.0);
  CHECK(md.predicted == doctest::Approx(d.V_cap * d.V_cap / (3.0 * d.lambda) * md.k * md.k));
  CHECK(std::abs(md.measured / md.predicted - 1.0) < 0.05);
}

TEST_CASE("chemotactic drift of a bump in a frozen linear profile") {
  const auto d = DimensionalParams::paper_preset();
  const Grid1D g(12.0, 128);
  const double slope = 0.1, t_end = 5.0;
  FieldState m(g.N);
  for (int i = 0; i < g.N; ++i) {
    const double x = g.x(i);
    m.u[kR][i] = 0.01 * std::exp(-(x - 4.0) * (x - 4.0) / 0.5);
    m.u[kC][i] = slope * x;
  }
  KineticOptions opt;
  opt.eps = 0.025;
  opt.interactions = false;
  opt.frozen_C = true;
  auto centre = [&](const FieldState& f) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < g.N; ++i) {
      a += f.u[kR][i] * g.x(i);
      b += f.u[kR][i];
    }
    return a / b;
  };
  const auto run = run_kinetic(d, g, m, t_end, opt);
  const double velocity = (centre(run.macro) - centre(m)) / t_end;
  // Low density: Phi0 ~ Phi1 ~ 1, so the drift is chi dC/dx.
  const auto tc = kinetic_transport_coefficients(d, VelocityGrid(d.V_cap, opt.M),
                                                 VelocityGrid(d.W_cap, opt.M_C));
  const double predicted = tc.chi * slope;
  CHECK(std::abs(velocity / predicted - 1.0) < 0.10);
}

TEST_CASE("diffusive limit is deterministic and ordered") {
  const auto d = DimensionalParams::paper_preset();
  DiffusiveLimitSetup setup;
  setup.grid = Grid1D(12.0, 32);
  setup.t_probe = 0.1;
  const std::vector<double> eps = {0.2, 0.1};
  setup.threads = 2;
  const auto a = diffusive_limit_error(d, eps, setup);
  setup.threads = 1;
  const auto b = diffusive_limit_error(d, eps, setup);
  REQUIRE(a.size() == 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].eps == eps[i]);
    CHECK(a[i].error_R == b[i].error_R);
    CHECK(a[i].error_C == b[i].error_C);
    CHECK(a[i].failure.empty());
  }
  CHECK_FALSE(a[0].order_R.has_value());
  CHECK(a[1].order_R.has_value());
  const std::vector<double> bad = {0.05, 0.1};
  CHECK_THROWS_AS(diffusive_limit_error(d, bad, setup), ParameterError);
}
