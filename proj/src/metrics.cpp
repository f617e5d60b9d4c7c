#include "plaque/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "plaque/error.hpp"

namespace plaque {

namespace {

double mean(std::span<const double> f) {
  return f.empty() ? 0.0 : std::accumulate(f.begin(), f.end(), 0.0) / f.size();
}

double window_score(const std::vector<std::vector<double>>& E, std::size_t k0, std::size_t k1,
                    const std::vector<int>& probes) {
  if (k1 <= k0 + 2 || probes.empty()) return 0.0;
  double sum = 0.0;
  std::vector<double> series;
  for (int cell : probes) {
    series.clear();
    for (std::size_t k = k0; k < k1; ++k) series.push_back(E[k][cell]);
    sum += oscillation_score(series);
  }
  return sum / probes.size();
}

}  // namespace

std::vector<double> cosine_amplitudes(std::span<const double> f, int m_max) {
  const std::size_t n = f.size();
  std::vector<double> a(static_cast<std::size_t>(m_max) + 1, 0.0);
  if (n == 0) return a;
  const double mu = mean(f);
  for (int m = 0; m <= m_max; ++m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += (f[i] - mu) * std::cos(m * std::numbers::pi * (i + 0.5) / n);
    }
    a[m] = 2.0 * s / n;
  }
  return a;
}

int dominant_mode(std::span<const double> f) {
  if (spatial_variance(f) == 0.0) return 0;
  const auto a = cosine_amplitudes(f, static_cast<int>(f.size()) / 2);
  int best = 0;
  double best_abs = 0.0;
  for (std::size_t m = 1; m < a.size(); ++m) {
    if (std::abs(a[m]) > best_abs) {
      best_abs = std::abs(a[m]);
      best = static_cast<int>(m);
    }
  }
  return best;
}

double spatial_variance(std::span<const double> f) {
  if (f.empty()) return 0.0;
  const double mu = mean(f);
  double s = 0.0;
  for (double v : f) s += (v - mu) * (v - mu);
  return s / f.size();
}

double oscillation_score(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 4) return 0.0;
  const double mu = mean(series);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = series[i] - mu;
  double c0 = 0.0;
  for (double v : x) c0 += v * v;
  if (c0 <= 0.0) return 0.0;
  std::vector<double> ac(n, 0.0);
  for (std::size_t lag = 0; lag < n; ++lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += x[i] * x[i + lag];
    ac[lag] = s / c0;
  }
  std::size_t zero = 0;
  while (zero < n && ac[zero] > 0.0) ++zero;
  if (zero >= n) return 0.0;
  double peak = 0.0;
  for (std::size_t lag = zero; lag < n; ++lag) peak = std::max(peak, ac[lag]);
  return peak;
}

std::string_view to_string(PatternRegime r) {
  switch (r) {
    case PatternRegime::Uniform:
      return "uniform";
    case PatternRegime::OscillatoryPatterned:
      return "oscillatory-patterned";
    case PatternRegime::OscillatoryThenFrozen:
      return "oscillatory-then-frozen";
    case PatternRegime::FrozenPatterned:
      return "frozen-patterned";
  }
  return "uniform";
}

PatternMetrics pattern_metrics(const SpaceTimeRecord& rec, const RegimeThresholds& th) {
  if (!rec.has(kE)) throw PreconditionError("pattern_metrics: record has no E snapshots");
  const auto& E = rec.snapshots[kE];
  const std::size_t ns = E.size();
  if (ns < 10) throw PreconditionError("pattern_metrics: need at least 10 snapshots");
  if (th.probes < 1) throw ParameterError("pattern_metrics: need at least one probe");

  PatternMetrics m;
  m.times = rec.times;
  for (const auto& e : E) {
    m.variance_E.push_back(spatial_variance(e));
    m.mode_E.push_back(dominant_mode(e));
  }
  if (rec.has(kR)) {
    for (const auto& r : rec.snapshots[kR]) m.mode_R.push_back(dominant_mode(r));
  }

  const int n = static_cast<int>(E.front().size());
  for (int j = 0; j < th.probes; ++j) {
    m.probe_cells.push_back(static_cast<int>((j + 0.5) * n / th.probes));
  }

  for (int cell : m.probe_cells) {
    std::vector<double> series(ns);
    for (std::size_t k = 0; k < ns; ++k) series[k] = E[k][cell];
    m.probe_scores.push_back(oscillation_score(series));
  }
  m.oscillation_score = mean(m.probe_scores);

  const double t_end = rec.times.back();
  auto index_at = [&](double t) {
    const auto it = std::lower_bound(rec.times.begin(), rec.times.end(), t - 1e-9);
    return static_cast<std::size_t>(it - rec.times.begin());
  };
  m.early_oscillation_score = window_score(E, index_at(th.early_begin * t_end),
                                           index_at(th.early_end * t_end) + 1, m.probe_cells);
  m.late_oscillation_score = window_score(E, index_at(0.5 * t_end), ns, m.probe_cells);

  const auto& last = E.back();
  const auto& ref = E[std::min(index_at(0.9 * t_end), ns - 1)];
  for (int i = 0; i < n; ++i) m.late_drift = std::max(m.late_drift, std::abs(last[i] - ref[i]));

  for (double v : m.variance_E) {
    if (v > 0.0) {
      m.reference_variance = v;
      break;
    }
  }
  const std::size_t late0 = std::min(index_at(0.9 * t_end), ns - 1);
  double acc = 0.0;
  for (std::size_t k = late0; k < ns; ++k) acc += m.variance_E[k];
  m.late_variance = acc / (ns - late0);

  m.regime = classify_regime(m, th);
  return m;
}

PatternRegime classify_regime(const PatternMetrics& m, const RegimeThresholds& th) {
  const bool patterned =
      m.late_variance > 0.0 && m.late_variance > th.variance_growth * m.reference_variance;
  if (!patterned) return PatternRegime::Uniform;
  if (m.late_drift >= th.drift) return PatternRegime::OscillatoryPatterned;
  if (m.early_oscillation_score > th.oscillation) return PatternRegime::OscillatoryThenFrozen;
  return PatternRegime::FrozenPatterned;
}

}  // namespace plaque
