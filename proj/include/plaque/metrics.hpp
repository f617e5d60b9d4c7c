#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "plaque/pde.hpp"

namespace plaque {

/// Coefficients a_m = (2/N) sum_i (f_i - mean f) cos(m pi x_i / L), m = 0..m_max,
/// for a cell-centred field on N cells.
std::vector<double> cosine_amplitudes(std::span<const double> f, int m_max);

/// Index of the largest |a_m| for m >= 1; 0 for a uniform field.
int dominant_mode(std::span<const double> f);

double spatial_variance(std::span<const double> f);

/// Peak of the normalised autocorrelation of a mean-removed series, taken
/// after its first zero crossing. 0 for constant or monotone series.
double oscillation_score(std::span<const double> series);

/// Thresholds used to name the pattern regime of a run.
struct RegimeThresholds {
  // Mean probe autocorrelation peak above which a window counts as oscillating.
  double oscillation = 0.3;
  // ||E(t_end) - E(0.9 t_end)||_inf below which the pattern counts as frozen.
  double drift = 1e-3;
  // Late spatial variance must exceed this multiple of the first nonzero one.
  double variance_growth = 10.0;
  // Early window, as fractions of t_end, used for the oscillation test.
  double early_begin = 0.1;
  double early_end = 0.5;
  int probes = 5;
};

enum class PatternRegime { Uniform, OscillatoryPatterned, OscillatoryThenFrozen, FrozenPatterned };
std::string_view to_string(PatternRegime r);

struct PatternMetrics {
  std::vector<double> times;
  std::vector<double> variance_E;
  std::vector<int> mode_E;
  std::vector<int> mode_R;  // empty when R was not recorded
  std::vector<int> probe_cells;
  std::vector<double> probe_scores;  // whole-record score per probe
  double oscillation_score = 0;      // mean of probe_scores
  double early_oscillation_score = 0;
  double late_oscillation_score = 0;  // last half of the record
  double late_drift = 0;
  double reference_variance = 0;  // first nonzero spatial variance of E
  double late_variance = 0;       // mean over the last 10% of snapshots
  PatternRegime regime = PatternRegime::Uniform;
};

/// Requires E snapshots and at least 10 of them (PreconditionError otherwise).
PatternMetrics pattern_metrics(const SpaceTimeRecord& rec, const RegimeThresholds& th = {});

PatternRegime classify_regime(const PatternMetrics& m, const RegimeThresholds& th);

}  // namespace plaque
