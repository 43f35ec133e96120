#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "tis/solver.hpp"
#include "tis/surface_profile.hpp"

namespace tis {

/// Annotation-only reference constants for plot overlays; never used in
/// simulation or acceptance logic.
inline constexpr double kEnvelopeDeflectionRatio = 3.0;        ///< theoretical delta/h bound
inline constexpr double kPlanarSaturatedDeflectionRatio = 1.3; ///< 5x5 planar envelope delta/h

/// Force scale E*h^4/L^2 in N (E in MPa, lengths in mm).
inline double force_scale(double youngs_mpa, double height, double panel_side) {
  return youngs_mpa * std::pow(height, 4) / (panel_side * panel_side);
}

/// Work scale E*h^4/L in N*mm.
inline double work_scale(double youngs_mpa, double height, double panel_side) {
  return youngs_mpa * std::pow(height, 4) / panel_side;
}

struct LoadDeflectionCurve {
  std::vector<std::pair<double, double>> samples;  ///< (delta mm, Fy N), delta non-decreasing
  double youngs_mpa = 0.0, height = 0.0, panel_side = 0.0;

  static LoadDeflectionCurve from_history(const RunHistory& hist, double youngs_mpa,
                                          double height, double panel_side) {
    LoadDeflectionCurve c;
    c.youngs_mpa = youngs_mpa;
    c.height = height;
    c.panel_side = panel_side;
    c.samples.reserve(hist.rows.size());
    for (const auto& r : hist.rows) c.samples.emplace_back(r.delta, r.fy);
    return c;
  }
};

struct Peak {
  double f_max = 0.0;
  double delta_at_peak = 0.0;
  size_t index = 0;
};

/// Global maximum of Fy; ties resolve to the smallest delta.
inline Peak peak_load(const LoadDeflectionCurve& curve) {
  if (curve.samples.empty()) throw std::invalid_argument("peak_load: empty curve");
  Peak p{curve.samples[0].second, curve.samples[0].first, 0};
  for (size_t i = 1; i < curve.samples.size(); ++i) {
    if (curve.samples[i].second > p.f_max) {
      p.f_max = curve.samples[i].second;
      p.delta_at_peak = curve.samples[i].first;
      p.index = i;
    }
  }
  return p;
}

/// Trapezoidal area under the curve up to the given sample (default: all).
inline double work_to_failure(const LoadDeflectionCurve& curve, size_t up_to_index = SIZE_MAX) {
  const size_t n = std::min(up_to_index + 1, curve.samples.size());
  double u = 0.0;
  for (size_t i = 1; i < n; ++i) {
    const auto& [d1, f1] = curve.samples[i - 1];
    const auto& [d2, f2] = curve.samples[i];
    if (d2 < d1 - 1e-12) throw std::invalid_argument("work_to_failure: delta must not decrease");
    u += 0.5 * (f1 + f2) * (d2 - d1);
  }
  return u;
}

struct NormalizedCurve {
  std::vector<std::pair<double, double>> samples;  ///< (delta/h, F/(E h^4/L^2))
};

inline NormalizedCurve normalize(const LoadDeflectionCurve& curve) {
  if (!(curve.youngs_mpa > 0.0 && curve.height > 0.0 && curve.panel_side > 0.0))
    throw std::invalid_argument("normalize: E, h, L must be > 0");
  const double fs = force_scale(curve.youngs_mpa, curve.height, curve.panel_side);
  NormalizedCurve out;
  out.samples.reserve(curve.samples.size());
  for (const auto& [d, f] : curve.samples) out.samples.emplace_back(d / curve.height, f / fs);
  return out;
}

enum class FailureMode { sliding, hinging_detachment, non_converged };

inline const char* to_string(FailureMode m) {
  switch (m) {
    case FailureMode::sliding: return "sliding";
    case FailureMode::hinging_detachment: return "hinging-detachment";
    case FailureMode::non_converged: return "non-converged";
  }
  return "?";
}

struct RunSummary {
  double f_max = 0.0;          ///< N
  double delta_at_peak = 0.0;  ///< mm
  double delta_ult = 0.0;      ///< mm
  double work = 0.0;           ///< N*mm
  double f_max_norm = 0.0;
  double delta_ult_over_h = 0.0;
  double work_norm = 0.0;
  FailureMode mode = FailureMode::hinging_detachment;
};

/// delta_ult is the last converged increment before the failure criterion
/// fired (or the last sample of a censored/non-converged run); U integrates
/// up to it. Mode tagging: >50% of central contact points slipping at the
/// end reads as sliding.
inline RunSummary summarize_run(const LoadDeflectionCurve& curve, const RunHistory& hist) {
  RunSummary s;
  const auto pk = peak_load(curve);
  s.f_max = pk.f_max;
  s.delta_at_peak = pk.delta_at_peak;
  size_t ult_index = curve.samples.size() - 1;
  if (hist.termination == Termination::failed_interlock && curve.samples.size() >= 2)
    ult_index = curve.samples.size() - 2;
  s.delta_ult = curve.samples[ult_index].first;
  s.work = work_to_failure(curve, ult_index);
  const double fs = force_scale(curve.youngs_mpa, curve.height, curve.panel_side);
  const double ws = work_scale(curve.youngs_mpa, curve.height, curve.panel_side);
  s.f_max_norm = s.f_max / fs;
  s.delta_ult_over_h = s.delta_ult / curve.height;
  s.work_norm = s.work / ws;
  if (hist.nonconverged())
    s.mode = FailureMode::non_converged;
  else
    s.mode = hist.final_central_slip_fraction() > 0.5 ? FailureMode::sliding
                                                      : FailureMode::hinging_detachment;
  return s;
}

struct CollapsePoint {
  double top_slope = 0.0;  ///< s = A/(lambda/4)
  double work_norm = 0.0;
  double f_max_norm = 0.0;
  int oscillations = 0;
  double amplitude = 0.0;
};

/// Sorted table for Fig-4c/d style collapse plots.
inline std::vector<CollapsePoint> collapse_sweep(std::vector<CollapsePoint> points) {
  if (points.size() < 2) throw std::invalid_argument("collapse_sweep: need >= 2 summaries");
  std::sort(points.begin(), points.end(), [](const CollapsePoint& a, const CollapsePoint& b) {
    if (a.top_slope != b.top_slope) return a.top_slope < b.top_slope;
    if (a.oscillations != b.oscillations) return a.oscillations < b.oscillations;
    return a.amplitude < b.amplitude;
  });
  return points;
}

struct SaturationResult {
  bool plateau = false;
  double level = 0.0;
  double onset_s = 0.0;
};

/// Upper-s tail plateau: longest suffix (>= 3 points) whose max-min spread
/// stays within 10% of the tail mean.
inline SaturationResult detect_saturation(std::vector<std::pair<double, double>> points,
                                          double spread_tol = 0.10) {
  if (points.size() < 4) throw std::invalid_argument("detect_saturation: need >= 4 points");
  std::sort(points.begin(), points.end());
  SaturationResult out;
  size_t best_start = points.size();
  for (size_t start = points.size() - 1;; --start) {
    double lo = 1e300, hi = -1e300, sum = 0.0;
    for (size_t i = start; i < points.size(); ++i) {
      lo = std::min(lo, points[i].second);
      hi = std::max(hi, points[i].second);
      sum += points[i].second;
    }
    const double mean = sum / (points.size() - start);
    if (mean <= 0.0 || (hi - lo) / mean > spread_tol) break;
    best_start = start;
    if (start == 0) break;
  }
  const size_t tail = points.size() - best_start;
  if (tail >= 3) {
    double sum = 0.0;
    for (size_t i = best_start; i < points.size(); ++i) sum += points[i].second;
    out.plateau = true;
    out.level = sum / tail;
    out.onset_s = points[best_start].first;
  }
  return out;
}

struct ScalingFit {
  double exponent = 0.0;
  double log_intercept = 0.0;
  double max_abs_residual = 0.0;  ///< in log space
  int used = 0;
  int excluded = 0;
};

/// Log-log least squares of U against F_max; non-positive values excluded.
inline ScalingFit scaling_relation(const std::vector<std::pair<double, double>>& f_u_pairs) {
  ScalingFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [f, u] : f_u_pairs) {
    if (f > 0.0 && u > 0.0)
      logs.emplace_back(std::log(f), std::log(u));
    else
      ++fit.excluded;
  }
  if (logs.size() < 2) throw std::invalid_argument("scaling_relation: need >= 2 positive points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : logs) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(logs.size());
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw std::invalid_argument("scaling_relation: degenerate abscissa");
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.log_intercept = (sy - fit.exponent * sx) / n;
  for (const auto& [x, y] : logs)
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(y - (fit.log_intercept + fit.exponent * x)));
  fit.used = static_cast<int>(logs.size());
  return fit;
}

/// Count prominent load drops (hysteresis automaton; prominence relative to
/// the curve peak).
inline int count_load_drops(const LoadDeflectionCurve& curve, double prominence_rel = 0.02) {
  if (curve.samples.size() < 3) return 0;
  double fmax = 0.0;
  for (const auto& [d, f] : curve.samples) fmax = std::max(fmax, f);
  const double prom = prominence_rel * fmax;
  if (!(prom > 0.0)) return 0;
  int drops = 0;
  bool rising = true;
  double peak = curve.samples[0].second, valley = peak;
  for (const auto& [d, f] : curve.samples) {
    if (rising) {
      peak = std::max(peak, f);
      if (f <= peak - prom) {
        ++drops;
        rising = false;
        valley = f;
      }
    } else {
      valley = std::min(valley, f);
      if (f >= valley + prom) {
        rising = true;
        peak = f;
      }
    }
  }
  return drops;
}

}  // namespace tis
