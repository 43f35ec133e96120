#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tis/errors.hpp"

namespace tis {

/// Analytic height field of one block face: a mean-inclination ramp pivoting
/// about mid-face plus a sinusoid with `oscillations` whole periods over the
/// face length. The planar face is the degenerate amplitude = 0 case.
///
/// Offsets are measured along the face's global interface axis; the domain
/// coordinate runs over [0, face_length].
struct SurfaceProfile {
  double amplitude = 0.0;            ///< A, mm
  int oscillations = 1;              ///< n >= 1
  double avg_inclination_deg = 0.0;  ///< theta-bar, degrees, |theta| < 45
  double phase = 0.0;                ///< phi, radians
  double face_length = 0.0;          ///< l_face, mm (profile domain length)

  void validate() const {
    if (!(amplitude >= 0.0)) throw std::invalid_argument("SurfaceProfile: amplitude must be >= 0");
    if (oscillations < 1) throw std::invalid_argument("SurfaceProfile: oscillations must be >= 1");
    if (!(std::abs(avg_inclination_deg) < 45.0))
      throw std::invalid_argument("SurfaceProfile: |avg inclination| must be < 45 deg");
    if (!(face_length > 0.0)) throw std::invalid_argument("SurfaceProfile: face_length must be > 0");
  }

  bool planar() const { return amplitude == 0.0; }
  double wavelength() const { return face_length / oscillations; }
  double inclination_rad() const { return avg_inclination_deg * std::numbers::pi / 180.0; }

  /// Height field at coordinate x in [0, face_length].
  double eval(double x) const {
    if (x < 0.0 || x > face_length)
      throw std::domain_error("SurfaceProfile::eval: x=" + std::to_string(x) +
                              " outside [0, " + std::to_string(face_length) + "]");
    const double ramp = std::tan(inclination_rad()) * (x - 0.5 * face_length);
    if (planar()) return ramp;
    const double u = 2.0 * std::numbers::pi * oscillations * x / face_length + phase;
    return ramp + amplitude * std::sin(u);
  }

  /// Total offset range over the domain; used by the self-intersection check.
  double offset_extent() const {
    return 2.0 * amplitude + face_length * std::abs(std::tan(inclination_rad()));
  }
};

inline double eval_profile(const SurfaceProfile& p, double x) { return p.eval(x); }

/// Profile q with q(x) = p(face_length - x) for all x: the parameterization an
/// opposing face uses so that conforming pairs evaluate equal at mirrored
/// coordinates.
inline SurfaceProfile mirror_profile(const SurfaceProfile& p) {
  SurfaceProfile q = p;
  q.avg_inclination_deg = -p.avg_inclination_deg;
  q.phase = std::numbers::pi - p.phase;
  return q;
}

/// Profile scaled by -1 (crests become troughs). Encoded via a pi phase shift
/// and ramp flip so the amplitude field stays non-negative.
inline SurfaceProfile negate_profile(const SurfaceProfile& p) {
  SurfaceProfile q = p;
  q.avg_inclination_deg = -p.avg_inclination_deg;
  q.phase = p.phase + std::numbers::pi;
  return q;
}

/// Derived per-face morphology numbers; top_slope is the paper-facing
/// interlocking measure A/(lambda/4) = 4nA/l_face.
struct MorphologyMetrics {
  double wavelength = 0.0;    ///< lambda, mm
  double quarter_wave = 0.0;  ///< lambda/4, mm
  double top_slope = 0.0;     ///< s = A/(lambda/4)
  double top_angle_deg = 0.0; ///< atan(s), degrees
};

inline MorphologyMetrics morphology_metrics(const SurfaceProfile& p) {
  p.validate();
  MorphologyMetrics m;
  m.wavelength = p.wavelength();
  m.quarter_wave = 0.25 * m.wavelength;
  m.top_slope = p.amplitude == 0.0 ? 0.0 : p.amplitude / m.quarter_wave;
  m.top_angle_deg = std::atan(m.top_slope) * 180.0 / std::numbers::pi;
  return m;
}

}  // namespace tis
