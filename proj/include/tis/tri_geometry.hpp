#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "tis/errors.hpp"

namespace tis {

/// Closest point on triangle (a,b,c) to p, with clamped barycentric coords.
struct TriProjection {
  Eigen::Vector3d point;
  Eigen::Vector3d bary;
  bool inside = false;   ///< projection fell inside before clamping
  double distance = 0.0; ///< |p - point|
};

inline TriProjection project_to_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                         const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                                         double inside_tol = 1e-12) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d00 = ab.dot(ab), d01 = ab.dot(ac), d11 = ac.dot(ac);
  const double d20 = ap.dot(ab), d21 = ap.dot(ac);
  const double denom = d00 * d11 - d01 * d01;
  if (!(denom > 0.0)) throw GeometryError("degenerate facet in projection");
  double v = (d11 * d20 - d01 * d21) / denom;
  double w = (d00 * d21 - d01 * d20) / denom;
  TriProjection out;
  out.inside = v >= -inside_tol && w >= -inside_tol && v + w <= 1.0 + inside_tol;

  // clamp to the triangle (Ericson-style region walk, simplified)
  if (!out.inside) {
    v = std::max(0.0, v);
    w = std::max(0.0, w);
    const double s = v + w;
    if (s > 1.0) {
      v /= s;
      w /= s;
    }
    // refine on the nearest edge for accuracy
    auto clamp01 = [](double t) { return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t); };
    const Eigen::Vector3d q0 = a + v * ab + w * ac;
    double best = (p - q0).squaredNorm();
    Eigen::Vector3d bv(1.0 - v - w, v, w), bbest = bv;
    const Eigen::Vector3d verts[3] = {a, b, c};
    for (int e = 0; e < 3; ++e) {
      const Eigen::Vector3d &u = verts[e], &r = verts[(e + 1) % 3];
      const double t = clamp01((p - u).dot(r - u) / (r - u).squaredNorm());
      const Eigen::Vector3d q = u + t * (r - u);
      const double d2 = (p - q).squaredNorm();
      if (d2 < best) {
        best = d2;
        Eigen::Vector3d bb(0, 0, 0);
        bb[e] = 1.0 - t;
        bb[(e + 1) % 3] = t;
        bbest = bb;
      }
    }
    bv = bbest;
    out.bary = bv;
  } else {
    out.bary = Eigen::Vector3d(1.0 - v - w, v, w);
  }
  out.point = out.bary[0] * a + out.bary[1] * b + out.bary[2] * c;
  out.distance = (p - out.point).norm();
  return out;
}

}  // namespace tis
