#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "tis/errors.hpp"
#include "tis/tri_geometry.hpp"

namespace tis {

enum class ContactStatus { open, stick, slip };

inline const char* to_string(ContactStatus s) {
  switch (s) {
    case ContactStatus::open: return "open";
    case ContactStatus::stick: return "stick";
    case ContactStatus::slip: return "slip";
  }
  return "?";
}

/// Persistent per-point contact record. T is the tangential traction vector
/// carried across increments (stick-slip path dependence).
struct ContactPoint {
  int slave_node = -1;
  int master_facet = -1;
  double gap = 0.0;  ///< mm, negative = penetration
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
  Eigen::Vector3d traction = Eigen::Vector3d::Zero();  ///< T
  double accumulated_slip = 0.0;                       ///< mm
  ContactStatus status = ContactStatus::open;
};

/// Penalty normal law N = kappa * max(-g, 0).
inline double normal_force(double gap, double kappa_n) {
  if (!(kappa_n > 0.0)) throw std::invalid_argument("normal_force: kappa_n must be > 0");
  return kappa_n * std::max(-gap, 0.0);
}

struct ContactFrame {
  double gap = 0.0;
  Eigen::Vector3d normal;
  Eigen::Vector3d t1, t2;
  Eigen::Vector3d bary;  ///< clamped barycentric coords of the projection
  bool inside = false;
};

/// Signed node-to-facet distance along the facet normal plus an orthonormal
/// frame; the projection is clipped to the facet footprint.
inline ContactFrame gap_and_frame(const Eigen::Vector3d& node, const Eigen::Vector3d& a,
                                  const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                                  double inside_tol = 1e-6) {
  const Eigen::Vector3d cr = (b - a).cross(c - a);
  const double nrm = cr.norm();
  const double scale = std::max({(b - a).norm(), (c - a).norm(), 1e-30});
  if (nrm < 1e-12 * scale * scale) throw GeometryError("gap_and_frame: degenerate facet");
  ContactFrame f;
  f.normal = cr / nrm;
  const auto proj = project_to_triangle(node, a, b, c, inside_tol);
  f.inside = proj.inside;
  f.bary = proj.bary;
  f.gap = f.normal.dot(node - a);
  const Eigen::Vector3d seed =
      std::abs(f.normal.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  f.t1 = (seed - seed.dot(f.normal) * f.normal).normalized();
  f.t2 = f.normal.cross(f.t1);
  return f;
}

struct FrictionUpdate {
  ContactPoint point;
  double dissipation = 0.0;  ///< N*mm, plastic work this update
};

/// Elastic-predictor / return-map Coulomb update. The trial traction is the
/// stored traction plus kappa_t * slip increment; slip caps it on the cone
/// and books the plastic remainder into accumulated slip.
inline FrictionUpdate friction_update(const ContactPoint& state, const Eigen::Vector3d& dslip,
                                      double normal_n, double mu, double kappa_t) {
  if (normal_n < 0.0) throw std::invalid_argument("friction_update: N must be >= 0");
  FrictionUpdate out;
  out.point = state;
  if (normal_n == 0.0 || mu < 0.0) {
    out.point.traction.setZero();
    out.point.status = ContactStatus::open;
    return out;
  }
  const Eigen::Vector3d trial = state.traction + kappa_t * dslip;
  const double tn = trial.norm();
  const double cap = mu * normal_n;
  if (tn <= cap) {
    out.point.traction = trial;
    out.point.status = ContactStatus::stick;
  } else {
    const Eigen::Vector3d dir = trial / tn;
    out.point.traction = cap * dir;
    const double plastic = (tn - cap) / kappa_t;
    out.point.accumulated_slip += plastic;
    out.point.status = ContactStatus::slip;
    out.dissipation = cap * plastic;
  }
  return out;
}

/// Rigid spherical indenter driven down the -y axis by a prescribed delta.
struct Indenter {
  double radius = 4.0;                        ///< mm
  Eigen::Vector3d center0 = {0.0, 0.0, 0.0};  ///< center at delta = 0
  double mu = 0.0;                            ///< frictionless by default

  Eigen::Vector3d center(double delta) const {
    return center0 - Eigen::Vector3d(0.0, delta, 0.0);
  }
};

/// Gap and outward (radial) normal of a node against the indenter sphere.
inline std::pair<double, Eigen::Vector3d> indenter_contact(const Indenter& ind,
                                                           const Eigen::Vector3d& node,
                                                           double delta) {
  const Eigen::Vector3d r = node - ind.center(delta);
  const double d = r.norm();
  if (d < 1e-12 * ind.radius) return {-ind.radius, -Eigen::Vector3d::UnitY()};
  return {d - ind.radius, r / d};
}

/// Frictional rigid half-space: gap = n . (p - p0), n pointing at the body.
struct RigidPlane {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
  double mu = 0.0;

  double gap(const Eigen::Vector3d& p) const { return normal.dot(p - point); }
};

struct FacetRef {
  int id = -1;
  Eigen::Vector3d a, b, c;
};

/// Candidate master facets per slave point: every facet whose inflated AABB
/// contains the point. Deterministic ordering (facet sequence).
inline std::vector<std::vector<int>> broadphase(const std::vector<Eigen::Vector3d>& slave_points,
                                                const std::vector<FacetRef>& facets,
                                                double cutoff) {
  std::vector<std::vector<int>> out(slave_points.size());
  std::vector<Eigen::Vector3d> lo(facets.size()), hi(facets.size());
  for (size_t f = 0; f < facets.size(); ++f) {
    lo[f] = facets[f].a.cwiseMin(facets[f].b).cwiseMin(facets[f].c).array() - cutoff;
    hi[f] = facets[f].a.cwiseMax(facets[f].b).cwiseMax(facets[f].c).array() + cutoff;
  }
  for (size_t s = 0; s < slave_points.size(); ++s) {
    const Eigen::Vector3d& p = slave_points[s];
    for (size_t f = 0; f < facets.size(); ++f)
      if ((p.array() >= lo[f].array()).all() && (p.array() <= hi[f].array()).all())
        out[s].push_back(static_cast<int>(f));
  }
  return out;
}

/// Per-interface resultants and stick/slip census for one converged state.
struct InterfaceResultant {
  int interface_id = -1;
  double normal_sum = 0.0;      ///< sum of point normal force magnitudes, N
  double tangential_sum = 0.0;  ///< sum of point |T|, N
  int stick = 0, slip = 0, open = 0;
};

/// One exportable stick/slip map record.
struct StickSlipRecord {
  int point_id = -1;
  int block_a = -1, block_b = -1;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  ContactStatus status = ContactStatus::open;
  double normal = 0.0;
  double tangential = 0.0;
};

struct ContactSummary {
  std::vector<InterfaceResultant> interfaces;
  std::vector<StickSlipRecord> points;
  double indenter_force_y = 0.0;  ///< vertical indenter reaction, N
};

}  // namespace tis
