#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "tis/errors.hpp"
#include "tis/meshing.hpp"

namespace tis {

using Matrix12d = Eigen::Matrix<double, 12, 12>;
using Vector12d = Eigen::Matrix<double, 12, 1>;
using Matrix6x12d = Eigen::Matrix<double, 6, 12>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Isotropic linear-elastic material, mm/N/MPa units.
struct Material {
  double youngs_mpa = 18700.0;
  double poisson = 0.2;

  void validate() const {
    if (!(youngs_mpa > 0.0)) throw std::invalid_argument("Material: E must be > 0");
    if (!(poisson >= 0.0 && poisson < 0.5))
      throw std::invalid_argument("Material: nu must be in [0, 0.5)");
  }
  double lame_lambda() const {
    return youngs_mpa * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  }
  double lame_mu() const { return youngs_mpa / (2.0 * (1.0 + poisson)); }

  /// Voigt elasticity (xx, yy, zz, xy, yz, zx; engineering shear).
  Matrix6d elasticity() const {
    const double la = lame_lambda(), mu = lame_mu();
    Matrix6d c = Matrix6d::Zero();
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) c(i, j) = la;
      c(i, i) = la + 2.0 * mu;
      c(3 + i, 3 + i) = mu;
    }
    return c;
  }
};

/// One first-order tetrahedron with cached rest kinematics and the
/// small-strain stiffness; corotation supplies large-rotation handling.
struct Element {
  std::array<int, 4> nodes{};
  Eigen::Matrix<double, 3, 4> rest;
  Eigen::Matrix3d dm_inv;
  double volume0 = 0.0;
  Matrix6x12d strain_op;  ///< B
  Matrix12d stiffness;    ///< Ke = V * B^T C B
};

inline Element make_element(const std::array<int, 4>& nodes,
                            const Eigen::Matrix<double, 3, 4>& rest, const Material& mat) {
  Element el;
  el.nodes = nodes;
  el.rest = rest;
  Eigen::Matrix3d dm;
  for (int j = 0; j < 3; ++j) dm.col(j) = rest.col(j + 1) - rest.col(0);
  const double det = dm.determinant();
  if (!(det > 0.0)) throw GeometryError("make_element: non-positive element volume");
  el.volume0 = det / 6.0;
  el.dm_inv = dm.inverse();

  Eigen::Matrix<double, 3, 4> g;  // shape gradients, one column per node
  for (int i = 0; i < 3; ++i) g.col(i + 1) = el.dm_inv.row(i).transpose();
  g.col(0) = -(g.col(1) + g.col(2) + g.col(3));

  el.strain_op.setZero();
  for (int a = 0; a < 4; ++a) {
    const double gx = g(0, a), gy = g(1, a), gz = g(2, a);
    const int c = 3 * a;
    el.strain_op(0, c + 0) = gx;
    el.strain_op(1, c + 1) = gy;
    el.strain_op(2, c + 2) = gz;
    el.strain_op(3, c + 0) = gy;
    el.strain_op(3, c + 1) = gx;
    el.strain_op(4, c + 1) = gz;
    el.strain_op(4, c + 2) = gy;
    el.strain_op(5, c + 0) = gz;
    el.strain_op(5, c + 2) = gx;
  }
  el.stiffness = el.volume0 * el.strain_op.transpose() * mat.elasticity() * el.strain_op;
  return el;
}

/// Rotation of the element's current affine map, via polar decomposition.
/// ok = false signals an inverted element (solver cutback, not an exception).
struct ElementRotation {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  bool ok = true;
};

inline ElementRotation element_rotation(const Element& el,
                                        const Eigen::Matrix<double, 3, 4>& current) {
  Eigen::Matrix3d ds;
  for (int j = 0; j < 3; ++j) ds.col(j) = current.col(j + 1) - current.col(0);
  const Eigen::Matrix3d a = ds * el.dm_inv;
  ElementRotation out;
  if (!(a.determinant() > 0.0)) {
    out.ok = false;
    return out;
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  out.R = u * v.transpose();
  return out;
}

/// Corotated nodal displacement d = R^T x - X, stacked 12-vector.
inline Vector12d corotated_displacement(const Element& el,
                                        const Eigen::Matrix<double, 3, 4>& current,
                                        const Eigen::Matrix3d& R) {
  Vector12d d;
  for (int a = 0; a < 4; ++a)
    d.segment<3>(3 * a) = R.transpose() * current.col(a) - el.rest.col(a);
  return d;
}

/// Internal nodal forces f = R Ke (R^T x - X).
inline Vector12d element_internal_force(const Element& el,
                                        const Eigen::Matrix<double, 3, 4>& current,
                                        const Eigen::Matrix3d& R) {
  const Vector12d f_loc = el.stiffness * corotated_displacement(el, current, R);
  Vector12d f;
  for (int a = 0; a < 4; ++a) f.segment<3>(3 * a) = R * f_loc.segment<3>(3 * a);
  return f;
}

/// Corotated tangent R Ke R^T (rotation-derivative terms dropped).
inline Matrix12d element_stiffness(const Element& el, const Eigen::Matrix3d& R) {
  Matrix12d k;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      k.block<3, 3>(3 * a, 3 * b) = R * el.stiffness.block<3, 3>(3 * a, 3 * b) * R.transpose();
  return k;
}

inline double element_strain_energy(const Element& el, const Eigen::Matrix<double, 3, 4>& current,
                                    const Eigen::Matrix3d& R) {
  const Vector12d d = corotated_displacement(el, current, R);
  return 0.5 * d.dot(el.stiffness * d);
}

/// Cauchy stress tensor in the corotated frame (constant per element).
inline Eigen::Matrix3d element_stress(const Element& el, const Material& mat,
                                      const Eigen::Matrix<double, 3, 4>& current,
                                      const Eigen::Matrix3d& R) {
  const Vector6d eps = el.strain_op * corotated_displacement(el, current, R);
  const Vector6d s = mat.elasticity() * eps;
  Eigen::Matrix3d sig;
  sig << s[0], s[3], s[5],
         s[3], s[1], s[4],
         s[5], s[4], s[2];
  return sig;
}

/// Single-mesh FEM wrapper used by the module-level operations and tests.
/// Displacements are a flat 3N vector in node order.
struct FemMesh {
  Material material;
  std::vector<Element> elements;
  int num_nodes = 0;

  static FemMesh build(const TetMesh& mesh, const Material& mat) {
    mat.validate();
    FemMesh fm;
    fm.material = mat;
    fm.num_nodes = static_cast<int>(mesh.nodes.size());
    fm.elements.reserve(mesh.tets.size());
    for (const auto& t : mesh.tets) {
      Eigen::Matrix<double, 3, 4> rest;
      for (int a = 0; a < 4; ++a) rest.col(a) = mesh.nodes[t[a]];
      fm.elements.push_back(make_element(t, rest, mat));
    }
    return fm;
  }

  Eigen::Matrix<double, 3, 4> current_coords(const Element& el,
                                             const Eigen::VectorXd& u) const {
    Eigen::Matrix<double, 3, 4> cur;
    for (int a = 0; a < 4; ++a)
      cur.col(a) = el.rest.col(a) + u.segment<3>(3 * el.nodes[a]);
    return cur;
  }

  /// Assembled corotational internal force; ok=false on element inversion.
  Eigen::VectorXd internal_force(const Eigen::VectorXd& u, bool* ok = nullptr) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(3 * num_nodes);
    bool fine = true;
    for (const auto& el : elements) {
      const auto cur = current_coords(el, u);
      const auto rot = element_rotation(el, cur);
      if (!rot.ok) {
        fine = false;
        continue;
      }
      const Vector12d fe = element_internal_force(el, cur, rot.R);
      for (int a = 0; a < 4; ++a) f.segment<3>(3 * el.nodes[a]) += fe.segment<3>(3 * a);
    }
    if (ok) *ok = fine;
    return f;
  }

  double strain_energy(const Eigen::VectorXd& u) const {
    double e = 0.0;
    for (const auto& el : elements) {
      const auto cur = current_coords(el, u);
      const auto rot = element_rotation(el, cur);
      if (!rot.ok) continue;
      e += element_strain_energy(el, cur, rot.R);
    }
    return e;
  }

  /// Per-element principal stresses, eigenvalues sorted ascending.
  std::vector<Eigen::Vector3d> recover_stress(const Eigen::VectorXd& u) const {
    std::vector<Eigen::Vector3d> out;
    out.reserve(elements.size());
    for (const auto& el : elements) {
      const auto cur = current_coords(el, u);
      const auto rot = element_rotation(el, cur);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(
          element_stress(el, material, cur, rot.R));
      out.push_back(eig.eigenvalues());
    }
    return out;
  }
};

}  // namespace tis
