#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "tis/fem.hpp"
#include "tis/meshing.hpp"

using namespace tis;

namespace {

Element reference_tet(const Material& mat) {
  Eigen::Matrix<double, 3, 4> rest;
  rest.col(0) << 0, 0, 0;
  rest.col(1) << 1, 0, 0;
  rest.col(2) << 0, 1, 0;
  rest.col(3) << 0, 0, 1;
  return make_element({0, 1, 2, 3}, rest, mat);
}

Eigen::Matrix3d rotation(double angle_deg, const Eigen::Vector3d& axis) {
  return Eigen::AngleAxisd(angle_deg * std::numbers::pi / 180.0, axis.normalized())
      .toRotationMatrix();
}

}  // namespace

TEST(Element, StiffnessSymmetric) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  const Matrix12d k = el.stiffness;
  EXPECT_LT((k - k.transpose()).norm(), 1e-12 * k.norm());
}

TEST(Element, SixZeroEnergyModes) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  Eigen::SelfAdjointEigenSolver<Matrix12d> eig(el.stiffness);
  const auto& ev = eig.eigenvalues();
  const double scale = ev[11];
  for (int i = 0; i < 6; ++i) EXPECT_LT(std::abs(ev[i]), 1e-10 * scale);
  for (int i = 6; i < 12; ++i) EXPECT_GT(ev[i], 1e-6 * scale);
}

TEST(Element, InvertedElementRejected) {
  const Material mat{18700.0, 0.2};
  Eigen::Matrix<double, 3, 4> rest;
  rest.col(0) << 0, 0, 0;
  rest.col(1) << 0, 1, 0;  // swapped: negative volume
  rest.col(2) << 1, 0, 0;
  rest.col(3) << 0, 0, 1;
  EXPECT_THROW(make_element({0, 1, 2, 3}, rest, mat), GeometryError);
}

TEST(Element, UniaxialPatchStressExact) {
  const Material mat{18700.0, 0.0};  // nu = 0 for a clean uniaxial field
  const Element el = reference_tet(mat);
  const double strain = 1e-3;
  Eigen::Matrix<double, 3, 4> cur = el.rest;
  for (int a = 0; a < 4; ++a) cur(1, a) *= (1.0 - strain);  // compression along y
  const auto rot = element_rotation(el, cur);
  const Eigen::Matrix3d sig = element_stress(el, mat, cur, rot.R);
  EXPECT_NEAR(sig(1, 1), -mat.youngs_mpa * strain, 1e-8 * mat.youngs_mpa * strain);
  EXPECT_NEAR(sig(0, 0), 0.0, 1e-10 * mat.youngs_mpa);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sig);
  EXPECT_NEAR(eig.eigenvalues()[0], -mat.youngs_mpa * strain,
              1e-8 * mat.youngs_mpa * strain);
}

TEST(Element, RigidRotationGivesZeroForce) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  const Eigen::Matrix3d q = rotation(30.0, {0.3, 1.0, 0.2});
  Eigen::Matrix<double, 3, 4> cur;
  for (int a = 0; a < 4; ++a) cur.col(a) = q * el.rest.col(a) + Eigen::Vector3d(0.1, -0.2, 0.05);
  const auto rot = element_rotation(el, cur);
  EXPECT_TRUE(rot.ok);
  EXPECT_LT((rot.R - q).norm(), 1e-12);
  const Vector12d f = element_internal_force(el, cur, rot.R);
  EXPECT_LT(f.norm(), 1e-8 * mat.youngs_mpa);
}

TEST(Element, RotationIsProperOrthogonal) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  Eigen::Matrix<double, 3, 4> cur = el.rest;
  cur.col(1) += Eigen::Vector3d(0.05, 0.02, -0.01);
  cur.col(3) += Eigen::Vector3d(-0.01, 0.03, 0.04);
  const auto rot = element_rotation(el, cur);
  EXPECT_NEAR(rot.R.determinant(), 1.0, 1e-9);
  EXPECT_LT((rot.R * rot.R.transpose() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
}

// FD tangent check at stress-free states: the corotational approximation
// R Ke R^T is consistent there (rotation-derivative terms multiply zero
// strain).
TEST(Element, TangentMatchesFiniteDifferenceAtRest) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  const double eps = 1e-7;  // 1e-7 * h with h = 1
  for (const auto& state : {rotation(0.0, {0, 1, 0}), rotation(25.0, {1, 0.4, 0.2})}) {
    Eigen::Matrix<double, 3, 4> base;
    for (int a = 0; a < 4; ++a) base.col(a) = state * el.rest.col(a);
    const auto rot0 = element_rotation(el, base);
    const Matrix12d k_analytic = element_stiffness(el, rot0.R);
    Matrix12d k_fd;
    for (int d = 0; d < 12; ++d) {
      Eigen::Matrix<double, 3, 4> plus = base, minus = base;
      plus(d % 3, d / 3) += eps;
      minus(d % 3, d / 3) -= eps;
      const Vector12d fp = element_internal_force(el, plus, element_rotation(el, plus).R);
      const Vector12d fm = element_internal_force(el, minus, element_rotation(el, minus).R);
      k_fd.col(d) = (fp - fm) / (2.0 * eps);
    }
    EXPECT_LT((k_fd - k_analytic).norm() / k_analytic.norm(), 1e-5);
  }
}

TEST(Element, ObjectivityUnderSuperposedRotation) {
  const Material mat{18700.0, 0.2};
  const Element el = reference_tet(mat);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-0.02, 0.02);
  Eigen::Matrix<double, 3, 4> cur = el.rest;
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 3; ++i) cur(i, a) += dist(rng);
  const Vector12d f0 = element_internal_force(el, cur, element_rotation(el, cur).R);
  const Eigen::Matrix3d q = rotation(40.0, {0.2, 0.5, 1.0});
  Eigen::Matrix<double, 3, 4> rotated;
  for (int a = 0; a < 4; ++a) rotated.col(a) = q * cur.col(a);
  const Vector12d f1 =
      element_internal_force(el, rotated, element_rotation(el, rotated).R);
  for (int a = 0; a < 4; ++a)
    EXPECT_NEAR(f1.segment<3>(3 * a).norm(), f0.segment<3>(3 * a).norm(),
                1e-6 * (f0.norm() + 1e-30));
}

TEST(FemMesh, ZeroDisplacementZeroForce) {
  const BlockSpec spec = make_block_spec(1.0, 1.0, 0.0, 1, 0.0, 0.0);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 2);
  const FemMesh fem = FemMesh::build(mesh, Material{18700.0, 0.2});
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * mesh.nodes.size());
  EXPECT_DOUBLE_EQ(fem.internal_force(u).norm(), 0.0);
  EXPECT_DOUBLE_EQ(fem.strain_energy(u), 0.0);
}

TEST(FemMesh, RigidTranslationInvariance) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.0, 1, 0.0, 0.0);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 2);
  const Material mat{18700.0, 0.2};
  const FemMesh fem = FemMesh::build(mesh, mat);
  Eigen::VectorXd u(3 * mesh.nodes.size());
  for (size_t n = 0; n < mesh.nodes.size(); ++n) u.segment<3>(3 * n) << 0.3, -0.1, 0.2;
  EXPECT_LT(fem.internal_force(u).norm(), 1e-10 * mat.youngs_mpa * 3.18 * 3.18);
}

TEST(FemMesh, UniformStrainPatchTest) {
  // linear displacement field reproduced exactly on a box of tets
  const BlockSpec spec = make_block_spec(2.0, 1.0, 0.0, 1, 0.0, 0.0);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 2);
  const Material mat{1000.0, 0.25};
  const FemMesh fem = FemMesh::build(mesh, mat);
  Eigen::Matrix3d grad;
  grad << 1e-3, 2e-4, -1e-4,
          3e-4, -5e-4, 1e-4,
          -2e-4, 4e-4, 6e-4;
  const Eigen::Matrix3d strain = 0.5 * (grad + grad.transpose());
  Eigen::VectorXd u(3 * mesh.nodes.size());
  for (size_t n = 0; n < mesh.nodes.size(); ++n) u.segment<3>(3 * n) = grad * mesh.nodes[n];

  // constant stress everywhere, matching Hooke's law
  const double la = mat.lame_lambda(), mu = mat.lame_mu();
  const Eigen::Matrix3d sigma_exact =
      la * strain.trace() * Eigen::Matrix3d::Identity() + 2.0 * mu * strain;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> exact(sigma_exact);
  const auto principal = fem.recover_stress(u);
  for (const auto& p : principal)
    for (int i = 0; i < 3; ++i) ASSERT_NEAR(p[i], exact.eigenvalues()[i], 1e-9 * mat.youngs_mpa);

  // interior nodes in equilibrium
  const Eigen::VectorXd f = fem.internal_force(u);
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    const auto& g = mesh.grid_coord[n];
    const bool interior = g[0] > 0 && g[0] < mesh.nx && g[1] > 0 && g[1] < mesh.nz &&
                          g[2] > 0 && g[2] < mesh.ny;
    if (interior) EXPECT_LT(f.segment<3>(3 * n).norm(), 1e-10 * mat.youngs_mpa);
  }
}

TEST(FemMesh, StrainEnergyMatchesAnalyticCompression) {
  const double l = 2.0, h = 1.0, strain = 1e-3;
  const BlockSpec spec = make_block_spec(l, h, 0.0, 1, 0.0, 0.0);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 2);
  const Material mat{1000.0, 0.0};
  const FemMesh fem = FemMesh::build(mesh, mat);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3 * mesh.nodes.size());
  for (size_t n = 0; n < mesh.nodes.size(); ++n) u[3 * n + 1] = -strain * mesh.nodes[n].y();
  const double expected = 0.5 * mat.youngs_mpa * strain * strain * (l * l * h);
  EXPECT_NEAR(fem.strain_energy(u) / expected, 1.0, 1e-9);
}

TEST(FemMesh, HydrostaticStateHasEqualPrincipals) {
  const BlockSpec spec = make_block_spec(1.0, 1.0, 0.0, 1, 0.0, 0.0);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 1);
  const Material mat{1000.0, 0.3};
  const FemMesh fem = FemMesh::build(mesh, mat);
  Eigen::VectorXd u(3 * mesh.nodes.size());
  const double eps = -1e-3;
  for (size_t n = 0; n < mesh.nodes.size(); ++n) u.segment<3>(3 * n) = eps * mesh.nodes[n];
  for (const auto& p : fem.recover_stress(u)) {
    EXPECT_NEAR(p[0], p[2], 1e-9 * mat.youngs_mpa);
    EXPECT_LT(p[0], 0.0);
  }
}
