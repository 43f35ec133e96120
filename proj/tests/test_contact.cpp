#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "tis/assembly.hpp"
#include "tis/contact.hpp"
#include "tis/interfaces.hpp"
#include "tis/meshing.hpp"

using namespace tis;

TEST(NormalForce, PenaltyLaw) {
  EXPECT_DOUBLE_EQ(normal_force(0.1, 1e6), 0.0);
  EXPECT_DOUBLE_EQ(normal_force(-1e-3, 1e6), 1e3);
  EXPECT_DOUBLE_EQ(normal_force(0.0, 1e6), 0.0);
  EXPECT_THROW(normal_force(0.0, 0.0), std::invalid_argument);
}

TEST(NormalForce, ContinuousAtTouch) {
  const double k = 1e6;
  EXPECT_NEAR(normal_force(-1e-12, k), 0.0, 1e-5);
}

TEST(FrictionUpdate, StickInsideCone) {
  ContactPoint state;
  state.traction = Eigen::Vector3d(10.0, 0.0, 0.0);
  const auto upd = friction_update(state, Eigen::Vector3d::Zero(), 100.0, 0.23, 1.0);
  EXPECT_EQ(upd.point.status, ContactStatus::stick);
  EXPECT_NEAR((upd.point.traction - state.traction).norm(), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(upd.dissipation, 0.0);
}

TEST(FrictionUpdate, SlipProjectsOntoCone) {
  ContactPoint state;
  state.traction = Eigen::Vector3d(30.0, 0.0, 0.0);
  const auto upd = friction_update(state, Eigen::Vector3d::Zero(), 100.0, 0.23, 1.0);
  EXPECT_EQ(upd.point.status, ContactStatus::slip);
  EXPECT_NEAR(upd.point.traction.norm(), 23.0, 1e-9);
  EXPECT_GT(upd.point.accumulated_slip, 0.0);
}

TEST(FrictionUpdate, FrictionlessAlwaysZero) {
  ContactPoint state;
  state.traction = Eigen::Vector3d(5.0, 1.0, 0.0);
  const auto upd = friction_update(state, Eigen::Vector3d(1, 1, 0), 100.0, 0.0, 1e3);
  EXPECT_NEAR(upd.point.traction.norm(), 0.0, 1e-15);
}

TEST(FrictionUpdate, NegativeNormalRejected) {
  ContactPoint state;
  EXPECT_THROW(friction_update(state, Eigen::Vector3d::Zero(), -1.0, 0.23, 1.0),
               std::invalid_argument);
}

TEST(FrictionUpdate, DissipationNonNegativeRandomized) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> mag(-0.5, 0.5);
  std::uniform_real_distribution<double> load(0.0, 200.0);
  ContactPoint state;
  const double mu = 0.23, kt = 50.0;
  double total = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Vector3d dslip(mag(rng), 0.0, mag(rng));
    const double n = load(rng);
    const auto upd = friction_update(state, dslip, n, mu, kt);
    ASSERT_GE(upd.dissipation, 0.0);
    ASSERT_LE(upd.point.traction.norm(), mu * n + 1e-9);
    ASSERT_GE(upd.point.accumulated_slip, state.accumulated_slip);
    state = upd.point;
    state.traction[1] = 0.0;  // stay in-plane
    total += upd.dissipation;
  }
  EXPECT_GT(total, 0.0);
}

TEST(GapAndFrame, SignedDistanceAndOrthonormality) {
  const Eigen::Vector3d a(0, 0, 0), b(1, 0, 0), c(0, 0, -1);  // outward normal +y
  const auto up = gap_and_frame({0.25, 0.5, -0.25}, a, b, c);
  EXPECT_NEAR(up.gap, 0.5, 1e-14);
  EXPECT_TRUE(up.inside);
  const auto down = gap_and_frame({0.25, -0.01, -0.25}, a, b, c);
  EXPECT_NEAR(down.gap, -0.01, 1e-14);
  EXPECT_NEAR(up.normal.dot(up.t1), 0.0, 1e-12);
  EXPECT_NEAR(up.normal.dot(up.t2), 0.0, 1e-12);
  EXPECT_NEAR(up.t1.dot(up.t2), 0.0, 1e-12);
  EXPECT_NEAR(up.t1.norm(), 1.0, 1e-12);
}

TEST(GapAndFrame, NodeOnPlaneIsZero) {
  const Eigen::Vector3d a(0, 0, 0), b(1, 0, 0), c(0, 0, -1);
  EXPECT_NEAR(gap_and_frame({0.3, 0.0, -0.3}, a, b, c).gap, 0.0, 1e-15);
}

TEST(GapAndFrame, DegenerateFacetRejected) {
  const Eigen::Vector3d a(0, 0, 0), b(1, 0, 0), c(2, 0, 0);
  EXPECT_THROW(gap_and_frame({0, 1, 0}, a, b, c), GeometryError);
}

TEST(IndenterContact, SphereGapGeometry) {
  Indenter ind;
  ind.radius = 4.0;
  ind.center0 = Eigen::Vector3d(0, 3.18 + 4.0, 0);
  // apex node touches at delta = 0
  const auto [g0, n0] = indenter_contact(ind, {0, 3.18, 0}, 0.0);
  EXPECT_NEAR(g0, 0.0, 1e-14);
  EXPECT_NEAR(n0.y(), -1.0, 1e-14);
  // lowering by d penetrates the apex by d
  const auto [g1, n1] = indenter_contact(ind, {0, 3.18, 0}, 0.01);
  EXPECT_NEAR(g1, -0.01, 1e-12);
  // a node far off-axis at first touch stays open
  const auto [g2, n2] = indenter_contact(ind, {4.0, 3.18, 0}, 0.0);
  EXPECT_GT(g2, 0.0);
}

TEST(Broadphase, RestStateCoversConformingPairs) {
  std::vector<Eigen::Vector3d> slaves = {{0.0, 0.5, 0.0}, {0.0, 1.5, 0.0}};
  std::vector<FacetRef> facets;
  facets.push_back({0, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  facets.push_back({1, {0, 1, 0}, {0, 2, 0}, {0, 1, 1}});
  const auto cand = broadphase(slaves, facets, 0.5);
  EXPECT_FALSE(cand[0].empty());
  EXPECT_FALSE(cand[1].empty());
}

TEST(Broadphase, DetachedNodeHasNoCandidates) {
  std::vector<Eigen::Vector3d> slaves = {{10.0, 10.0, 10.0}};
  std::vector<FacetRef> facets;
  facets.push_back({0, {0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_TRUE(broadphase(slaves, facets, 0.9)[0].empty());
}

// broadphase output must be a superset of the exact cutoff set; brute-force
// point-triangle distance is the oracle, run on a meshed mini-assembly
// interface.
TEST(Broadphase, SupersetOfBruteForceOnMiniAssembly) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.1;
  spec.oscillations = 2;
  spec.avg_inclination_deg = 0.0;
  const Assembly asmb = build_assembly(spec);
  std::vector<TetMesh> meshes;
  for (const auto& b : asmb.blocks) meshes.push_back(mesh_block(b.solid(), 2));
  const auto sc = extract_contact_surfaces(meshes, asmb);
  const auto& surf = sc.interfaces.front();
  const TetMesh& sm = meshes[surf.slave_block];
  const TetMesh& mm = meshes[surf.master_block];

  std::vector<Eigen::Vector3d> slaves;
  for (int v : surf.slave_nodes) slaves.push_back(sm.nodes[v]);
  std::vector<FacetRef> facets;
  for (int fi : surf.master_facets) {
    const auto& f = mm.boundary[fi];
    facets.push_back({fi, mm.nodes[f.n[0]], mm.nodes[f.n[1]], mm.nodes[f.n[2]]});
  }
  const double cutoff = 2.0 * spec.amplitude + spec.height / 10.0;
  const auto cand = broadphase(slaves, facets, cutoff);
  for (size_t s = 0; s < slaves.size(); ++s) {
    for (size_t f = 0; f < facets.size(); ++f) {
      const auto proj = project_to_triangle(slaves[s], facets[f].a, facets[f].b, facets[f].c);
      if (proj.distance <= cutoff) {
        const bool found =
            std::find(cand[s].begin(), cand[s].end(), static_cast<int>(f)) != cand[s].end();
        ASSERT_TRUE(found) << "missing pair node " << s << " facet " << f;
      }
    }
  }
}

TEST(RigidPlaneContact, GapSign) {
  RigidPlane plane;
  plane.point = Eigen::Vector3d::Zero();
  plane.normal = Eigen::Vector3d::UnitY();
  EXPECT_GT(plane.gap({0, 0.5, 0}), 0.0);
  EXPECT_LT(plane.gap({0, -0.01, 0}), 0.0);
}
