#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "tis/assembly.hpp"
#include "tis/interfaces.hpp"
#include "tis/meshing.hpp"

using namespace tis;

namespace {
constexpr double kPi = std::numbers::pi;

BlockSolid unit_cube() {
  const BlockSpec spec = make_block_spec(1.0, 1.0, 0.0, 1, 0.0, 0.0);
  return build_block_solid(spec);
}
}  // namespace

TEST(MeshBlock, UnitCubeDensityOneSplitsToSixTets) {
  const TetMesh mesh = mesh_block(unit_cube(), 1);
  EXPECT_EQ(mesh.tets.size(), 6u);
  EXPECT_NEAR(mesh.total_volume(), 1.0, 1e-12);
  EXPECT_EQ(mesh.boundary.size(), 12u);
}

TEST(MeshBlock, PlanarBlockVolumeMatchesSolid) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.0, 1, 5.0, 0.0);
  const BlockSolid solid = build_block_solid(spec);
  const TetMesh mesh = mesh_block(solid, 4);
  EXPECT_NEAR(mesh.total_volume() / solid.volume(), 1.0, 1e-9);
}

TEST(MeshBlock, WavyBlockNoInvertedTets) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.25, 3, 0.0, 0.5 * kPi);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 4);
  for (size_t t = 0; t < mesh.tets.size(); ++t) ASSERT_GT(mesh.tet_volume(t), 0.0);
  const auto q = mesh_quality(mesh);
  EXPECT_GT(q.min_scaled_jacobian, 0.0);
}

// Piecewise-linear faces chord the sinusoid, so the mesh volume converges to
// the solid volume as the vertical resolution grows; at the default 8
// segments per wavelength the defect is already below 1e-3 and refinement
// shrinks it quadratically.
TEST(MeshBlock, WavyVolumeConvergesQuadratically) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.25, 3, 0.0, 0.5 * kPi);
  const BlockSolid solid = build_block_solid(spec);
  const double exact = solid.volume();
  const double err1 = std::abs(mesh_block(solid, 4, 24).total_volume() - exact) / exact;
  const double err2 = std::abs(mesh_block(solid, 4, 96).total_volume() - exact) / exact;
  EXPECT_LT(err2, err1 / 8.0);
  EXPECT_LT(err2, 1e-4);
}

TEST(MeshBlock, ExactVolumeConservationForPlanarFaces) {
  // planar faces are chord-exact: sum of tets equals the solid volume
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.0, 1, 5.0, 0.0);
  const BlockSolid solid = build_block_solid(spec);
  for (int density : {2, 4, 8})
    EXPECT_NEAR(mesh_block(solid, density).total_volume() / solid.volume(), 1.0, 1e-12);
}

TEST(MeshBlock, ResolutionRuleWarnsBelowEightPerWavelength) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.1, 3, 0.0, 0.5 * kPi);
  const TetMesh coarse = mesh_block(build_block_solid(spec), 4, 12);  // 4 per wavelength
  EXPECT_FALSE(coarse.warnings.empty());
  const TetMesh fine = mesh_block(build_block_solid(spec), 4);  // auto: 8 per wavelength
  EXPECT_TRUE(fine.warnings.empty());
  EXPECT_EQ(fine.ny, 24);
}

TEST(MeshBlock, DeterministicNodeOrdering) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.15, 2, 5.0, 0.5 * kPi);
  const TetMesh a = mesh_block(build_block_solid(spec), 3);
  const TetMesh b = mesh_block(build_block_solid(spec), 3);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].x(), b.nodes[i].x());
    EXPECT_EQ(a.nodes[i].y(), b.nodes[i].y());
    EXPECT_EQ(a.nodes[i].z(), b.nodes[i].z());
  }
  ASSERT_EQ(a.tets.size(), b.tets.size());
  for (size_t i = 0; i < a.tets.size(); ++i) EXPECT_EQ(a.tets[i], b.tets[i]);
}

TEST(MeshBlock, BoundaryIsClosedManifold) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.2, 2, 0.0, 0.5 * kPi);
  const TetMesh mesh = mesh_block(build_block_solid(spec), 3);
  // closed surface: every boundary edge shared by exactly two boundary facets
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& f : mesh.boundary)
    for (int e = 0; e < 3; ++e) {
      int a = f.n[e], b = f.n[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  for (const auto& [edge, count] : edge_count) EXPECT_EQ(count, 2);
  // and the facet-divergence closes: sum of area-weighted normals ~ 0
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (const auto& f : mesh.boundary) s += mesh.facet_area(f) * mesh.facet_normal(f);
  EXPECT_LT(s.norm(), 1e-10);
}

TEST(MeshQuality, RegularHexSplitAboveFloor) {
  const TetMesh mesh = mesh_block(unit_cube(), 1);
  const auto q = mesh_quality(mesh);
  EXPECT_GT(q.min_scaled_jacobian, 0.2);
  EXPECT_LE(q.min_scaled_jacobian, q.mean_scaled_jacobian);
}

TEST(MeshQuality, PlantedDegenerateTetFlagged) {
  TetMesh mesh = mesh_block(unit_cube(), 1);
  // squash one tet: move its apex into the base plane
  auto& t = mesh.tets[3];
  mesh.nodes.push_back(mesh.nodes[t[0]] * (1.0 / 3) + mesh.nodes[t[1]] * (1.0 / 3) +
                       mesh.nodes[t[2]] * (1.0 / 3));
  t[3] = static_cast<int>(mesh.nodes.size()) - 1;
  const auto q = mesh_quality(mesh);
  EXPECT_EQ(q.worst_element, 3);
  EXPECT_NEAR(q.min_scaled_jacobian, 0.0, 1e-12);
}

TEST(MeshQuality, EmptyMeshRejected) {
  TetMesh mesh;
  EXPECT_THROW(mesh_quality(mesh), MeshError);
}

TEST(ContactSurfaces, CentralBlockHasFourInterfaces) {
  AssemblySpec spec;
  spec.grid = 5;
  spec.amplitude = 0.0;
  spec.avg_inclination_deg = 5.0;
  const Assembly asmb = build_assembly(spec);
  std::vector<TetMesh> meshes;
  for (const auto& b : asmb.blocks) meshes.push_back(mesh_block(b.solid(), 2));
  const auto sc = extract_contact_surfaces(meshes, asmb);
  int central = 0;
  for (const auto& s : sc.interfaces)
    if (s.slave_block == asmb.central_id || s.master_block == asmb.central_id) ++central;
  EXPECT_EQ(central, 4);
  EXPECT_FALSE(sc.indenter_nodes.empty());
  EXPECT_EQ(sc.sym_plane_count(), 0);
}

TEST(ContactSurfaces, QuarterModelHasTwoSymmetryPlanes) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.0;
  spec.avg_inclination_deg = 5.0;
  spec.phase = 0.0;
  const auto qm = quarter_model(build_assembly(spec));
  std::vector<TetMesh> meshes;
  for (const auto& b : qm.assembly.blocks) meshes.push_back(mesh_block(b.solid(), 2));
  const auto sc = extract_contact_surfaces(meshes, qm.assembly);
  EXPECT_EQ(sc.sym_plane_count(), 2);
}

TEST(ContactSurfaces, RestGapBelowTolerance) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.15;
  spec.oscillations = 3;
  spec.avg_inclination_deg = 0.0;
  const Assembly asmb = build_assembly(spec);
  std::vector<TetMesh> meshes;
  for (const auto& b : asmb.blocks) meshes.push_back(mesh_block(b.solid(), 3));
  const auto sc = extract_contact_surfaces(meshes, asmb);
  EXPECT_LT(max_rest_gap(meshes, sc), 1e-9);
}
