#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "tis/assembly.hpp"
#include "tis/block.hpp"
#include "tis/surface_profile.hpp"

using namespace tis;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(SurfaceProfile, PlanarZeroInclinationIsZeroEverywhere) {
  SurfaceProfile p{0.0, 1, 0.0, 0.0, 8.33};
  for (double x : {0.0, 1.0, 4.165, 8.33}) EXPECT_DOUBLE_EQ(eval_profile(p, x), 0.0);
}

TEST(SurfaceProfile, PlanarRampPivotsAtMidFace) {
  SurfaceProfile p{0.0, 1, 5.0, 0.0, 8.33};
  EXPECT_NEAR(eval_profile(p, 8.33 / 2.0), 0.0, 1e-15);
  // antisymmetric about the pivot
  EXPECT_NEAR(eval_profile(p, 8.33), -eval_profile(p, 0.0), 1e-15);
  EXPECT_NEAR(eval_profile(p, 8.33), std::tan(5.0 * kPi / 180.0) * 8.33 / 2.0, 1e-12);
}

TEST(SurfaceProfile, SineQuarterPeriodHitsAmplitude) {
  // sin(2*pi*3*0.694166/8.33) = sin(pi/2)
  SurfaceProfile p{0.25, 3, 0.0, 0.0, 8.33};
  const double x = 8.33 / 12.0;  // quarter of one of three periods
  EXPECT_NEAR(eval_profile(p, x), 0.25, 1e-12);
  EXPECT_NEAR(eval_profile(p, 0.694166667), 0.25, 1e-6);
}

TEST(SurfaceProfile, DomainErrorOutsideFace) {
  SurfaceProfile p{0.1, 2, 0.0, 0.0, 8.33};
  EXPECT_THROW(eval_profile(p, -0.01), std::domain_error);
  EXPECT_THROW(eval_profile(p, 8.34), std::domain_error);
}

TEST(SurfaceProfile, MirrorIdentityHoldsPointwise) {
  const SurfaceProfile p{0.2, 3, 5.0, 0.7, 8.33};
  const SurfaceProfile q = mirror_profile(p);
  for (int i = 0; i <= 100; ++i) {
    const double x = 8.33 * i / 100.0;
    EXPECT_NEAR(q.eval(8.33 - x), p.eval(x), 1e-12);
  }
}

TEST(MorphologyMetrics, WavelengthByDivision) {
  SurfaceProfile p{0.1, 3, 0.0, 0.0, 8.33};
  const auto m = morphology_metrics(p);
  EXPECT_NEAR(m.wavelength, 2.7767, 1e-4);
  EXPECT_NEAR(m.quarter_wave, 8.33 / 12.0, 1e-12);
}

TEST(MorphologyMetrics, TopSlopeIdentity) {
  SurfaceProfile p{0.25, 3, 0.0, 0.0, 8.33};
  const auto m = morphology_metrics(p);
  EXPECT_NEAR(m.top_slope, 4.0 * 3 * 0.25 / 8.33, 1e-15);
  EXPECT_NEAR(m.top_slope, 0.3601, 5e-5);
  EXPECT_NEAR(m.top_angle_deg, 19.8, 0.05);
}

TEST(MorphologyMetrics, PlanarDegenerate) {
  SurfaceProfile p{0.0, 3, 5.0, 0.0, 8.33};
  const auto m = morphology_metrics(p);
  EXPECT_DOUBLE_EQ(m.top_slope, 0.0);
  EXPECT_DOUBLE_EQ(m.top_angle_deg, 0.0);
}

TEST(MorphologyMetrics, IdentityAcrossSweepGrid) {
  const double l = 8.33;
  for (int n : {2, 3, 4})
    for (double a : {0.025, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3}) {
      SurfaceProfile p{a, n, 0.0, 0.5 * kPi, l};
      EXPECT_DOUBLE_EQ(morphology_metrics(p).top_slope, a / (l / n / 4.0));
      EXPECT_NEAR(morphology_metrics(p).top_slope, 4.0 * n * a / l, 1e-15);
    }
}

TEST(BlockSolid, PlanarZeroAngleIsBox) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.0, 1, 0.0, 0.0);
  const BlockSolid solid = build_block_solid(spec);
  EXPECT_NEAR(solid.volume(), 8.33 * 8.33 * 3.18, 1e-9);
  EXPECT_NEAR(solid.cross_section_area(1.0), 8.33 * 8.33, 1e-12);
}

TEST(BlockSolid, PlanarInclinedKeepsMidplaneArea) {
  const BlockSpec spec = make_block_spec(8.33, 3.18, 0.0, 1, 5.0, 0.0);
  const BlockSolid solid = build_block_solid(spec);
  EXPECT_NEAR(solid.cross_section_area(3.18 / 2.0), 8.33 * 8.33, 1e-10);
  // truncated-tetrahedron alternation: widens in x, narrows in z at the top
  EXPECT_GT(solid.xb(3.18) - solid.xa(3.18), 8.33);
  EXPECT_LT(solid.zb(3.18) - solid.za(3.18), 8.33);
}

// Equal-phase x/z waves (the conforming assembly construction) change the
// volume by exactly -4*int(p^2) = -2A^2h for whole-period zero-inclination
// sinusoids; quadrature must match that closed form tightly.
TEST(BlockSolid, WavyVolumeMatchesClosedForm) {
  const double l = 8.33, h = 3.18, a = 0.25;
  const BlockSpec spec = make_block_spec(l, h, a, 3, 0.0, 0.5 * kPi);
  const BlockSolid solid = build_block_solid(spec);
  const double expected = l * l * h - 2.0 * a * a * h;
  EXPECT_NEAR(solid.volume() / expected, 1.0, 1e-9);
  // first-order conservation: deficit stays second order in A
  EXPECT_NEAR(solid.volume() / (l * l * h), 1.0, 2.0 * a * a / (l * l) + 1e-9);
}

// A block whose x and z waves are quarter-phase shifted has int(p_x p_z) = 0
// and conserves volume exactly; this is the configuration the spec's 1e-6
// bound describes.
TEST(BlockSolid, QuarterPhaseWavesConserveVolume) {
  const double l = 8.33, h = 3.18, a = 0.25;
  const SurfaceProfile px{a, 3, 0.0, 0.5 * kPi, h};
  const SurfaceProfile pz{a, 3, 0.0, 0.5 * kPi + 0.5 * kPi, h};
  BlockSpec spec;
  spec.plan_length = l;
  spec.height = h;
  spec.faces[kFaceXP] = BlockFace{false, false, px, +1};
  spec.faces[kFaceXM] = BlockFace{false, false, negate_profile(px), +1};
  spec.faces[kFaceZP] = BlockFace{false, false, negate_profile(pz), +1};
  spec.faces[kFaceZM] = BlockFace{false, false, pz, +1};
  const BlockSolid solid = build_block_solid(spec);
  EXPECT_NEAR(solid.volume() / (l * l * h), 1.0, 1e-6);
}

TEST(BlockSolid, AmplitudeZeroRecoversPlanarBitForBit) {
  const BlockSpec wavy0 = make_block_spec(8.33, 3.18, 0.0, 3, 5.0, 0.5 * kPi);
  const BlockSpec planar = make_block_spec(8.33, 3.18, 0.0, 1, 5.0, 0.0);
  const BlockSolid a = build_block_solid(wavy0);
  const BlockSolid b = build_block_solid(planar);
  for (int i = 0; i <= 64; ++i) {
    const double y = 3.18 * i / 64.0;
    EXPECT_EQ(a.xa(y), b.xa(y));
    EXPECT_EQ(a.xb(y), b.xb(y));
    EXPECT_EQ(a.za(y), b.za(y));
    EXPECT_EQ(a.zb(y), b.zb(y));
  }
}

TEST(BlockSolid, SelfIntersectionRejected) {
  EXPECT_THROW(make_block_spec(8.33, 3.18, 1.7, 3, 0.0, 0.5 * kPi), std::invalid_argument);
}

TEST(Assembly, ReferenceBlockCounts) {
  AssemblySpec spec;
  spec.grid = 5;
  spec.amplitude = 0.0;
  spec.avg_inclination_deg = 5.0;
  const Assembly asmb = build_assembly(spec);
  EXPECT_EQ(asmb.count_role(BlockRole::central) + asmb.count_role(BlockRole::internal), 25);
  EXPECT_EQ(asmb.count_role(BlockRole::peripheral_half), 20);
  EXPECT_EQ(asmb.count_role(BlockRole::peripheral_quarter), 4);
}

TEST(Assembly, CentralBlockHasFourInteriorNeighbors) {
  AssemblySpec spec;
  spec.grid = 5;
  const Assembly asmb = build_assembly(spec);
  const auto ifs = asmb.interfaces_of(asmb.central_id);
  EXPECT_EQ(ifs.size(), 4u);
  for (int id : ifs) {
    const auto& f = asmb.interfaces[id];
    const int other = f.block_a == asmb.central_id ? f.block_b : f.block_a;
    EXPECT_EQ(asmb.blocks[other].role, BlockRole::internal);
  }
}

TEST(Assembly, MiniThreeByThree) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  const Assembly asmb = build_assembly(spec);
  EXPECT_EQ(asmb.count_role(BlockRole::central) + asmb.count_role(BlockRole::internal), 9);
  EXPECT_EQ(asmb.count_role(BlockRole::peripheral_half), 12);
  EXPECT_EQ(asmb.count_role(BlockRole::peripheral_quarter), 4);
}

TEST(Assembly, ConformingConstructionHasNoPenetration) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.25;
  spec.oscillations = 3;
  spec.avg_inclination_deg = 0.0;
  EXPECT_NO_THROW(verify_no_penetration(build_assembly(spec), 1e-9));
}

TEST(Assembly, MirrorCompatibilityAtEveryInterface) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.15;
  spec.oscillations = 3;
  spec.avg_inclination_deg = 5.0;
  const Assembly asmb = build_assembly(spec);
  for (const auto& f : asmb.interfaces) {
    const int fa = f.axis == 0 ? kFaceXP : kFaceZP;
    const int fb = f.axis == 0 ? kFaceXM : kFaceZM;
    const SurfaceProfile& pa = asmb.blocks[f.block_a].spec.faces[fa].profile;
    const SurfaceProfile& pb = asmb.blocks[f.block_b].spec.faces[fb].profile;
    const double L = pa.face_length;
    for (int i = 0; i <= 100; ++i) {
      const double x = L * i / 100.0;
      ASSERT_NEAR(pb.eval(L - x), pa.eval(x), 1e-12);
    }
  }
}

TEST(Assembly, LmustMatchGridTimesBlock) {
  AssemblySpec spec;
  spec.grid = 5;
  spec.panel_side = 50.0;
  spec.block_length = 8.0;  // 6*8 = 48 != 50
  EXPECT_THROW(build_assembly(spec), std::invalid_argument);
}

TEST(QuarterModel, InteriorEquivalentCount) {
  AssemblySpec spec;
  spec.grid = 5;
  const Assembly full = build_assembly(spec);
  const auto qm = quarter_model(full);
  EXPECT_NEAR(qm.assembly.interior_equivalents(), 6.25, 1e-12);
  EXPECT_EQ(qm.assembly.central().role, BlockRole::central);
}

TEST(QuarterModel, PlanarFiveDegAdmissible) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.0;
  spec.avg_inclination_deg = 5.0;
  spec.phase = 0.0;
  EXPECT_NO_THROW(quarter_model(build_assembly(spec)));
}

TEST(QuarterModel, IncompatiblePhaseRejected) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  spec.amplitude = 0.1;
  spec.oscillations = 2;
  spec.phase = kPi / 3.0;
  EXPECT_THROW(quarter_model(build_assembly(spec)), SymmetryError);
}

TEST(QuarterModel, OutwardNormalsPointOutOfQuadrant) {
  AssemblySpec spec;
  spec.grid = 3;
  spec.panel_side = 4.0 * 8.33;
  spec.block_length = 8.33;
  const auto qm = quarter_model(build_assembly(spec));
  EXPECT_DOUBLE_EQ(qm.planes[0].outward_normal[0], -1.0);
  EXPECT_DOUBLE_EQ(qm.planes[1].outward_normal[2], -1.0);
}
