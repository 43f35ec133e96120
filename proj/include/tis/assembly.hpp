#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "tis/block.hpp"
#include "tis/errors.hpp"
#include "tis/surface_profile.hpp"

namespace tis {

/// Panel-level specification: interior grid, material, friction, and the
/// morphology shared by every interface.
struct AssemblySpec {
  int grid = 5;                ///< interior blocks per side (odd)
  double panel_side = 50.0;    ///< L, mm
  double block_length = 0.0;   ///< l, mm; 0 derives L/(grid+1)
  double height = 3.18;        ///< h, mm
  double youngs_mpa = 18700.0; ///< E, N/mm^2
  double poisson = 0.2;
  double friction = 0.23;      ///< mu at block interfaces

  double amplitude = 0.0;          ///< A, mm
  int oscillations = 3;            ///< n
  double avg_inclination_deg = 5.0;///< theta-bar (planar baseline default)
  double phase = 0.5 * std::numbers::pi;  ///< crest at the top edge

  void resolve() {
    if (block_length == 0.0) block_length = panel_side / (grid + 1);
  }

  void validate() const {
    if (grid < 3 || grid % 2 == 0)
      throw std::invalid_argument("AssemblySpec: grid must be odd and >= 3");
    if (!(panel_side > 0.0) || !(block_length > 0.0) || !(height > 0.0))
      throw std::invalid_argument("AssemblySpec: lengths must be > 0");
    if (std::abs(panel_side - (grid + 1) * block_length) > 1e-9 * panel_side)
      throw std::invalid_argument("AssemblySpec: L must equal (grid+1)*l");
    if (!(youngs_mpa > 0.0)) throw std::invalid_argument("AssemblySpec: E must be > 0");
    if (!(poisson >= 0.0 && poisson < 0.5))
      throw std::invalid_argument("AssemblySpec: nu must be in [0, 0.5)");
    if (!(friction >= 0.0)) throw std::invalid_argument("AssemblySpec: mu must be >= 0");
    SurfaceProfile{amplitude, oscillations, avg_inclination_deg, phase, height}.validate();
  }

  /// Common ramp+wave height profile p(y), domain = block height.
  SurfaceProfile base_profile() const {
    return SurfaceProfile{amplitude, oscillations, avg_inclination_deg, phase, height};
  }

  /// Block template with checkerboard parity +1 (the central block's class).
  BlockSpec block_template() const {
    return make_block_spec(block_length, height, amplitude, oscillations,
                           avg_inclination_deg, phase, +1, BlockRole::central);
  }
};

/// A placed block: grid cell, plan rectangle (already clipped for quarter
/// models), parity class, and the face set the mesher consumes.
struct PlacedBlock {
  int id = -1;
  int cell_i = 0, cell_k = 0;   ///< centered cell index; periphery at |m+1|
  int parity = +1;              ///< +1: wide-top along x
  BlockRole role = BlockRole::internal;
  bool fixed = false;
  double x0 = 0, x1 = 0, z0 = 0, z1 = 0;  ///< nominal plan rectangle
  BlockSpec spec;

  BlockSolid solid() const {
    BlockSolid s;
    s.spec = spec;
    s.x0 = x0; s.x1 = x1; s.z0 = z0; s.z1 = z1;
    return s;
  }
};

/// Conforming surface shared by an adjacent block pair. The surface is
/// coord + sign*p(y) along the axis; t-range is the transverse plan extent.
struct InterfacePlan {
  int id = -1;
  int block_a = -1;  ///< lower cell along the axis
  int block_b = -1;
  int axis = 0;      ///< 0: x-normal, 1: z-normal
  double sign = 1.0;
  double coord = 0.0;
  double t0 = 0.0, t1 = 0.0;
};

struct SymPlane {
  std::array<double, 3> point{0, 0, 0};
  std::array<double, 3> outward_normal{0, 0, 0};
};

struct Assembly {
  AssemblySpec spec;
  std::vector<PlacedBlock> blocks;
  std::vector<InterfacePlan> interfaces;
  int central_id = -1;
  bool quarter = false;

  double sym_factor() const { return quarter ? 4.0 : 1.0; }

  const PlacedBlock& central() const { return blocks[central_id]; }

  std::vector<int> interfaces_of(int block_id) const {
    std::vector<int> out;
    for (const auto& f : interfaces)
      if (f.block_a == block_id || f.block_b == block_id) out.push_back(f.id);
    return out;
  }

  int count_role(BlockRole r) const {
    int n = 0;
    for (const auto& b : blocks) n += (b.role == r) ? 1 : 0;
    return n;
  }

  /// Interior (central+internal) plan area in units of full blocks.
  double interior_equivalents() const {
    double a = 0.0;
    for (const auto& b : blocks)
      if (b.role == BlockRole::central || b.role == BlockRole::internal)
        a += (b.x1 - b.x0) * (b.z1 - b.z0);
    return a / (spec.block_length * spec.block_length);
  }
};

namespace detail {

inline double cell_edge(int j, double l) { return 0.5 * l * (2 * j + 1); }  // edge between cells j, j+1

struct CellGeom {
  bool exists = false;
  double a0 = 0, a1 = 0;  // 1D extent
  bool peripheral = false;
};

inline CellGeom cell_extent(int j, int m, double l) {
  CellGeom g;
  const int ring = m + 1;
  if (j < -ring || j > ring) return g;
  g.exists = true;
  if (j == ring) {
    g.a0 = cell_edge(m, l);
    g.a1 = cell_edge(m, l) + 0.5 * l;
    g.peripheral = true;
  } else if (j == -ring) {
    g.a1 = cell_edge(-m - 1, l);
    g.a0 = g.a1 - 0.5 * l;
    g.peripheral = true;
  } else {
    g.a0 = cell_edge(j - 1, l);
    g.a1 = cell_edge(j, l);
  }
  return g;
}

}  // namespace detail

inline void verify_no_penetration(const Assembly& asmb, double tol);

/// Build the full panel: grid x grid interior blocks in checkerboard
/// orientation plus the fixed peripheral halves and corner quarters. Every
/// interface carries the shared profile, so conformity is exact by
/// construction; an independent penetration scan guards regressions.
inline Assembly build_assembly(AssemblySpec spec) {
  spec.resolve();
  spec.validate();
  const int m = (spec.grid - 1) / 2;
  const int ring = m + 1;
  const double l = spec.block_length;
  const double h = spec.height;
  const SurfaceProfile base = spec.base_profile();

  Assembly asmb;
  asmb.spec = spec;

  auto cell_index = [&](int i, int k) { return (i + ring) * (2 * ring + 1) + (k + ring); };
  std::vector<int> id_of((2 * ring + 1) * (2 * ring + 1), -1);

  for (int i = -ring; i <= ring; ++i) {
    for (int k = -ring; k <= ring; ++k) {
      const auto gx = detail::cell_extent(i, m, l);
      const auto gz = detail::cell_extent(k, m, l);
      if (!gx.exists || !gz.exists) continue;
      PlacedBlock b;
      b.id = static_cast<int>(asmb.blocks.size());
      b.cell_i = i;
      b.cell_k = k;
      b.parity = ((i + k) % 2 == 0) ? +1 : -1;
      b.x0 = gx.a0; b.x1 = gx.a1; b.z0 = gz.a0; b.z1 = gz.a1;
      const bool px = gx.peripheral, pz = gz.peripheral;
      b.role = (px && pz)   ? BlockRole::peripheral_quarter
               : (px || pz) ? BlockRole::peripheral_half
               : (i == 0 && k == 0) ? BlockRole::central
                                    : BlockRole::internal;
      b.fixed = px || pz;
      b.spec.plan_length = l;
      b.spec.height = h;
      b.spec.role = b.role;
      for (auto& f : b.spec.faces) f = BlockFace{};  // flat until an interface claims it
      id_of[cell_index(i, k)] = b.id;
      asmb.blocks.push_back(b);
      if (b.role == BlockRole::central) asmb.central_id = b.id;
    }
  }

  auto block_at = [&](int i, int k) -> int {
    if (i < -ring || i > ring || k < -ring || k > ring) return -1;
    return id_of[cell_index(i, k)];
  };

  // Interfaces: x-axis pairs (i,k)-(i+1,k) get sign = parity of the lower
  // cell; z-axis pairs get the opposite sign. That is exactly the 2-up-2-down
  // truncated-tetrahedron alternation in the planar limit.
  auto add_interface = [&](int ida, int idb, int axis, double sign) {
    const PlacedBlock& A = asmb.blocks[ida];
    const PlacedBlock& B = asmb.blocks[idb];
    InterfacePlan f;
    f.id = static_cast<int>(asmb.interfaces.size());
    f.block_a = ida;
    f.block_b = idb;
    f.axis = axis;
    f.sign = sign;
    if (axis == 0) {
      f.coord = A.x1;
      f.t0 = std::max(A.z0, B.z0);
      f.t1 = std::min(A.z1, B.z1);
    } else {
      f.coord = A.z1;
      f.t0 = std::max(A.x0, B.x0);
      f.t1 = std::min(A.x1, B.x1);
    }
    asmb.interfaces.push_back(f);

    const SurfaceProfile pa = sign > 0 ? base : negate_profile(base);
    const SurfaceProfile pb = mirror_profile(pa);
    const int fa = axis == 0 ? kFaceXP : kFaceZP;
    const int fb = axis == 0 ? kFaceXM : kFaceZM;
    asmb.blocks[ida].spec.faces[fa] = BlockFace{false, false, pa, +1};
    asmb.blocks[idb].spec.faces[fb] = BlockFace{false, false, pb, -1};
  };

  for (int i = -ring; i <= ring; ++i) {
    for (int k = -ring; k <= ring; ++k) {
      const int ida = block_at(i, k);
      if (ida < 0) continue;
      const double eps = ((i + k) % 2 == 0) ? +1.0 : -1.0;
      const int idx = block_at(i + 1, k);
      if (idx >= 0) add_interface(ida, idx, 0, eps);
      const int idz = block_at(i, k + 1);
      if (idz >= 0) add_interface(ida, idz, 1, -eps);
    }
  }

  for (auto& b : asmb.blocks) b.spec.validate();
  verify_no_penetration(asmb, 1e-9);
  return asmb;
}

/// Scan all block pairs for rest-state overlap of their cross sections.
/// Construction shares interface surfaces bitwise, so anything beyond fp
/// noise is a construction bug.
inline void verify_no_penetration(const Assembly& asmb, double tol) {
  const double h = asmb.spec.height;
  const int ny = 64 * std::max(1, asmb.spec.oscillations);
  for (size_t a = 0; a < asmb.blocks.size(); ++a) {
    for (size_t b = a + 1; b < asmb.blocks.size(); ++b) {
      const auto sa = asmb.blocks[a].solid();
      const auto sb = asmb.blocks[b].solid();
      // cheap reject: nominal rectangles further apart than any profile reach
      const double reach = 2.0 * (asmb.spec.amplitude + h);
      if (sa.x1 + reach < sb.x0 || sb.x1 + reach < sa.x0 ||
          sa.z1 + reach < sb.z0 || sb.z1 + reach < sa.z0)
        continue;
      for (int j = 0; j <= ny; ++j) {
        const double y = h * j / ny;
        const double ox = std::min(sa.xb(y), sb.xb(y)) - std::max(sa.xa(y), sb.xa(y));
        const double oz = std::min(sa.zb(y), sb.zb(y)) - std::max(sa.za(y), sb.za(y));
        const double pen = std::min(ox, oz);
        if (ox > tol && oz > tol)
          throw AssemblyError("blocks " + std::to_string(a) + " and " + std::to_string(b) +
                              " interpenetrate by " + std::to_string(pen) + " mm at y=" +
                              std::to_string(y));
      }
    }
  }
}

struct QuarterModel {
  Assembly assembly;
  std::array<SymPlane, 2> planes;
};

/// Reduce a full assembly to the x>=0, z>=0 quadrant with the central block
/// quartered. Requires the sinusoid registration to be mirror-compatible.
inline QuarterModel quarter_model(const Assembly& full) {
  if (full.quarter) throw SymmetryError("assembly is already a quarter model");
  const double phi = full.spec.phase;
  const double q = phi / (0.5 * std::numbers::pi);
  if (std::abs(q - std::round(q)) > 1e-9)
    throw SymmetryError("profile phase " + std::to_string(phi) +
                        " breaks mirror symmetry; run the full model");

  QuarterModel out;
  out.assembly.spec = full.spec;
  out.assembly.quarter = true;
  std::vector<int> remap(full.blocks.size(), -1);
  for (const auto& b : full.blocks) {
    if (b.cell_i < 0 || b.cell_k < 0) continue;
    PlacedBlock nb = b;
    nb.id = static_cast<int>(out.assembly.blocks.size());
    if (b.cell_i == 0) {
      nb.x0 = 0.0;
      nb.spec.faces[kFaceXM] = BlockFace{true, true, {}, +1};
    }
    if (b.cell_k == 0) {
      nb.z0 = 0.0;
      nb.spec.faces[kFaceZM] = BlockFace{true, true, {}, +1};
    }
    remap[b.id] = nb.id;
    if (b.id == full.central_id) out.assembly.central_id = nb.id;
    out.assembly.blocks.push_back(nb);
  }
  for (const auto& f : full.interfaces) {
    if (remap[f.block_a] < 0 || remap[f.block_b] < 0) continue;
    InterfacePlan nf = f;
    nf.id = static_cast<int>(out.assembly.interfaces.size());
    nf.block_a = remap[f.block_a];
    nf.block_b = remap[f.block_b];
    nf.t0 = std::max(nf.t0, 0.0);  // transverse extent clipped at the cut
    out.assembly.interfaces.push_back(nf);
  }
  out.planes[0] = SymPlane{{0, 0, 0}, {-1, 0, 0}};
  out.planes[1] = SymPlane{{0, 0, 0}, {0, 0, -1}};
  return out;
}

}  // namespace tis
