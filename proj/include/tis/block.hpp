#pragma once

#include <array>
#include <cmath>
#include <string>

#include "tis/errors.hpp"
#include "tis/surface_profile.hpp"

namespace tis {

enum class BlockRole { central, internal, peripheral_half, peripheral_quarter };

inline const char* to_string(BlockRole r) {
  switch (r) {
    case BlockRole::central: return "central";
    case BlockRole::internal: return "internal";
    case BlockRole::peripheral_half: return "peripheral_half";
    case BlockRole::peripheral_quarter: return "peripheral_quarter";
  }
  return "?";
}

/// Side faces in fixed order; TOP/BOTTOM are handled by the mesher.
enum FaceSide : int { kFaceXP = 0, kFaceXM = 1, kFaceZP = 2, kFaceZM = 3 };

inline const char* face_name(int side) {
  static const char* names[4] = {"x+", "x-", "z+", "z-"};
  return names[side];
}

/// One side face of a block. Profiled faces store the offset along the face's
/// global axis (x for x-faces, z for z-faces) as a function of a domain
/// coordinate that runs over the block height; domain_dir -1 means the
/// parameter runs top-down, which is how the second block of a conforming
/// pair sees the shared surface.
struct BlockFace {
  bool flat = true;
  bool symmetry = false;  ///< clipped face lying on a symmetry plane
  SurfaceProfile profile;
  int domain_dir = +1;

  /// Global-axis offset at height y (0 for flat faces).
  double offset(double y, double height) const {
    if (flat) return 0.0;
    double x = domain_dir > 0 ? y : height - y;
    // clamp fp drift at the domain ends
    if (x < 0.0 && x > -1e-12 * height) x = 0.0;
    if (x > height && x < (1.0 + 1e-12) * height) x = height;
    return profile.eval(x);
  }
};

/// Square-plan interlocking block: four ruled side faces extruding their
/// height profiles, planar top and bottom.
struct BlockSpec {
  double plan_length = 0.0;  ///< l, mm
  double height = 0.0;       ///< h, mm
  BlockRole role = BlockRole::internal;
  std::array<BlockFace, 4> faces;

  void validate() const {
    if (!(plan_length > 0.0)) throw std::invalid_argument("BlockSpec: plan_length must be > 0");
    if (!(height > 0.0)) throw std::invalid_argument("BlockSpec: height must be > 0");
    for (int s = 0; s < 4; ++s) {
      const BlockFace& f = faces[s];
      if (f.flat) continue;
      f.profile.validate();
      if (std::abs(f.profile.face_length - height) > 1e-12 * height)
        throw std::invalid_argument(std::string("BlockSpec: face ") + face_name(s) +
                                    " profile domain must equal the block height");
      if (!(f.profile.offset_extent() < height))
        throw std::invalid_argument(std::string("BlockSpec: face ") + face_name(s) +
                                    " profile too steep (2A + h*tan|theta| >= h)");
    }
  }
};

/// Checkerboard orientation template: parity +1 blocks are wide-top along x
/// and wide-bottom along z; parity -1 swaps the axes. p(y) is the common
/// ramp+wave profile, applied outward on the x pair and inward on the z pair.
inline BlockSpec make_block_spec(double plan_length, double height, double amplitude,
                                 int oscillations, double avg_inclination_deg, double phase,
                                 int parity = +1, BlockRole role = BlockRole::internal) {
  SurfaceProfile base{amplitude, oscillations, avg_inclination_deg, phase, height};
  base.validate();
  BlockSpec spec;
  spec.plan_length = plan_length;
  spec.height = height;
  spec.role = role;
  const SurfaceProfile pos = parity > 0 ? base : negate_profile(base);
  const SurfaceProfile neg = negate_profile(pos);
  spec.faces[kFaceXP] = BlockFace{false, false, pos, +1};
  spec.faces[kFaceXM] = BlockFace{false, false, neg, +1};
  spec.faces[kFaceZP] = BlockFace{false, false, neg, +1};
  spec.faces[kFaceZM] = BlockFace{false, false, pos, +1};
  spec.validate();
  return spec;
}

/// Watertight boundary representation: a nominal plan rectangle whose x/z
/// bounds follow the face offsets through the height. Cross sections are
/// rectangles at every height, which is what makes the transfinite mesher
/// exact.
struct BlockSolid {
  BlockSpec spec;
  double x0 = 0, x1 = 0, z0 = 0, z1 = 0;  ///< nominal plan rectangle, mm

  double height() const { return spec.height; }

  double xa(double y) const { return x0 + spec.faces[kFaceXM].offset(y, spec.height); }
  double xb(double y) const { return x1 + spec.faces[kFaceXP].offset(y, spec.height); }
  double za(double y) const { return z0 + spec.faces[kFaceZM].offset(y, spec.height); }
  double zb(double y) const { return z1 + spec.faces[kFaceZP].offset(y, spec.height); }

  double cross_section_area(double y) const { return (xb(y) - xa(y)) * (zb(y) - za(y)); }

  /// Volume by composite Simpson over the height (cross sections are exact
  /// rectangles, so only the y-integration is approximate).
  double volume(int intervals = 40000) const {
    if (intervals % 2) ++intervals;
    const double h = spec.height;
    double sum = cross_section_area(0.0) + cross_section_area(h);
    for (int i = 1; i < intervals; ++i)
      sum += cross_section_area(h * i / intervals) * (i % 2 ? 4.0 : 2.0);
    return sum * h / (3.0 * intervals);
  }
};

/// Realize a block solid centered at the origin. Throws GeometryError naming
/// the offending face pair if opposite faces would touch or cross.
inline BlockSolid build_block_solid(const BlockSpec& spec) {
  spec.validate();
  BlockSolid solid;
  solid.spec = spec;
  const double half = 0.5 * spec.plan_length;
  solid.x0 = -half;
  solid.x1 = half;
  solid.z0 = -half;
  solid.z1 = half;
  const int samples = 2048;
  for (int i = 0; i <= samples; ++i) {
    const double y = spec.height * i / samples;
    if (!(solid.xb(y) - solid.xa(y) > 0.0))
      throw GeometryError("block faces x+/x- intersect at y=" + std::to_string(y));
    if (!(solid.zb(y) - solid.za(y) > 0.0))
      throw GeometryError("block faces z+/z- intersect at y=" + std::to_string(y));
  }
  return solid;
}

}  // namespace tis
