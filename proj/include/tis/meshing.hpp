#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tis/block.hpp"
#include "tis/errors.hpp"

namespace tis {

inline constexpr int kFaceTop = 4;
inline constexpr int kFaceBottom = 5;

/// First-order tetrahedral mesh of one block, produced by a structured
/// transfinite sweep (cross sections are exact rectangles at every height).
struct TetMesh {
  int block_id = -1;
  std::vector<Eigen::Vector3d> nodes;
  std::vector<std::array<int, 4>> tets;

  struct Facet {
    std::array<int, 3> n;  ///< outward-oriented
    int label;             ///< FaceSide or kFaceTop/kFaceBottom
  };
  std::vector<Facet> boundary;

  int nx = 0, ny = 0, nz = 0;
  std::vector<std::array<int, 3>> grid_coord;  ///< (ix, iz, iy) per node
  std::vector<std::string> warnings;

  double tet_volume(int t) const {
    const auto& e = tets[t];
    const Eigen::Vector3d a = nodes[e[0]];
    return (nodes[e[1]] - a).cross(nodes[e[2]] - a).dot(nodes[e[3]] - a) / 6.0;
  }

  double total_volume() const {
    double v = 0.0;
    for (int t = 0; t < static_cast<int>(tets.size()); ++t) v += tet_volume(t);
    return v;
  }

  double facet_area(const Facet& f) const {
    return 0.5 * (nodes[f.n[1]] - nodes[f.n[0]]).cross(nodes[f.n[2]] - nodes[f.n[0]]).norm();
  }

  Eigen::Vector3d facet_normal(const Facet& f) const {
    return (nodes[f.n[1]] - nodes[f.n[0]]).cross(nodes[f.n[2]] - nodes[f.n[0]]).normalized();
  }
};

namespace detail {

// 6-tet split around the c0-c6 diagonal; shared hex faces get matching
// diagonals, so the decomposition conforms across the grid.
inline constexpr int kHexSplit[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                                        {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};

}  // namespace detail

/// Mesh a block solid with `density` elements per full plan edge. Vertical
/// divisions are derived (>= 8 segments per sinusoid wavelength for wavy
/// faces) unless forced; forcing below the resolution rule warns, it does
/// not fail.
inline TetMesh mesh_block(const BlockSolid& solid, int density, int vertical_divisions = 0) {
  if (density < 1) throw MeshError("mesh_block: density must be >= 1");
  solid.spec.validate();
  const double l = solid.spec.plan_length;
  const double h = solid.spec.height;

  int max_osc = 0;
  for (const auto& f : solid.spec.faces)
    if (!f.flat && f.profile.amplitude > 0.0) max_osc = std::max(max_osc, f.profile.oscillations);

  const double wx = solid.x1 - solid.x0, wz = solid.z1 - solid.z0;
  const int nx = std::max(1, static_cast<int>(std::lround(density * wx / l)));
  const int nz = std::max(1, static_cast<int>(std::lround(density * wz / l)));
  int ny = vertical_divisions;
  if (ny <= 0) ny = max_osc > 0 ? 8 * max_osc : std::max(1, static_cast<int>(std::lround(density * h / l)));

  TetMesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.nz = nz;
  if (max_osc > 0 && ny < 8 * max_osc)
    mesh.warnings.push_back("vertical resolution " + std::to_string(ny) + " below " +
                            std::to_string(8 * max_osc) + " (8 segments per wavelength)");

  const int nxy = (nx + 1) * (nz + 1);
  auto node_id = [&](int ix, int iz, int iy) { return iy * nxy + iz * (nx + 1) + ix; };

  mesh.nodes.reserve(nxy * (ny + 1));
  mesh.grid_coord.reserve(nxy * (ny + 1));
  for (int iy = 0; iy <= ny; ++iy) {
    const double y = h * iy / ny;
    const double xa = solid.xa(y), xb = solid.xb(y);
    const double za = solid.za(y), zb = solid.zb(y);
    for (int iz = 0; iz <= nz; ++iz) {
      const double z = za + (zb - za) * iz / nz;
      for (int ix = 0; ix <= nx; ++ix) {
        const double x = xa + (xb - xa) * ix / nx;
        mesh.nodes.emplace_back(x, y, z);
        mesh.grid_coord.push_back({ix, iz, iy});
      }
    }
  }

  mesh.tets.reserve(static_cast<size_t>(nx) * nz * ny * 6);
  for (int iy = 0; iy < ny; ++iy) {
    for (int iz = 0; iz < nz; ++iz) {
      for (int ix = 0; ix < nx; ++ix) {
        const int c[8] = {node_id(ix, iz, iy),         node_id(ix + 1, iz, iy),
                          node_id(ix + 1, iz + 1, iy), node_id(ix, iz + 1, iy),
                          node_id(ix, iz, iy + 1),     node_id(ix + 1, iz, iy + 1),
                          node_id(ix + 1, iz + 1, iy + 1), node_id(ix, iz + 1, iy + 1)};
        for (const auto& s : detail::kHexSplit) {
          std::array<int, 4> tet{c[s[0]], c[s[1]], c[s[2]], c[s[3]]};
          mesh.tets.push_back(tet);
          if (mesh.tet_volume(static_cast<int>(mesh.tets.size()) - 1) <= 0.0)
            throw MeshError("inverted element in hex cell (" + std::to_string(ix) + "," +
                            std::to_string(iz) + "," + std::to_string(iy) + ")");
        }
      }
    }
  }

  // boundary = tet faces owned by exactly one tet, oriented outward
  std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> once;  // sorted -> (as-seen, opp node)
  static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  for (const auto& t : mesh.tets) {
    for (const auto& fc : kFaces) {
      std::array<int, 3> tri{t[fc[0]], t[fc[1]], t[fc[2]]};
      const int opp = t[0] + t[1] + t[2] + t[3] - tri[0] - tri[1] - tri[2];
      std::array<int, 3> key = tri;
      std::sort(key.begin(), key.end());
      auto it = once.find(key);
      if (it == once.end())
        once.emplace(key, std::make_pair(tri, opp));
      else
        once.erase(it);
    }
  }
  for (auto& [key, val] : once) {
    auto [tri, opp] = val;
    const Eigen::Vector3d a = mesh.nodes[tri[0]];
    const Eigen::Vector3d nrm = (mesh.nodes[tri[1]] - a).cross(mesh.nodes[tri[2]] - a);
    if (nrm.dot(mesh.nodes[opp] - a) > 0.0) std::swap(tri[1], tri[2]);
    auto on_plane = [&](int axis, int value) {
      for (int v : tri)
        if (mesh.grid_coord[v][axis] != value) return false;
      return true;
    };
    int label = -1;
    if (on_plane(0, 0)) label = kFaceXM;
    else if (on_plane(0, nx)) label = kFaceXP;
    else if (on_plane(1, 0)) label = kFaceZM;
    else if (on_plane(1, nz)) label = kFaceZP;
    else if (on_plane(2, 0)) label = kFaceBottom;
    else if (on_plane(2, ny)) label = kFaceTop;
    mesh.boundary.push_back(TetMesh::Facet{tri, label});
  }
  return mesh;
}

struct QualityReport {
  double min_scaled_jacobian = 0.0;
  double mean_scaled_jacobian = 0.0;
  double max_aspect_ratio = 0.0;
  int worst_element = -1;
};

/// Corner-based scaled Jacobian (regular tet ~ 0.707) and edge aspect ratio.
inline QualityReport mesh_quality(const TetMesh& mesh) {
  if (mesh.tets.empty()) throw MeshError("mesh_quality: empty mesh");
  static constexpr int kCorner[4][3] = {{1, 2, 3}, {2, 0, 3}, {0, 1, 3}, {0, 2, 1}};
  QualityReport q;
  q.min_scaled_jacobian = 1e30;
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.tets.size()); ++t) {
    const auto& e = mesh.tets[t];
    double tet_q = 1e30;
    for (int c = 0; c < 4; ++c) {
      const Eigen::Vector3d o = mesh.nodes[e[c]];
      Eigen::Matrix3d J;
      for (int j = 0; j < 3; ++j) J.col(j) = mesh.nodes[e[kCorner[c][j]]] - o;
      const double den = J.col(0).norm() * J.col(1).norm() * J.col(2).norm();
      tet_q = std::min(tet_q, den > 0.0 ? J.determinant() / den : 0.0);
    }
    sum += tet_q;
    if (tet_q < q.min_scaled_jacobian) {
      q.min_scaled_jacobian = tet_q;
      q.worst_element = t;
    }
    double emin = 1e30, emax = 0.0;
    static constexpr int kEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& ed : kEdges) {
      const double len = (mesh.nodes[e[ed[0]]] - mesh.nodes[e[ed[1]]]).norm();
      emin = std::min(emin, len);
      emax = std::max(emax, len);
    }
    q.max_aspect_ratio = std::max(q.max_aspect_ratio, emin > 0.0 ? emax / emin : 1e30);
  }
  q.mean_scaled_jacobian = sum / mesh.tets.size();
  return q;
}

}  // namespace tis
