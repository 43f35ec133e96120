#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "tis/assembly.hpp"
#include "tis/errors.hpp"
#include "tis/meshing.hpp"
#include "tis/tri_geometry.hpp"

namespace tis {

/// A meshed contact interface: the slave side's face nodes sample against the
/// master side's face facets. Slave = finer face grid, ties broken toward the
/// cell farther from the panel center (mirror-consistent).
struct InterfaceSurface {
  int plan_id = -1;
  int slave_block = -1, master_block = -1;
  std::vector<int> slave_nodes;       ///< local node ids in the slave mesh
  std::vector<double> tributary;      ///< rest tributary area per slave node, mm^2
  std::vector<int> master_facets;     ///< indices into master mesh boundary
  int axis = 0;
  double sign = 1.0;
};

struct ContactSurfaces {
  std::vector<InterfaceSurface> interfaces;
  int central_block = -1;
  std::vector<int> indenter_nodes;        ///< central-block top-face nodes (local)
  std::vector<double> indenter_tributary;
  // symmetry-plane nodes as (block id, local node id)
  std::vector<std::pair<int, int>> sym_x_nodes, sym_z_nodes;

  int sym_plane_count() const {
    return (sym_x_nodes.empty() ? 0 : 1) + (sym_z_nodes.empty() ? 0 : 1);
  }
};

namespace detail {

inline std::vector<int> face_facets(const TetMesh& mesh, int label) {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(mesh.boundary.size()); ++i)
    if (mesh.boundary[i].label == label) out.push_back(i);
  return out;
}

inline std::vector<int> face_nodes(const TetMesh& mesh, int label) {
  std::vector<char> seen(mesh.nodes.size(), 0);
  for (const auto& f : mesh.boundary)
    if (f.label == label)
      for (int v : f.n) seen[v] = 1;
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(mesh.nodes.size()); ++i)
    if (seen[i]) out.push_back(i);
  return out;
}

}  // namespace detail

/// Pair every adjacent block interface into an InterfaceSurface, pick the
/// indenter target region, and gather symmetry-plane nodes. Slave nodes whose
/// rest projection misses the master face (corner overhangs) are excluded.
inline ContactSurfaces extract_contact_surfaces(const std::vector<TetMesh>& meshes,
                                                const Assembly& asmb) {
  ContactSurfaces out;
  out.central_block = asmb.central_id;
  const double incl_tol = 1e-6;  // mm; rest-state conforming nodes sit at ~1e-15

  for (const auto& plan : asmb.interfaces) {
    const int side_a = plan.axis == 0 ? kFaceXP : kFaceZP;
    const int side_b = plan.axis == 0 ? kFaceXM : kFaceZM;
    const auto nodes_a = detail::face_nodes(meshes[plan.block_a], side_a);
    const auto nodes_b = detail::face_nodes(meshes[plan.block_b], side_b);

    const auto& A = asmb.blocks[plan.block_a];
    const auto& B = asmb.blocks[plan.block_b];
    const long da = static_cast<long>(A.cell_i) * A.cell_i + static_cast<long>(A.cell_k) * A.cell_k;
    const long db = static_cast<long>(B.cell_i) * B.cell_i + static_cast<long>(B.cell_k) * B.cell_k;
    bool a_is_slave;
    if (nodes_a.size() != nodes_b.size())
      a_is_slave = nodes_a.size() > nodes_b.size();
    else
      a_is_slave = da > db;

    InterfaceSurface surf;
    surf.plan_id = plan.id;
    surf.axis = plan.axis;
    surf.sign = plan.sign;
    surf.slave_block = a_is_slave ? plan.block_a : plan.block_b;
    surf.master_block = a_is_slave ? plan.block_b : plan.block_a;
    const int slave_side = a_is_slave ? side_a : side_b;
    const int master_side = a_is_slave ? side_b : side_a;
    const TetMesh& sm = meshes[surf.slave_block];
    const TetMesh& mm = meshes[surf.master_block];
    surf.master_facets = detail::face_facets(mm, master_side);
    const auto slave_facets = detail::face_facets(sm, slave_side);
    if (surf.master_facets.empty() || slave_facets.empty())
      throw AssemblyError("interface " + std::to_string(plan.id) +
                          ": a face has no boundary facets (pairing error)");

    std::vector<double> trib(sm.nodes.size(), 0.0);
    for (int fi : slave_facets) {
      const auto& f = sm.boundary[fi];
      const double a3 = sm.facet_area(f) / 3.0;
      for (int v : f.n) trib[v] += a3;
    }

    for (int v : detail::face_nodes(sm, slave_side)) {
      const Eigen::Vector3d p = sm.nodes[v];
      double best = 1e30;
      for (int fi : surf.master_facets) {
        const auto& f = mm.boundary[fi];
        const auto proj =
            project_to_triangle(p, mm.nodes[f.n[0]], mm.nodes[f.n[1]], mm.nodes[f.n[2]]);
        best = std::min(best, proj.distance);
        if (best < incl_tol) break;
      }
      if (best < incl_tol) {
        surf.slave_nodes.push_back(v);
        surf.tributary.push_back(trib[v]);
      }
    }
    if (surf.slave_nodes.empty())
      throw AssemblyError("interface " + std::to_string(plan.id) +
                          ": no conforming sample points (pairing error)");
    out.interfaces.push_back(std::move(surf));
  }

  // indenter target: top face of the central block
  {
    const TetMesh& cm = meshes[asmb.central_id];
    std::vector<double> trib(cm.nodes.size(), 0.0);
    for (const auto& f : cm.boundary)
      if (f.label == kFaceTop) {
        const double a3 = cm.facet_area(f) / 3.0;
        for (int v : f.n) trib[v] += a3;
      }
    for (int v : detail::face_nodes(cm, kFaceTop)) {
      out.indenter_nodes.push_back(v);
      out.indenter_tributary.push_back(trib[v]);
    }
  }

  // symmetry-plane nodes from clipped faces
  for (const auto& b : asmb.blocks) {
    if (b.spec.faces[kFaceXM].symmetry)
      for (int v : detail::face_nodes(meshes[b.id], kFaceXM)) out.sym_x_nodes.emplace_back(b.id, v);
    if (b.spec.faces[kFaceZM].symmetry)
      for (int v : detail::face_nodes(meshes[b.id], kFaceZM)) out.sym_z_nodes.emplace_back(b.id, v);
  }
  return out;
}

/// Max rest-state gap over all interface sample points (conformity check).
inline double max_rest_gap(const std::vector<TetMesh>& meshes, const ContactSurfaces& surfaces) {
  double worst = 0.0;
  for (const auto& surf : surfaces.interfaces) {
    const TetMesh& sm = meshes[surf.slave_block];
    const TetMesh& mm = meshes[surf.master_block];
    for (int v : surf.slave_nodes) {
      double best = 1e30;
      for (int fi : surf.master_facets) {
        const auto& f = mm.boundary[fi];
        const auto proj =
            project_to_triangle(sm.nodes[v], mm.nodes[f.n[0]], mm.nodes[f.n[1]], mm.nodes[f.n[2]]);
        best = std::min(best, proj.distance);
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace tis
