#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tis/assembly.hpp"
#include "tis/contact.hpp"
#include "tis/fem.hpp"
#include "tis/interfaces.hpp"
#include "tis/meshing.hpp"

namespace tis {

struct ModelOptions {
  int density = 4;
  int vertical_divisions = 0;      ///< 0 = derive from the resolution rule
  double penalty_scale = 100.0;    ///< kappa_n = scale * E * A_trib / h
  double kappa_t_ratio = 0.1;      ///< kappa_t / kappa_n
  double spring_scale = 1e-10;     ///< grounding spring k = scale * E * h per node
  bool with_indenter = true;
  double indenter_radius = 4.0;    ///< mm
  double indenter_mu = 0.0;
  double quality_floor = 0.05;     ///< distortion flag threshold (scaled Jacobian)
};

/// Fully assembled quasi-static system: meshes, DOF map, boundary conditions,
/// contact runtime state, and the residual/tangent evaluations the Newton
/// loop consumes. One SimModel = one simulation (single writer).
class SimModel {
public:
  Assembly assembly;
  ModelOptions opt;
  Material material;
  std::vector<TetMesh> meshes;
  ContactSurfaces surfaces;
  Indenter indenter;

  static SimModel build(const Assembly& asmb, const ModelOptions& options) {
    SimModel m;
    m.assembly = asmb;
    m.opt = options;
    m.material = Material{asmb.spec.youngs_mpa, asmb.spec.poisson};
    m.material.validate();

    m.meshes.reserve(asmb.blocks.size());
    for (const auto& b : asmb.blocks) {
      TetMesh mesh = mesh_block(b.solid(), options.density, options.vertical_divisions);
      mesh.block_id = b.id;
      m.meshes.push_back(std::move(mesh));
    }
    m.surfaces = extract_contact_surfaces(m.meshes, asmb);

    m.node_offset.resize(asmb.blocks.size());
    int total = 0;
    for (size_t b = 0; b < m.meshes.size(); ++b) {
      m.node_offset[b] = total;
      total += static_cast<int>(m.meshes[b].nodes.size());
    }
    m.total_nodes = total;
    m.rest.resize(total);
    for (size_t b = 0; b < m.meshes.size(); ++b)
      for (size_t n = 0; n < m.meshes[b].nodes.size(); ++n)
        m.rest[m.node_offset[b] + n] = m.meshes[b].nodes[n];

    m.dof_index.assign(3 * total, 0);
    m.prescribed.assign(3 * total, 0.0);
    for (const auto& b : asmb.blocks) {
      if (!b.fixed) continue;
      for (size_t n = 0; n < m.meshes[b.id].nodes.size(); ++n)
        for (int c = 0; c < 3; ++c) m.dof_index[3 * (m.node_offset[b.id] + n) + c] = -1;
    }
    for (const auto& [blk, node] : m.surfaces.sym_x_nodes)
      m.dof_index[3 * (m.node_offset[blk] + node) + 0] = -1;
    for (const auto& [blk, node] : m.surfaces.sym_z_nodes)
      m.dof_index[3 * (m.node_offset[blk] + node) + 2] = -1;

    // elements with at least one free node
    for (const auto& b : asmb.blocks) {
      if (b.fixed) continue;
      const TetMesh& mesh = m.meshes[b.id];
      for (const auto& t : mesh.tets) {
        Eigen::Matrix<double, 3, 4> rc;
        std::array<int, 4> gn{};
        for (int a = 0; a < 4; ++a) {
          gn[a] = m.node_offset[b.id] + t[a];
          rc.col(a) = mesh.nodes[t[a]];
        }
        m.elements.push_back(make_element(gn, rc, m.material));
      }
    }
    m.el_rot.assign(m.elements.size(), Eigen::Matrix3d::Identity());

    // contact runtime per interface surface
    const double h = asmb.spec.height;
    for (size_t s = 0; s < m.surfaces.interfaces.size(); ++s) {
      const auto& surf = m.surfaces.interfaces[s];
      SurfRT rt;
      rt.surf = static_cast<int>(s);
      rt.skip = asmb.blocks[surf.slave_block].fixed && asmb.blocks[surf.master_block].fixed;
      const size_t np = surf.slave_nodes.size();
      rt.kn.resize(np);
      rt.kt.resize(np);
      for (size_t p = 0; p < np; ++p) {
        rt.kn[p] = options.penalty_scale * m.material.youngs_mpa * surf.tributary[p] / h;
        rt.kt[p] = rt.kn[p] * options.kappa_t_ratio;
      }
      rt.T_comm.assign(np, Eigen::Vector3d::Zero());
      rt.slip_comm.assign(np, 0.0);
      rt.pt.assign(np, PointRT{});
      m.surf_rt.push_back(std::move(rt));
    }

    if (options.with_indenter) {
      m.indenter.radius = options.indenter_radius;
      m.indenter.mu = options.indenter_mu;
      m.indenter.center0 = Eigen::Vector3d(0.0, h + options.indenter_radius, 0.0);
      const size_t np = m.surfaces.indenter_nodes.size();
      m.ind_kappa.resize(np);
      for (size_t p = 0; p < np; ++p)
        m.ind_kappa[p] =
            options.penalty_scale * m.material.youngs_mpa * m.surfaces.indenter_tributary[p] / h;
      m.ind_pt.assign(np, PointRT{});
    }

    m.spring_k = options.spring_scale * m.material.youngs_mpa * h;
    m.force_floor = 1e-8 * m.material.youngs_mpa * h * h;
    m.failure_threshold = 1e-6 * m.material.youngs_mpa * h * h;

    m.finalize_dofs();
    m.u = Eigen::VectorXd::Zero(3 * total);
    m.u_comm = m.u;
    m.f_ext_unit = Eigen::VectorXd::Zero(3 * total);
    return m;
  }

  int global_node(int block, int local) const { return node_offset[block] + local; }

  /// Test hook: drive a DOF to target * load_factor (re-runs DOF numbering).
  void prescribe(int block, int local, int comp, double target) {
    const int d = 3 * global_node(block, local) + comp;
    dof_index[d] = -1;
    prescribed[d] = target;
    finalize_dofs();
  }

  void add_external_force(int block, int local, int comp, double value) {
    f_ext_unit[3 * global_node(block, local) + comp] += value;
  }

  /// Register a frictional rigid plane against one face of one block.
  void add_rigid_plane(const RigidPlane& plane, int block, int face_label) {
    PlaneRT rt;
    rt.plane = plane;
    const TetMesh& mesh = meshes[block];
    std::vector<double> trib(mesh.nodes.size(), 0.0);
    for (const auto& f : mesh.boundary)
      if (f.label == face_label) {
        const double a3 = mesh.facet_area(f) / 3.0;
        for (int v : f.n) trib[v] += a3;
      }
    const double h = assembly.spec.height;
    for (size_t n = 0; n < mesh.nodes.size(); ++n) {
      if (trib[n] <= 0.0) continue;
      rt.nodes.push_back(global_node(block, static_cast<int>(n)));
      rt.kn.push_back(opt.penalty_scale * material.youngs_mpa * trib[n] / h);
    }
    rt.kt.resize(rt.kn.size());
    for (size_t p = 0; p < rt.kn.size(); ++p) rt.kt[p] = rt.kn[p] * opt.kappa_t_ratio;
    rt.T_comm.assign(rt.nodes.size(), Eigen::Vector3d::Zero());
    rt.slip_comm.assign(rt.nodes.size(), 0.0);
    rt.pt.assign(rt.nodes.size(), PointRT{});
    plane_rt.push_back(std::move(rt));
  }

  int free_dof_count() const { return num_free; }

  /// Load state: indenter displacement (mm) and the factor scaling prescribed
  /// DOFs / external forces.
  void set_load(double delta, double factor) {
    cur_delta = delta;
    cur_factor = factor;
    for (int d = 0; d < static_cast<int>(dof_index.size()); ++d)
      if (dof_index[d] < 0) u[d] = factor * prescribed[d];
  }

  struct Eval {
    double residual_norm = 0.0;
    double reference_force = 0.0;
    bool ok = true;  ///< false on element inversion
  };

  /// Full residual + contact trial state at the current u / load state.
  Eval evaluate() {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(3 * total_nodes);
    Eval ev;

    for (size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      Eigen::Matrix<double, 3, 4> cur;
      for (int a = 0; a < 4; ++a)
        cur.col(a) = rest[el.nodes[a]] + u.segment<3>(3 * el.nodes[a]);
      const auto rot = element_rotation(el, cur);
      if (!rot.ok) {
        ev.ok = false;
        el_rot[e] = Eigen::Matrix3d::Identity();
        continue;
      }
      el_rot[e] = rot.R;
      const Vector12d fe = element_internal_force(el, cur, rot.R);
      for (int a = 0; a < 4; ++a) r.segment<3>(3 * el.nodes[a]) += fe.segment<3>(3 * a);
    }

    if (spring_k > 0.0) {
      for (const auto& b : assembly.blocks) {
        if (b.fixed) continue;
        const int base = node_offset[b.id];
        for (size_t n = 0; n < meshes[b.id].nodes.size(); ++n)
          r.segment<3>(3 * (base + n)) += spring_k * u.segment<3>(3 * (base + n));
      }
    }

    r -= cur_factor * f_ext_unit;

    double contact_force_sum = 0.0;
    for (auto& rt : surf_rt) {
      if (rt.skip) continue;
      const auto& surf = surfaces.interfaces[rt.surf];
      const TetMesh& mm = meshes[surf.master_block];
      const int mbase = node_offset[surf.master_block];
      const int sbase = node_offset[surf.slave_block];
      const double mu = assembly.spec.friction;
      for (size_t p = 0; p < surf.slave_nodes.size(); ++p) {
        PointRT& pt = rt.pt[p];
        pt = PointRT{};
        const int sn = sbase + surf.slave_nodes[p];
        const Eigen::Vector3d xs = rest[sn] + u.segment<3>(3 * sn);
        int best_facet = -1;
        ContactFrame best_frame;
        double best_metric = std::numeric_limits<double>::max();
        const auto& cands = rt.candidates.empty() ? surf.master_facets : rt.candidates[p];
        for (int fi : cands) {
          const auto& f = mm.boundary[fi];
          Eigen::Vector3d a = rest[mbase + f.n[0]] + u.segment<3>(3 * (mbase + f.n[0]));
          Eigen::Vector3d bb = rest[mbase + f.n[1]] + u.segment<3>(3 * (mbase + f.n[1]));
          Eigen::Vector3d c = rest[mbase + f.n[2]] + u.segment<3>(3 * (mbase + f.n[2]));
          const ContactFrame fr = gap_and_frame(xs, a, bb, c, 1e-4);
          if (!fr.inside) continue;
          const double metric = std::abs(fr.gap);
          if (metric < best_metric) {
            best_metric = metric;
            best_facet = fi;
            best_frame = fr;
          }
        }
        if (best_facet < 0 || best_frame.gap >= 0.0) {
          if (best_facet >= 0) pt.gap = best_frame.gap;
          continue;  // open
        }
        pt.facet = best_facet;
        pt.gap = best_frame.gap;
        pt.normal = best_frame.normal;
        pt.bary = best_frame.bary;
        pt.N = normal_force(pt.gap, rt.kn[p]);
        contact_force_sum += pt.N;

        const auto& f = mm.boundary[best_facet];
        Eigen::Vector3d force = pt.N * pt.normal;
        if (mu > 0.0) {
          const Eigen::Matrix3d pr = Eigen::Matrix3d::Identity() - pt.normal * pt.normal.transpose();
          Eigen::Vector3d dmaster = Eigen::Vector3d::Zero();
          for (int k = 0; k < 3; ++k) {
            const int gm = mbase + f.n[k];
            dmaster += pt.bary[k] * (u.segment<3>(3 * gm) - u_comm.segment<3>(3 * gm));
          }
          const Eigen::Vector3d dslip =
              pr * ((u.segment<3>(3 * sn) - u_comm.segment<3>(3 * sn)) - dmaster);
          ContactPoint seed;
          seed.traction = pr * rt.T_comm[p];
          seed.accumulated_slip = rt.slip_comm[p];
          pt.trial_norm = (seed.traction + rt.kt[p] * dslip).norm();
          const auto upd = friction_update(seed, dslip, pt.N, mu, rt.kt[p]);
          pt.T = upd.point.traction;
          pt.slip_acc = upd.point.accumulated_slip;
          pt.status = upd.point.status;
          pt.diss = upd.dissipation;
          force -= pt.T;  // traction acts slave -> master
        } else {
          pt.status = ContactStatus::stick;
        }
        r.segment<3>(3 * sn) += force;
        for (int k = 0; k < 3; ++k)
          r.segment<3>(3 * (mbase + f.n[k])) -= pt.bary[k] * force;
      }
    }

    if (opt.with_indenter) {
      const int cbase = node_offset[surfaces.central_block];
      for (size_t p = 0; p < surfaces.indenter_nodes.size(); ++p) {
        PointRT& pt = ind_pt[p];
        pt = PointRT{};
        const int gn = cbase + surfaces.indenter_nodes[p];
        const Eigen::Vector3d x = rest[gn] + u.segment<3>(3 * gn);
        const auto [g, n] = indenter_contact(indenter, x, cur_delta);
        pt.gap = g;
        pt.normal = n;
        if (g >= 0.0) continue;
        pt.N = normal_force(g, ind_kappa[p]);
        pt.status = ContactStatus::stick;
        contact_force_sum += pt.N;
        r.segment<3>(3 * gn) += pt.N * n;
      }
    }

    for (auto& rt : plane_rt) {
      for (size_t p = 0; p < rt.nodes.size(); ++p) {
        PointRT& pt = rt.pt[p];
        pt = PointRT{};
        const int gn = rt.nodes[p];
        const Eigen::Vector3d x = rest[gn] + u.segment<3>(3 * gn);
        pt.gap = rt.plane.gap(x);
        pt.normal = rt.plane.normal;
        if (pt.gap >= 0.0) continue;
        pt.N = normal_force(pt.gap, rt.kn[p]);
        contact_force_sum += pt.N;
        Eigen::Vector3d force = pt.N * pt.normal;
        if (rt.plane.mu > 0.0) {
          const Eigen::Matrix3d pr =
              Eigen::Matrix3d::Identity() - pt.normal * pt.normal.transpose();
          const Eigen::Vector3d dslip = pr * (u.segment<3>(3 * gn) - u_comm.segment<3>(3 * gn));
          ContactPoint seed;
          seed.traction = pr * rt.T_comm[p];
          seed.accumulated_slip = rt.slip_comm[p];
          pt.trial_norm = (seed.traction + rt.kt[p] * dslip).norm();
          const auto upd = friction_update(seed, dslip, pt.N, rt.plane.mu, rt.kt[p]);
          pt.T = upd.point.traction;
          pt.slip_acc = upd.point.accumulated_slip;
          pt.status = upd.point.status;
          pt.diss = upd.dissipation;
          force -= pt.T;
        } else {
          pt.status = ContactStatus::stick;
        }
        r.segment<3>(3 * gn) += force;
      }
    }

    ev.residual_norm = reduced_norm(r);
    ev.reference_force = std::max(contact_force_sum, force_floor);
    last_residual = std::move(r);
    return ev;
  }

  /// Symmetric approximate tangent at the last evaluate() state.
  Eigen::SparseMatrix<double> tangent() const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(elements.size() * 80 + 4096);
    auto add = [&](int gd_r, int gd_c, double v) {
      const int fr = dof_index[gd_r], fc = dof_index[gd_c];
      if (fr >= 0 && fc >= 0) trip.emplace_back(fr, fc, v);
    };

    for (size_t e = 0; e < elements.size(); ++e) {
      const Element& el = elements[e];
      const Matrix12d k = element_stiffness(el, el_rot[e]);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              add(3 * el.nodes[a] + i, 3 * el.nodes[b] + j, k(3 * a + i, 3 * b + j));
    }

    if (spring_k > 0.0) {
      for (const auto& b : assembly.blocks) {
        if (b.fixed) continue;
        const int base = node_offset[b.id];
        for (size_t n = 0; n < meshes[b.id].nodes.size(); ++n)
          for (int c = 0; c < 3; ++c)
            add(3 * (base + n) + c, 3 * (base + n) + c, spring_k);
      }
    }

    auto add_rank_one = [&](const std::vector<int>& gnodes, const std::vector<double>& w,
                            const Eigen::Vector3d& dir, double kappa) {
      // K += kappa * (d d^T), d = w_i * dir on node i
      for (size_t a = 0; a < gnodes.size(); ++a)
        for (size_t b = 0; b < gnodes.size(); ++b)
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
              add(3 * gnodes[a] + i, 3 * gnodes[b] + j,
                  kappa * w[a] * w[b] * dir[i] * dir[j]);
    };

    for (const auto& rt : surf_rt) {
      if (rt.skip) continue;
      const auto& surf = surfaces.interfaces[rt.surf];
      const TetMesh& mm = meshes[surf.master_block];
      const int mbase = node_offset[surf.master_block];
      const int sbase = node_offset[surf.slave_block];
      for (size_t p = 0; p < surf.slave_nodes.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        if (pt.facet < 0) continue;
        const auto& f = mm.boundary[pt.facet];
        const std::vector<int> gn = {sbase + surf.slave_nodes[p], mbase + f.n[0],
                                     mbase + f.n[1], mbase + f.n[2]};
        const std::vector<double> w = {1.0, -pt.bary[0], -pt.bary[1], -pt.bary[2]};
        add_rank_one(gn, w, pt.normal, rt.kn[p]);
        if (assembly.spec.friction > 0.0 && pt.status != ContactStatus::open) {
          double keff = rt.kt[p];
          if (pt.status == ContactStatus::slip && pt.trial_norm > 0.0)
            keff *= std::min(1.0, assembly.spec.friction * pt.N / pt.trial_norm);
          const Eigen::Vector3d seed = std::abs(pt.normal.x()) < 0.9
                                           ? Eigen::Vector3d::UnitX()
                                           : Eigen::Vector3d::UnitY();
          const Eigen::Vector3d t1 = (seed - seed.dot(pt.normal) * pt.normal).normalized();
          const Eigen::Vector3d t2 = pt.normal.cross(t1);
          add_rank_one(gn, w, t1, keff);
          add_rank_one(gn, w, t2, keff);
        }
      }
    }

    if (opt.with_indenter) {
      const int cbase = node_offset[surfaces.central_block];
      for (size_t p = 0; p < surfaces.indenter_nodes.size(); ++p) {
        const PointRT& pt = ind_pt[p];
        if (pt.N <= 0.0) continue;
        const std::vector<int> gn = {cbase + surfaces.indenter_nodes[p]};
        const std::vector<double> w = {1.0};
        add_rank_one(gn, w, pt.normal, ind_kappa[p]);
      }
    }

    for (const auto& rt : plane_rt) {
      for (size_t p = 0; p < rt.nodes.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        if (pt.N <= 0.0) continue;
        const std::vector<int> gn = {rt.nodes[p]};
        const std::vector<double> w = {1.0};
        add_rank_one(gn, w, pt.normal, rt.kn[p]);
        if (rt.plane.mu > 0.0 && pt.status != ContactStatus::open) {
          double keff = rt.kt[p];
          if (pt.status == ContactStatus::slip && pt.trial_norm > 0.0)
            keff *= std::min(1.0, rt.plane.mu * pt.N / pt.trial_norm);
          const Eigen::Vector3d seed = std::abs(pt.normal.x()) < 0.9
                                           ? Eigen::Vector3d::UnitX()
                                           : Eigen::Vector3d::UnitY();
          const Eigen::Vector3d t1 = (seed - seed.dot(pt.normal) * pt.normal).normalized();
          const Eigen::Vector3d t2 = pt.normal.cross(t1);
          add_rank_one(gn, w, t1, keff);
          add_rank_one(gn, w, t2, keff);
        }
      }
    }

    Eigen::SparseMatrix<double> k(num_free, num_free);
    k.setFromTriplets(trip.begin(), trip.end());
    return k;
  }

  /// Broadphase from the last committed configuration.
  void begin_increment() {
    const double cutoff = 2.0 * assembly.spec.amplitude + assembly.spec.height / 10.0;
    for (auto& rt : surf_rt) {
      if (rt.skip) continue;
      const auto& surf = surfaces.interfaces[rt.surf];
      const TetMesh& mm = meshes[surf.master_block];
      const int mbase = node_offset[surf.master_block];
      const int sbase = node_offset[surf.slave_block];
      std::vector<Eigen::Vector3d> pts(surf.slave_nodes.size());
      for (size_t p = 0; p < pts.size(); ++p) {
        const int gn = sbase + surf.slave_nodes[p];
        pts[p] = rest[gn] + u_comm.segment<3>(3 * gn);
      }
      std::vector<FacetRef> facets(surf.master_facets.size());
      for (size_t i = 0; i < facets.size(); ++i) {
        const auto& f = mm.boundary[surf.master_facets[i]];
        facets[i].id = surf.master_facets[i];
        facets[i].a = rest[mbase + f.n[0]] + u_comm.segment<3>(3 * (mbase + f.n[0]));
        facets[i].b = rest[mbase + f.n[1]] + u_comm.segment<3>(3 * (mbase + f.n[1]));
        facets[i].c = rest[mbase + f.n[2]] + u_comm.segment<3>(3 * (mbase + f.n[2]));
      }
      const auto cand = broadphase(pts, facets, cutoff);
      rt.candidates.assign(pts.size(), {});
      for (size_t p = 0; p < pts.size(); ++p)
        for (int ci : cand[p]) rt.candidates[p].push_back(facets[ci].id);
    }
  }

  /// Accept the current iterate: friction states, dissipation, displacement.
  void commit() {
    for (auto& rt : surf_rt) {
      for (size_t p = 0; p < rt.pt.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        if (pt.facet >= 0 || pt.N > 0.0) {
          rt.T_comm[p] = pt.T;
          rt.slip_comm[p] = pt.slip_acc;
          dissipation_total += pt.diss;
        } else {
          rt.T_comm[p].setZero();
        }
      }
    }
    for (auto& rt : plane_rt) {
      for (size_t p = 0; p < rt.pt.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        if (pt.N > 0.0) {
          rt.T_comm[p] = pt.T;
          rt.slip_comm[p] = pt.slip_acc;
          dissipation_total += pt.diss;
        } else {
          rt.T_comm[p].setZero();
        }
      }
    }
    u_comm = u;
  }

  void restore_committed() { u = u_comm; }

  double strain_energy() const {
    double e = 0.0;
    for (size_t i = 0; i < elements.size(); ++i) {
      const Element& el = elements[i];
      Eigen::Matrix<double, 3, 4> cur;
      for (int a = 0; a < 4; ++a)
        cur.col(a) = rest[el.nodes[a]] + u.segment<3>(3 * el.nodes[a]);
      const auto rot = element_rotation(el, cur);
      if (rot.ok) e += element_strain_energy(el, cur, rot.R);
    }
    return e;
  }

  /// Penalty + grounding-spring stored energy at the current trial state.
  double penalty_energy() const {
    double e = 0.0;
    for (size_t s = 0; s < surf_rt.size(); ++s) {
      const auto& rt = surf_rt[s];
      for (size_t p = 0; p < rt.pt.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        if (pt.N > 0.0) e += 0.5 * pt.N * pt.N / rt.kn[p] + 0.5 * pt.T.squaredNorm() / rt.kt[p];
      }
    }
    for (size_t p = 0; p < ind_pt.size(); ++p)
      if (ind_pt[p].N > 0.0) e += 0.5 * ind_pt[p].N * ind_pt[p].N / ind_kappa[p];
    for (const auto& rt : plane_rt)
      for (size_t p = 0; p < rt.pt.size(); ++p)
        if (rt.pt[p].N > 0.0)
          e += 0.5 * rt.pt[p].N * rt.pt[p].N / rt.kn[p] +
               0.5 * rt.pt[p].T.squaredNorm() / rt.kt[p];
    if (spring_k > 0.0) {
      for (const auto& b : assembly.blocks) {
        if (b.fixed) continue;
        const int base = node_offset[b.id];
        for (size_t n = 0; n < meshes[b.id].nodes.size(); ++n)
          e += 0.5 * spring_k * u.segment<3>(3 * (base + n)).squaredNorm();
      }
    }
    return e;
  }

  double frictional_dissipation() const { return dissipation_total; }

  /// Vertical indenter reaction, scaled to the full structure.
  double indenter_force_y() const {
    double fy = 0.0;
    for (const auto& pt : ind_pt)
      if (pt.N > 0.0) fy -= pt.N * pt.normal.y();
    return fy * assembly.sym_factor();
  }

  ContactSummary contact_summary() const {
    ContactSummary s;
    s.indenter_force_y = indenter_force_y();
    int pid = 0;
    for (size_t i = 0; i < surf_rt.size(); ++i) {
      const auto& rt = surf_rt[i];
      const auto& surf = surfaces.interfaces[rt.surf];
      InterfaceResultant res;
      res.interface_id = surf.plan_id;
      for (size_t p = 0; p < rt.pt.size(); ++p) {
        const PointRT& pt = rt.pt[p];
        StickSlipRecord rec;
        rec.point_id = pid++;
        rec.block_a = assembly.blocks[surf.slave_block].id;
        rec.block_b = assembly.blocks[surf.master_block].id;
        const int gn = node_offset[surf.slave_block] + surf.slave_nodes[p];
        rec.position = rest[gn] + u.segment<3>(3 * gn);
        rec.normal = pt.N;
        rec.tangential = pt.T.norm();
        rec.status = pt.N > 0.0 ? pt.status : ContactStatus::open;
        if (rec.status == ContactStatus::open) ++res.open;
        else if (rec.status == ContactStatus::slip) ++res.slip;
        else ++res.stick;
        res.normal_sum += pt.N;
        res.tangential_sum += rec.tangential;
        s.points.push_back(rec);
      }
      s.interfaces.push_back(res);
    }
    return s;
  }

  /// Resultants on the central block's interfaces, full-structure equivalent.
  std::vector<double> central_interface_resultants(const ContactSummary& s) const {
    std::vector<double> out;
    const double scale = assembly.quarter ? 2.0 : 1.0;
    for (const auto& res : s.interfaces) {
      const auto& plan = assembly.interfaces[res.interface_id];
      if (plan.block_a == assembly.central_id || plan.block_b == assembly.central_id)
        out.push_back(res.normal_sum * scale);
    }
    return out;
  }

  /// Stick/slip/open census over the central block's interface points.
  std::array<int, 3> central_point_census(const ContactSummary& s) const {
    std::array<int, 3> census{0, 0, 0};  // stick, slip, open
    for (size_t i = 0; i < s.interfaces.size(); ++i) {
      const auto& plan = assembly.interfaces[s.interfaces[i].interface_id];
      if (plan.block_a != assembly.central_id && plan.block_b != assembly.central_id) continue;
      census[0] += s.interfaces[i].stick;
      census[1] += s.interfaces[i].slip;
      census[2] += s.interfaces[i].open;
    }
    return census;
  }

  double failure_threshold_force() const { return failure_threshold; }
  double reference_floor() const { return force_floor; }

  /// Min scaled Jacobian over deformed active elements (distortion flag).
  double deformed_quality() const {
    double worst = 1.0;
    static constexpr int kCorner[4][3] = {{1, 2, 3}, {2, 0, 3}, {0, 1, 3}, {0, 2, 1}};
    for (const auto& el : elements) {
      for (int c = 0; c < 4; ++c) {
        Eigen::Matrix3d j;
        const Eigen::Vector3d o = rest[el.nodes[c]] + u.segment<3>(3 * el.nodes[c]);
        for (int k = 0; k < 3; ++k) {
          const int n = el.nodes[kCorner[c][k]];
          j.col(k) = rest[n] + u.segment<3>(3 * n) - o;
        }
        const double den = j.col(0).norm() * j.col(1).norm() * j.col(2).norm();
        worst = std::min(worst, den > 0.0 ? j.determinant() / den : 0.0);
      }
    }
    return worst;
  }

  Eigen::VectorXd reduced(const Eigen::VectorXd& full) const {
    Eigen::VectorXd out(num_free);
    for (int d = 0; d < static_cast<int>(dof_index.size()); ++d)
      if (dof_index[d] >= 0) out[dof_index[d]] = full[d];
    return out;
  }

  void apply_step(const Eigen::VectorXd& step_free, double alpha) {
    for (int d = 0; d < static_cast<int>(dof_index.size()); ++d)
      if (dof_index[d] >= 0) u[d] += alpha * step_free[dof_index[d]];
  }

  const Eigen::VectorXd& last_full_residual() const { return last_residual; }
  const Eigen::VectorXd& displacements() const { return u; }
  Eigen::VectorXd& displacements() { return u; }
  const std::vector<Eigen::Vector3d>& rest_positions() const { return rest; }
  double current_delta() const { return cur_delta; }

private:
  struct PointRT {
    int facet = -1;
    double gap = 0.0, N = 0.0;
    Eigen::Vector3d normal = Eigen::Vector3d::UnitY();
    Eigen::Vector3d bary = Eigen::Vector3d::Zero();
    Eigen::Vector3d T = Eigen::Vector3d::Zero();
    double trial_norm = 0.0;
    double slip_acc = 0.0;
    double diss = 0.0;
    ContactStatus status = ContactStatus::open;
  };

  struct SurfRT {
    int surf = -1;
    bool skip = false;
    std::vector<double> kn, kt;
    std::vector<Eigen::Vector3d> T_comm;
    std::vector<double> slip_comm;
    std::vector<PointRT> pt;
    std::vector<std::vector<int>> candidates;
  };

  struct PlaneRT {
    RigidPlane plane;
    std::vector<int> nodes;
    std::vector<double> kn, kt;
    std::vector<Eigen::Vector3d> T_comm;
    std::vector<double> slip_comm;
    std::vector<PointRT> pt;
  };

  void finalize_dofs() {
    num_free = 0;
    for (int d = 0; d < static_cast<int>(dof_index.size()); ++d)
      if (dof_index[d] >= 0) dof_index[d] = num_free++;
  }

  double reduced_norm(const Eigen::VectorXd& full) const {
    double s = 0.0;
    for (int d = 0; d < static_cast<int>(dof_index.size()); ++d)
      if (dof_index[d] >= 0) s += full[d] * full[d];
    return std::sqrt(s);
  }

  std::vector<int> node_offset;
  int total_nodes = 0;
  std::vector<Eigen::Vector3d> rest;
  std::vector<Element> elements;
  std::vector<Eigen::Matrix3d> el_rot;
  std::vector<int> dof_index;
  std::vector<double> prescribed;
  int num_free = 0;
  Eigen::VectorXd u, u_comm, f_ext_unit;
  Eigen::VectorXd last_residual;
  std::vector<SurfRT> surf_rt;
  std::vector<PlaneRT> plane_rt;
  std::vector<PointRT> ind_pt;
  std::vector<double> ind_kappa;
  double spring_k = 0.0;
  double force_floor = 0.0;
  double failure_threshold = 0.0;
  double cur_delta = 0.0;
  double cur_factor = 0.0;
  double dissipation_total = 0.0;
};

}  // namespace tis
