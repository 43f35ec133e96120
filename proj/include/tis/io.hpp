#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tis/analysis.hpp"
#include "tis/config.hpp"
#include "tis/meshing.hpp"
#include "tis/model.hpp"
#include "tis/solver.hpp"

namespace tis {

namespace io {

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline constexpr const char* kHistoryHeader =
    "step,delta_mm,delta_over_h,Fy_N,Fy_norm,E_strain,D_fric,E_pen,failed";

/// Streaming, crash-safe history writer: header once, one flushed line per
/// accepted increment.
class HistoryWriter {
public:
  HistoryWriter(const std::string& path, double height, double force_scale_n)
      : out_(path, std::ios::trunc), height_(height), fscale_(force_scale_n) {
    out_ << kHistoryHeader << "\n";
    out_.flush();
  }

  void write(const HistoryRow& r) {
    out_ << r.step << ',' << fmt(r.delta) << ',' << fmt(r.delta / height_) << ',' << fmt(r.fy)
         << ',' << fmt(r.fy / fscale_) << ',' << fmt(r.e_strain) << ',' << fmt(r.d_fric) << ','
         << fmt(r.e_pen) << ',' << (r.failed ? 1 : 0) << "\n";
    out_.flush();
  }

private:
  std::ofstream out_;
  double height_, fscale_;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

/// Read a history CSV back into rows (energies included; census columns are
/// not on disk and stay zero).
inline std::vector<HistoryRow> read_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open history: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty history: " + path);
  if (line.rfind("step,", 0) != 0)
    throw std::runtime_error("malformed history header in " + path);
  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw std::runtime_error("malformed history row in " + path);
    HistoryRow r;
    r.step = std::stoi(f[0]);
    r.delta = std::stod(f[1]);
    r.fy = std::stod(f[3]);
    r.e_strain = std::stod(f[5]);
    r.d_fric = std::stod(f[6]);
    r.e_pen = std::stod(f[7]);
    r.failed = f[8] == "1";
    rows.push_back(r);
  }
  return rows;
}

inline constexpr const char* kSummaryHeader =
    "config_hash,n,A_mm,theta_bar_deg,mu,s,Fmax_N,Fmax_norm,U_J,U_norm,delta_ult_over_h,"
    "failure_mode";

struct SummaryRow {
  std::string config_hash;
  int oscillations = 0;
  double amplitude = 0.0;
  double theta_deg = 0.0;
  double mu = 0.0;
  double top_slope = 0.0;
  RunSummary summary;
};

inline void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  out << kSummaryHeader << "\n";
  for (const auto& r : rows) {
    out << r.config_hash << ',' << r.oscillations << ',' << fmt(r.amplitude) << ','
        << fmt(r.theta_deg) << ',' << fmt(r.mu) << ',' << fmt(r.top_slope) << ','
        << fmt(r.summary.f_max) << ',' << fmt(r.summary.f_max_norm) << ','
        << fmt(r.summary.work * 1e-3) << ',' << fmt(r.summary.work_norm) << ','
        << fmt(r.summary.delta_ult_over_h) << ',' << to_string(r.summary.mode) << "\n";
  }
}

inline void write_collapse_csv(const std::string& path, const std::vector<CollapsePoint>& pts) {
  std::ofstream out(path, std::ios::trunc);
  out << "s,U_norm,F_norm,n,A_mm\n";
  for (const auto& p : pts)
    out << fmt(p.top_slope) << ',' << fmt(p.work_norm) << ',' << fmt(p.f_max_norm) << ','
        << p.oscillations << ',' << fmt(p.amplitude) << "\n";
}

inline void write_stickslip_csv(const std::string& path, const ContactSummary& s) {
  std::ofstream out(path, std::ios::trunc);
  out << "point_id,block_a,block_b,x,y,z,status,N,T\n";
  for (const auto& p : s.points)
    out << p.point_id << ',' << p.block_a << ',' << p.block_b << ',' << fmt(p.position.x()) << ','
        << fmt(p.position.y()) << ',' << fmt(p.position.z()) << ',' << to_string(p.status) << ','
        << fmt(p.normal) << ',' << fmt(p.tangential) << "\n";
}

/// Legacy ASCII VTK unstructured grid of the whole model in its deformed
/// configuration, with block id and minimum principal stress per cell.
inline void write_vtk(const std::string& path, const SimModel& model) {
  std::ofstream out(path, std::ios::trunc);
  out << "# vtk DataFile Version 2.0\n"
      << "tis snapshot\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const auto& u = model.displacements();
  size_t total_nodes = 0, total_tets = 0;
  std::vector<int> offsets(model.meshes.size(), 0);
  for (size_t b = 0; b < model.meshes.size(); ++b) {
    offsets[b] = static_cast<int>(total_nodes);
    total_nodes += model.meshes[b].nodes.size();
    total_tets += model.meshes[b].tets.size();
  }
  out << "POINTS " << total_nodes << " double\n";
  for (size_t b = 0; b < model.meshes.size(); ++b) {
    const int base = model.global_node(static_cast<int>(b), 0);
    for (size_t n = 0; n < model.meshes[b].nodes.size(); ++n) {
      const Eigen::Vector3d p =
          model.meshes[b].nodes[n] + u.segment<3>(3 * (base + static_cast<int>(n)));
      out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << "\n";
    }
  }
  out << "CELLS " << total_tets << ' ' << 5 * total_tets << "\n";
  for (size_t b = 0; b < model.meshes.size(); ++b)
    for (const auto& t : model.meshes[b].tets)
      out << "4 " << offsets[b] + t[0] << ' ' << offsets[b] + t[1] << ' ' << offsets[b] + t[2]
          << ' ' << offsets[b] + t[3] << "\n";
  out << "CELL_TYPES " << total_tets << "\n";
  for (size_t i = 0; i < total_tets; ++i) out << "10\n";

  out << "CELL_DATA " << total_tets << "\n";
  out << "SCALARS block_id int 1\nLOOKUP_TABLE default\n";
  for (size_t b = 0; b < model.meshes.size(); ++b)
    for (size_t i = 0; i < model.meshes[b].tets.size(); ++i) out << b << "\n";

  out << "SCALARS min_principal_stress double 1\nLOOKUP_TABLE default\n";
  for (size_t b = 0; b < model.meshes.size(); ++b) {
    const TetMesh& mesh = model.meshes[b];
    const bool fixed = model.assembly.blocks[b].fixed;
    const int base = model.global_node(static_cast<int>(b), 0);
    FemMesh fem;
    if (!fixed) fem = FemMesh::build(mesh, model.material);
    Eigen::VectorXd ub = Eigen::VectorXd::Zero(3 * mesh.nodes.size());
    if (!fixed)
      for (size_t n = 0; n < mesh.nodes.size(); ++n)
        ub.segment<3>(3 * n) = u.segment<3>(3 * (base + static_cast<int>(n)));
    if (fixed) {
      for (size_t i = 0; i < mesh.tets.size(); ++i) out << "0\n";
    } else {
      const auto principal = fem.recover_stress(ub);
      for (const auto& p : principal) out << fmt(p[0]) << "\n";
    }
  }
}

/// ASCII STL of a block solid's boundary (triangulated via the mesher).
inline void write_stl(const std::string& path, const BlockSolid& solid, int density = 8) {
  const TetMesh mesh = mesh_block(solid, density);
  std::ofstream out(path, std::ios::trunc);
  out << "solid block\n";
  for (const auto& f : mesh.boundary) {
    const Eigen::Vector3d n = mesh.facet_normal(f);
    out << "  facet normal " << fmt(n.x()) << ' ' << fmt(n.y()) << ' ' << fmt(n.z()) << "\n"
        << "    outer loop\n";
    for (int v : f.n) {
      const Eigen::Vector3d& p = mesh.nodes[v];
      out << "      vertex " << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << "\n";
    }
    out << "    endloop\n  endfacet\n";
  }
  out << "endsolid block\n";
}

inline void write_manifest(const std::string& path, const ResolvedRun& run,
                           const std::map<std::string, std::string>& extra) {
  std::ofstream out(path, std::ios::trunc);
  out << "version=" << kVersion << "\n";
  out << "id=" << run.id << "\n";
  out << "seedless=" << (run.cfg.seedless ? 1 : 0) << "\n";
  out << run.cfg.canonical_text();
  for (const auto& [k, v] : extra) out << k << '=' << v << "\n";
}

inline std::map<std::string, std::string> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace io

}  // namespace tis
