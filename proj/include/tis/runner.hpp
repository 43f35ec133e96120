#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tis/analysis.hpp"
#include "tis/config.hpp"
#include "tis/io.hpp"
#include "tis/model.hpp"
#include "tis/solver.hpp"

namespace tis {

namespace fs = std::filesystem;

struct RunResult {
  std::string id;
  bool completed = false;   ///< artifacts written
  bool fatal = false;       ///< solver aborted without converging
  std::string error;
};

inline fs::path run_dir(const fs::path& root, const std::string& id) {
  return root / "runs" / id;
}

/// Execute one resolved run: stream history to CSV, drop VTK + stick/slip
/// snapshots at the requested delta/h stations, and write the manifest.
inline RunResult run_one(const ResolvedRun& run, const fs::path& root, bool quiet = true) {
  RunResult rr;
  rr.id = run.id;
  try {
    const fs::path dir = run_dir(root, run.id);
    fs::create_directories(dir);

    Assembly asmb = build_assembly(run.cfg.assembly_spec());
    if (run.cfg.quarter) asmb = quarter_model(asmb).assembly;
    SimModel model = SimModel::build(asmb, run.cfg.model_options());
    const LoadSchedule sched = run.cfg.schedule();

    const double h = run.cfg.height;
    const double fscale = force_scale(run.cfg.youngs_mpa(), h, run.cfg.panel_side);
    io::HistoryWriter writer((dir / "history.csv").string(), h, fscale);

    std::vector<double> stations = run.cfg.snapshots;
    std::sort(stations.begin(), stations.end());
    size_t next_station = 0;

    auto on_sample = [&](const SimModel& m, const HistoryRow& row) {
      writer.write(row);
      while (next_station < stations.size() && row.delta / h >= stations[next_station] - 1e-12) {
        std::ostringstream tag;
        tag << "snapshot_" << next_station;
        io::write_vtk((dir / (tag.str() + ".vtk")).string(), m);
        io::write_stickslip_csv((dir / (tag.str() + "_stickslip.csv")).string(),
                                m.contact_summary());
        ++next_station;
      }
    };

    const RunHistory hist = run_quasistatic(model, sched, on_sample);

    std::map<std::string, std::string> extra;
    extra["termination"] = to_string(hist.termination);
    extra["final_central_slip_fraction"] = io::fmt(hist.final_central_slip_fraction());
    extra["distorted_increments"] = std::to_string(hist.distorted_increments);
    extra["samples"] = std::to_string(hist.rows.size());
    extra["status"] = hist.nonconverged() ? "fatal" : "completed";
    io::write_manifest((dir / "manifest.txt").string(), run, extra);

    rr.completed = true;
    rr.fatal = hist.nonconverged();
    if (!quiet)
      std::cerr << "[run " << run.id << "] " << to_string(hist.termination) << ", "
                << hist.rows.size() << " samples\n";
  } catch (const std::exception& e) {
    rr.error = e.what();
    if (!quiet) std::cerr << "[run " << run.id << "] error: " << rr.error << "\n";
  }
  return rr;
}

struct AggregatedRun {
  std::string id;
  ExperimentConfig cfg;  ///< partially reconstructed from the manifest
  std::vector<HistoryRow> rows;
  Termination termination = Termination::reached_delta_max;
  double final_slip_fraction = 0.0;
};

inline bool load_aggregated(const fs::path& dir, AggregatedRun& out, std::string* err) {
  try {
    const auto mf = io::read_manifest((dir / "manifest.txt").string());
    out.id = mf.count("id") ? mf.at("id") : dir.filename().string();
    auto getd = [&](const char* k, double dflt) {
      return mf.count(k) ? std::stod(mf.at(k)) : dflt;
    };
    out.cfg.grid = mf.count("grid") ? std::stoi(mf.at("grid")) : 5;
    out.cfg.panel_side = getd("L", 50.0);
    out.cfg.block_length = getd("l", 0.0);
    out.cfg.height = getd("h", 3.18);
    out.cfg.youngs_pa = getd("E", 18.7e9);
    out.cfg.poisson = getd("nu", 0.2);
    out.cfg.friction = getd("mu", 0.23);
    out.cfg.amplitude = getd("profile.amplitude", 0.0);
    out.cfg.oscillations =
        mf.count("profile.oscillations") ? std::stoi(mf.at("profile.oscillations")) : 1;
    out.cfg.avg_inclination_deg = getd("profile.avg_inclination_deg", 0.0);
    const std::string term = mf.count("termination") ? mf.at("termination") : "";
    if (term == "failed_interlock") out.termination = Termination::failed_interlock;
    else if (term == "fatal_nonconvergence") out.termination = Termination::fatal_nonconvergence;
    else out.termination = Termination::reached_delta_max;
    out.final_slip_fraction = getd("final_central_slip_fraction", 0.0);
    out.rows = io::read_history((dir / "history.csv").string());
    return true;
  } catch (const std::exception& e) {
    if (err) *err = e.what();
    return false;
  }
}

/// Top slope s uses the spec's plan-length convention (s = 4nA/l).
inline double sweep_top_slope(const ExperimentConfig& cfg) {
  if (cfg.amplitude == 0.0) return 0.0;
  const double l = cfg.block_length == 0.0 ? cfg.panel_side / (cfg.grid + 1) : cfg.block_length;
  SurfaceProfile metric{cfg.amplitude, cfg.oscillations, cfg.avg_inclination_deg, cfg.phase, l};
  return morphology_metrics(metric).top_slope;
}

inline RunHistory history_shim(const AggregatedRun& run) {
  RunHistory h;
  h.rows = run.rows;
  h.termination = run.termination;
  return h;
}

/// Rebuild every aggregate table from the per-run artifacts on disk.
/// Idempotent; malformed run directories are reported and skipped.
inline int aggregate(const fs::path& root, const std::string& reference_csv = "",
                     std::ostream& log = std::cerr) {
  std::vector<AggregatedRun> runs;
  const fs::path rdir = root / "runs";
  if (fs::exists(rdir)) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(rdir))
      if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      AggregatedRun ar;
      std::string err;
      if (load_aggregated(d, ar, &err))
        runs.push_back(std::move(ar));
      else
        log << "[post] skipping " << d << ": " << err << "\n";
    }
  }

  std::vector<io::SummaryRow> summary;
  std::vector<CollapsePoint> collapse;
  std::vector<std::pair<double, double>> planar_fu, wavy_fu;
  for (const auto& run : runs) {
    const double e_mpa = run.cfg.youngs_mpa();
    LoadDeflectionCurve curve;
    curve.youngs_mpa = e_mpa;
    curve.height = run.cfg.height;
    curve.panel_side = run.cfg.panel_side;
    for (const auto& r : run.rows) curve.samples.emplace_back(r.delta, r.fy);
    if (curve.samples.size() < 2) continue;
    RunHistory hist = history_shim(run);
    RunSummary rs = summarize_run(curve, hist);
    if (hist.nonconverged())
      rs.mode = FailureMode::non_converged;
    else if (run.final_slip_fraction > 0.5)
      rs.mode = FailureMode::sliding;
    else
      rs.mode = FailureMode::hinging_detachment;

    io::SummaryRow row;
    row.config_hash = run.id;
    row.oscillations = run.cfg.oscillations;
    row.amplitude = run.cfg.amplitude;
    row.theta_deg = run.cfg.avg_inclination_deg;
    row.mu = run.cfg.friction;
    row.top_slope = sweep_top_slope(run.cfg);
    row.summary = rs;
    summary.push_back(row);

    if (run.cfg.amplitude > 0.0) {
      CollapsePoint cp;
      cp.top_slope = row.top_slope;
      cp.work_norm = rs.work_norm;
      cp.f_max_norm = rs.f_max_norm;
      cp.oscillations = run.cfg.oscillations;
      cp.amplitude = run.cfg.amplitude;
      collapse.push_back(cp);
      wavy_fu.emplace_back(rs.f_max_norm, rs.work_norm);
    } else {
      planar_fu.emplace_back(rs.f_max_norm, rs.work_norm);
    }
  }

  std::sort(summary.begin(), summary.end(), [](const io::SummaryRow& a, const io::SummaryRow& b) {
    return std::tie(a.oscillations, a.amplitude, a.theta_deg, a.mu, a.config_hash) <
           std::tie(b.oscillations, b.amplitude, b.theta_deg, b.mu, b.config_hash);
  });
  io::write_summary_csv((root / "summary.csv").string(), summary);

  if (collapse.size() >= 2)
    io::write_collapse_csv((root / "collapse.csv").string(), collapse_sweep(collapse));

  // Fig 3c style scatter plus per-family scaling fits
  {
    std::ofstream out(root / "fig3c.csv", std::ios::trunc);
    out << "family,Fmax_norm,U_norm,n,A_mm,mu\n";
    for (const auto& r : summary)
      out << (r.amplitude > 0.0 ? "wavy" : "planar") << ',' << io::fmt(r.summary.f_max_norm)
          << ',' << io::fmt(r.summary.work_norm) << ',' << r.oscillations << ','
          << io::fmt(r.amplitude) << ',' << io::fmt(r.mu) << "\n";

    std::ofstream sc(root / "scaling.csv", std::ios::trunc);
    sc << "family,exponent,points_used,excluded,max_abs_residual_log\n";
    for (const auto& [name, data] :
         std::vector<std::pair<std::string, const std::vector<std::pair<double, double>>*>>{
             {"planar", &planar_fu}, {"wavy", &wavy_fu}}) {
      if (data->size() < 3) continue;
      try {
        const auto fit = scaling_relation(*data);
        sc << name << ',' << io::fmt(fit.exponent) << ',' << fit.used << ',' << fit.excluded
           << ',' << io::fmt(fit.max_abs_residual) << "\n";
      } catch (const std::exception& e) {
        log << "[post] scaling fit (" << name << ") skipped: " << e.what() << "\n";
      }
    }
  }

  // Fig 4a-d style tables
  {
    std::ofstream a(root / "fig4a.csv", std::ios::trunc);
    std::ofstream b(root / "fig4b.csv", std::ios::trunc);
    std::ofstream c(root / "fig4c.csv", std::ios::trunc);
    std::ofstream d(root / "fig4d.csv", std::ios::trunc);
    a << "lambda_quarter_mm,U_norm,n,A_mm\n";
    b << "A_mm,U_norm,n\n";
    c << "s,U_norm,n,A_mm\n";
    d << "s,Fmax_norm,n,A_mm\n";
    for (const auto& r : summary) {
      if (r.amplitude <= 0.0) continue;
      const double lam_quarter = r.top_slope > 0.0 ? r.amplitude / r.top_slope : 0.0;
      a << io::fmt(lam_quarter) << ',' << io::fmt(r.summary.work_norm) << ',' << r.oscillations
        << ',' << io::fmt(r.amplitude) << "\n";
      b << io::fmt(r.amplitude) << ',' << io::fmt(r.summary.work_norm) << ',' << r.oscillations
        << "\n";
      c << io::fmt(r.top_slope) << ',' << io::fmt(r.summary.work_norm) << ',' << r.oscillations
        << ',' << io::fmt(r.amplitude) << "\n";
      d << io::fmt(r.top_slope) << ',' << io::fmt(r.summary.f_max_norm) << ',' << r.oscillations
        << ',' << io::fmt(r.amplitude) << "\n";
    }
  }

  // Fig 7 style long-format curves per oscillation family
  for (int n : {2, 3, 4}) {
    std::ofstream out(root / ("fig7_n" + std::to_string(n) + ".csv"), std::ios::trunc);
    out << "run_id,A_mm,delta_over_h,Fy_norm\n";
    for (const auto& run : runs) {
      if (run.cfg.amplitude <= 0.0 || run.cfg.oscillations != n) continue;
      const double fs = force_scale(run.cfg.youngs_mpa(), run.cfg.height, run.cfg.panel_side);
      for (const auto& r : run.rows)
        out << run.id << ',' << io::fmt(run.cfg.amplitude) << ','
            << io::fmt(r.delta / run.cfg.height) << ',' << io::fmt(r.fy / fs) << "\n";
    }
  }

  // optional external reference overlay (digitized curves)
  if (!reference_csv.empty()) {
    std::ofstream out(root / "reference_overlay.csv", std::ios::trunc);
    out << "source,delta_over_h,Fy_norm\n";
    std::ifstream in(reference_csv);
    if (!in) {
      log << "[post] cannot open reference csv: " << reference_csv << "\n";
    } else {
      std::string line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = io::split_csv_line(line);
        if (f.size() < 2) continue;
        try {
          const double x = std::stod(f[0]), y = std::stod(f[1]);
          out << "external," << io::fmt(x) << ',' << io::fmt(y) << "\n";
        } catch (...) {
          if (lineno > 1) log << "[post] reference row " << lineno << " skipped\n";
        }
      }
    }
    for (const auto& run : runs) {
      if (run.cfg.amplitude != 0.0) continue;
      const double fs = force_scale(run.cfg.youngs_mpa(), run.cfg.height, run.cfg.panel_side);
      for (const auto& r : run.rows)
        out << "simulated," << io::fmt(r.delta / run.cfg.height) << ',' << io::fmt(r.fy / fs)
            << "\n";
    }
  }
  return 0;
}

/// `run` command: one configuration, optionally selected by id from the
/// expanded grid.
inline int cmd_run(const ExperimentConfig& cfg, const fs::path& root, const std::string& id = "",
                   std::ostream& log = std::cerr) {
  const auto runs = expand_runs(cfg);
  const ResolvedRun* chosen = nullptr;
  if (id.empty()) {
    chosen = &runs.front();
  } else {
    for (const auto& r : runs)
      if (r.id == id) chosen = &r;
    if (!chosen) {
      log << "unknown run id '" << id << "'; available ids:\n";
      for (const auto& r : runs) log << "  " << r.id << "\n";
      return 3;
    }
  }
  const RunResult rr = run_one(*chosen, root, false);
  if (!rr.error.empty()) {
    log << "run failed: " << rr.error << "\n";
    return 3;
  }
  return rr.fatal ? 3 : 0;
}

/// `sweep` command: all grid runs (parallel across runs, resumable), then
/// aggregation. Exit 0 on full success, 2 on partial.
inline int cmd_sweep(const ExperimentConfig& cfg, const fs::path& root, int jobs = 0,
                     std::ostream& log = std::cerr) {
  const auto runs = expand_runs(cfg);
  std::vector<const ResolvedRun*> todo;
  int skipped = 0;
  for (const auto& r : runs) {
    const fs::path mf = run_dir(root, r.id) / "manifest.txt";
    bool done = false;
    if (fs::exists(mf)) {
      try {
        const auto m = io::read_manifest(mf.string());
        done = m.count("status") && m.at("status") == "completed" && m.count("id") &&
               m.at("id") == r.id;
      } catch (...) {
        done = false;
      }
    }
    if (done) ++skipped;
    else todo.push_back(&r);
  }
  log << "[sweep] " << runs.size() << " runs (" << skipped << " already complete, " << todo.size()
      << " to do)\n";

  std::vector<RunResult> results(todo.size());
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= todo.size()) break;
      results[i] = run_one(*todo[i], root, false);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  int failures = 0;
  for (const auto& rr : results) {
    if (!rr.error.empty() || rr.fatal) {
      ++failures;
      log << "[sweep] run " << rr.id << (rr.fatal ? " fatal non-convergence" : " failed") << " "
          << rr.error << "\n";
    }
  }
  aggregate(root, "", log);
  return failures == 0 ? 0 : 2;
}

/// `post` command: re-aggregate an output directory, optionally overlaying a
/// digitized reference curve.
inline int cmd_post(const fs::path& root, const std::string& reference_csv = "",
                    std::ostream& log = std::cerr) {
  return aggregate(root, reference_csv, log);
}

}  // namespace tis
