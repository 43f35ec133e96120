#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "tis/model.hpp"

namespace tis {

/// Displacement-driven schedule. Increments are in mm of indenter travel;
/// with force_mode the indenter is ignored and increments are load-factor
/// steps of the external force / prescribed displacements (t in [0,1]).
struct LoadSchedule {
  double delta_max = 0.0;        ///< mm; default set from 3h by callers
  double initial_increment = 0.0;
  double min_increment = 0.0;
  double max_increment = 0.0;
  int max_newton_iterations = 30;
  double residual_tolerance = 1e-6;
  int grow_after = 3;
  double grow_factor = 1.5;
  double step_clamp = 0.0;  ///< mm per Newton step, 0 = auto
  bool force_mode = false;

  static LoadSchedule defaults(double height) {
    LoadSchedule s;
    s.delta_max = 3.0 * height;
    s.initial_increment = height / 200.0;
    s.min_increment = height / 20000.0;
    s.max_increment = height / 60.0;
    return s;
  }

  void validate(double height) const {
    if (delta_max < 0.0) throw std::invalid_argument("LoadSchedule: delta_max must be >= 0");
    if (delta_max > 3.5 * height)
      throw std::invalid_argument("LoadSchedule: delta_max exceeds 3.5h envelope");
    if (delta_max > 0.0 || force_mode) {
      if (!(min_increment > 0.0 && min_increment <= initial_increment &&
            initial_increment <= max_increment))
        throw std::invalid_argument("LoadSchedule: need 0 < min <= initial <= max increment");
    }
    if (max_newton_iterations < 1 || !(residual_tolerance > 0.0))
      throw std::invalid_argument("LoadSchedule: bad Newton settings");
  }
};

enum class Termination { reached_delta_max, failed_interlock, fatal_nonconvergence };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::reached_delta_max: return "reached_delta_max";
    case Termination::failed_interlock: return "failed_interlock";
    case Termination::fatal_nonconvergence: return "fatal_nonconvergence";
  }
  return "?";
}

struct HistoryRow {
  int step = 0;
  double delta = 0.0;     ///< mm
  double fy = 0.0;        ///< N, full-structure equivalent
  double e_strain = 0.0;  ///< N*mm
  double d_fric = 0.0;    ///< N*mm, cumulative
  double e_pen = 0.0;     ///< N*mm
  bool failed = false;
  bool distorted = false;
  int central_stick = 0, central_slip = 0, central_open = 0;
};

struct RunHistory {
  std::vector<HistoryRow> rows;
  Termination termination = Termination::reached_delta_max;
  int distorted_increments = 0;

  bool nonconverged() const { return termination == Termination::fatal_nonconvergence; }
  double final_central_slip_fraction() const {
    if (rows.empty()) return 0.0;
    const auto& r = rows.back();
    const int loaded = r.central_stick + r.central_slip;
    return loaded > 0 ? static_cast<double>(r.central_slip) / loaded : 0.0;
  }
};

/// True iff every central-block interface resultant dropped below the
/// detachment threshold (1e-6 E h^2). Callers gate this on the structure
/// having carried load, so the rest state does not read as failure.
inline bool check_failure(const SimModel& model, const ContactSummary& summary) {
  const auto res = model.central_interface_resultants(summary);
  if (res.empty()) return false;
  for (double r : res)
    if (r >= model.failure_threshold_force()) return false;
  return true;
}

struct AttemptResult {
  bool converged = false;
  bool inverted = false;
  int iterations = 0;
  std::vector<double> residuals;  ///< per-iteration norms, for convergence tests
};

/// One Newton solve at the given load state. Leaves the model at the iterate
/// it reached; the caller commits or restores.
inline AttemptResult solve_increment(SimModel& model, const LoadSchedule& sched, double delta,
                                     double factor) {
  AttemptResult out;
  model.set_load(delta, factor);
  double clamp = sched.step_clamp;
  if (clamp <= 0.0) {
    clamp = model.assembly.spec.height / 10.0;
    if (model.assembly.spec.amplitude > 0.0)
      clamp = std::min(clamp, model.assembly.spec.height /
                                  (8.0 * model.assembly.spec.oscillations));
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  for (int it = 0; it <= sched.max_newton_iterations; ++it) {
    const auto ev = model.evaluate();
    out.iterations = it;
    out.residuals.push_back(ev.residual_norm);
    if (!ev.ok) {
      out.inverted = true;
      return out;
    }
    if (ev.residual_norm <= sched.residual_tolerance * ev.reference_force) {
      out.converged = true;
      return out;
    }
    if (it == sched.max_newton_iterations) break;

    ldlt.compute(model.tangent());
    if (ldlt.info() != Eigen::Success) return out;
    const Eigen::VectorXd rhs = -model.reduced(model.last_full_residual());
    const Eigen::VectorXd step = ldlt.solve(rhs);
    if (!step.allFinite()) return out;

    double alpha = 1.0;
    const double mx = step.lpNorm<Eigen::Infinity>();
    if (mx > clamp) alpha = clamp / mx;

    // backtracking on the residual norm; keep the best trial seen
    const Eigen::VectorXd u_backup = model.displacements();
    double best_alpha = alpha, best_norm = -1.0;
    double a = alpha;
    for (int ls = 0; ls < 6; ++ls) {
      model.displacements() = u_backup;
      model.apply_step(step, a);
      const auto trial = model.evaluate();
      if (trial.ok && (best_norm < 0.0 || trial.residual_norm < best_norm)) {
        best_norm = trial.residual_norm;
        best_alpha = a;
      }
      if (trial.ok && trial.residual_norm < ev.residual_norm) break;
      a *= 0.5;
    }
    model.displacements() = u_backup;
    model.apply_step(step, best_alpha);
  }
  return out;
}

/// Advance the load from zero to delta_max (or t=1 in force mode) with
/// adaptive increments: halve on divergence, grow 1.5x after consecutive
/// fast converges, abort when the increment pinches below the minimum.
inline RunHistory run_quasistatic(
    SimModel& model, const LoadSchedule& sched,
    const std::function<void(const SimModel&, const HistoryRow&)>& on_sample = nullptr) {
  const double h = model.assembly.spec.height;
  sched.validate(h);
  RunHistory hist;

  auto record = [&](int step, double delta, bool failed) {
    const auto summary = model.contact_summary();
    const auto census = model.central_point_census(summary);
    HistoryRow row;
    row.step = step;
    row.delta = delta;
    row.fy = summary.indenter_force_y;
    row.e_strain = model.strain_energy();
    row.d_fric = model.frictional_dissipation();
    row.e_pen = model.penalty_energy();
    row.failed = failed;
    const double q = model.deformed_quality();
    row.distorted = q < model.opt.quality_floor;
    if (row.distorted) ++hist.distorted_increments;
    row.central_stick = census[0];
    row.central_slip = census[1];
    row.central_open = census[2];
    hist.rows.push_back(row);
    if (on_sample) on_sample(model, row);
    return row;
  };

  // rest state
  model.set_load(0.0, 0.0);
  model.begin_increment();
  model.evaluate();
  model.commit();
  record(0, 0.0, false);

  const bool driving = sched.delta_max > 0.0 || sched.force_mode;
  if (!driving) return hist;

  const double total = sched.force_mode ? 1.0 : sched.delta_max;
  double t = 0.0;
  double inc = sched.initial_increment / (sched.force_mode ? 1.0 : 1.0);
  int step = 0;
  int fast_streak = 0;
  double fy_peak = 0.0;
  const double engage = 10.0 * model.failure_threshold_force();

  while (t < total - 1e-12 * total) {
    const double t_new = std::min(total, t + inc);
    model.begin_increment();
    const double delta = sched.force_mode ? 0.0 : t_new;
    const double factor = sched.force_mode ? t_new : (sched.delta_max > 0 ? t_new / sched.delta_max : 0.0);
    const auto attempt = solve_increment(model, sched, delta, factor);

    if (!attempt.converged) {
      model.restore_committed();
      inc *= 0.5;
      fast_streak = 0;
      if (inc < sched.min_increment * (1.0 - 1e-12)) {
        hist.termination = Termination::fatal_nonconvergence;
        return hist;
      }
      continue;
    }

    model.commit();
    t = t_new;
    ++step;
    const auto summary = model.contact_summary();
    fy_peak = std::max(fy_peak, summary.indenter_force_y);
    const bool engaged = fy_peak > engage;
    const bool failed = model.opt.with_indenter && engaged && check_failure(model, summary);
    record(step, sched.force_mode ? t_new : t_new, failed);
    if (failed) {
      hist.termination = Termination::failed_interlock;
      return hist;
    }

    if (attempt.iterations <= 5) {
      if (++fast_streak >= sched.grow_after) {
        inc = std::min(inc * sched.grow_factor, sched.max_increment);
        fast_streak = 0;
      }
    } else {
      fast_streak = 0;
    }
  }
  hist.termination = Termination::reached_delta_max;
  return hist;
}

struct EnergyAudit {
  struct Row {
    double delta = 0.0;
    double w_ext = 0.0;
    double internal_sum = 0.0;  ///< strain + dissipation + penalty
    double imbalance_rel = 0.0;
  };
  std::vector<Row> rows;
  double max_imbalance_rel = 0.0;
  bool warn = false;  ///< imbalance beyond 5%
};

/// External work (trapezoid over the recorded curve) against stored +
/// dissipated energy, per increment and cumulative.
inline EnergyAudit energy_audit(const RunHistory& hist) {
  EnergyAudit audit;
  double w = 0.0;
  for (size_t i = 0; i < hist.rows.size(); ++i) {
    const auto& r = hist.rows[i];
    if (i > 0) {
      const auto& q = hist.rows[i - 1];
      w += 0.5 * (r.fy + q.fy) * (r.delta - q.delta);
    }
    EnergyAudit::Row row;
    row.delta = r.delta;
    row.w_ext = w;
    row.internal_sum = r.e_strain + r.d_fric + r.e_pen;
    if (w > 1e-9)
      row.imbalance_rel = std::abs(w - row.internal_sum) / w;
    audit.rows.push_back(row);
    audit.max_imbalance_rel = std::max(audit.max_imbalance_rel, row.imbalance_rel);
  }
  audit.warn = audit.max_imbalance_rel > 0.05;
  return audit;
}

}  // namespace tis
