#pragma once

#include <span>
#include <string>
#include <vector>

#include "ldp/models.hpp"
#include "ldp/util.hpp"

namespace ldp {

/// Control pair p = (f, g): an H_n-valued forcing control and a nonnegative
/// jump-intensity control, both piecewise constant on the solver time grid
/// (rows = time cells; f cols = modes, g cols = mark slots).
struct ControlPair {
  Matrix f;
  Matrix g;
  double budget = 0.0;

  bool f_is_null() const;
  bool g_is_null() const;  // g == 1 everywhere (or no mark slots)
  double max_g() const;
};

ControlPair null_control(const TimeGrid& grid, int n_modes, int mark_dims);

/// 1/2 int |f|_H^2 dt.
double gaussian_cost(const ControlPair& control, const TimeGrid& grid);
/// int ell(g) d nu dt (exact for piecewise-constant g).
double jump_cost(const ControlPair& control, const JumpMeasureSpec& nu, const TimeGrid& grid);

struct Trajectory {
  std::vector<double> times;
  std::vector<GalerkinState> states;
  std::vector<double> v_norms;

  int n_nodes() const { return static_cast<int>(times.size()); }
  const GalerkinState& terminal() const { return states.back(); }
};

double sup_h_distance(const Trajectory& a, const Trajectory& b);

/// Semi-implicit time stepping for the controlled deterministic equation:
/// the stiff diagonal goes through an exact per-mode integrating factor, the
/// nonlinear drift, B f and the jump-compensation integral are explicit.
Trajectory solve_skeleton(const ModelSpec& model, const ControlPair& control,
                          const GalerkinState& x0, const TimeGrid& grid);

struct EnergyAudit {
  double lhs = 0.0;      // sup |Y|_H^2 + 2 L_A int |Y|_V^beta dt
  double rhs = 0.0;      // Gronwall bound from the declared profiles and control costs
  double sup_h_sq = 0.0;
  double v_integral = 0.0;
  bool pass = false;
};

/// Evaluates the explicit a-priori bound for a computed trajectory;
/// passes when lhs <= rhs * (1 + tol).
EnergyAudit energy_audit(const Trajectory& traj, const ModelSpec& model,
                         const ControlPair& control, const TimeGrid& grid, double tol = 0.05);

/// Solves the skeleton for each control in `sequence` and for `limit`,
/// returning sup-H errors against the limit solution.
std::vector<double> continuity_experiment(const ModelSpec& model,
                                          std::span<const ControlPair> sequence,
                                          const ControlPair& limit, const GalerkinState& x0,
                                          const TimeGrid& grid);

/// Trajectory CSV: t, c_1..c_n, norm_H, norm_V.
std::string trajectory_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& csv, std::shared_ptr<const Basis> basis);

}  // namespace ldp
