#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ldp/skeleton.hpp"

namespace ldp {

/// ell(r) = r ln r - r + 1 (continuous extension ell(0) = 1).
double ell(double r);

/// Full control cost: 1/2 int |f|_H^2 dt + int ell(g) d nu dt.
double control_cost(const ControlPair& control, const JumpMeasureSpec& nu, const TimeGrid& grid);
/// Same when the model carries no jump component.
double control_cost(const ControlPair& control, const TimeGrid& grid);

enum class TargetKind { TerminalPoint, TerminalHalfspace, FullPath };

/// Event / endpoint defining membership in the constraint set of the rate
/// minimization, and the events measured by the experiments module.
struct TargetSpec {
  TargetKind kind = TargetKind::TerminalPoint;
  std::vector<double> point;      // terminal point coefficients (TerminalPoint)
  std::vector<double> direction;  // halfspace normal (TerminalHalfspace)
  double level = 0.0;             // halfspace threshold
  double tol = 1e-3;
  std::vector<std::vector<double>> path;  // node-indexed coefficients (FullPath)

  static TargetSpec terminal_point(std::vector<double> y, double tol);
  static TargetSpec terminal_halfspace(std::vector<double> dir, double level);
  static TargetSpec full_path(std::vector<std::vector<double>> path, double tol);
};

/// Distance-to-target of a trajectory (0 when the constraint holds).
double target_residual(const TargetSpec& target, const Trajectory& traj);
/// Whether a trajectory realizes the event.
bool target_hit(const TargetSpec& target, const Trajectory& traj);

struct RateEstimate {
  double value = 0.0;
  ControlPair minimizer;
  double constraint_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  bool likely_infeasible = false;
};

struct MinimizeOptions {
  double mu0 = 10.0;
  double mu_factor = 10.0;
  int outer_rounds = 5;
  int max_inner_iterations = 120;
  double fd_step = 1e-5;
  int initializations = 3;
  uint64_t seed = 2024;
  bool optimize_jump_control = true;
  int threads = 0;
};

/// Penalized minimization of the control cost subject to the skeleton hitting
/// the target: quasi-Newton (L-BFGS) on the flattened control vector with
/// finite-difference gradients; jump control parameterized as g = exp(u).
RateEstimate minimize_rate(const ModelSpec& model, const TargetSpec& target,
                           const GalerkinState& x0, const TimeGrid& grid,
                           const MinimizeOptions& opts = {});

/// Independent rate value for linear drift + additive diffusion: inverts the
/// solver's per-step linear map to recover the unique control reproducing the
/// given path and prices it. Returns +inf when a mode with zero sigma is
/// excited. Reduces to 1/2 int |(phi' - D phi)/sigma|^2 dt.
double gaussian_rate_oracle(const ModelSpec& model, const Trajectory& phi);

/// Exact gradient of 1/2 int |f|^2 dt + mu * |Y(T) - y|_H^2 for linear drift
/// and additive diffusion (adjoint of the discrete step map); used as a
/// cross-check of the finite-difference gradients.
std::vector<double> linear_adjoint_gradient(const ModelSpec& model, const TargetSpec& target,
                                            const GalerkinState& x0, const TimeGrid& grid,
                                            const ControlPair& control, double mu);

}  // namespace ldp
