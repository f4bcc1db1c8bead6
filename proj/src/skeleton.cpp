#include "ldp/skeleton.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ldp/rate.hpp"

namespace ldp {

namespace {
constexpr double kBlowUpThreshold = 1e8;
}

bool ControlPair::f_is_null() const {
  for (double v : f.data)
    if (v != 0.0) return false;
  return true;
}

bool ControlPair::g_is_null() const {
  for (double v : g.data)
    if (v != 1.0) return false;
  return true;
}

double ControlPair::max_g() const {
  double m = 0.0;
  for (double v : g.data) m = std::max(m, v);
  return m;
}

ControlPair null_control(const TimeGrid& grid, int n_modes, int mark_dims) {
  ControlPair c;
  c.f = Matrix(grid.steps, n_modes, 0.0);
  c.g = Matrix(grid.steps, mark_dims, 1.0);
  c.budget = 0.0;
  return c;
}

double gaussian_cost(const ControlPair& control, const TimeGrid& grid) {
  if (control.f.rows != grid.steps)
    throw DimensionError("gaussian_cost: control grid does not match time grid");
  double dt = grid.dt();
  double acc = 0.0;
  for (int m = 0; m < control.f.rows; ++m)
    for (int k = 0; k < control.f.cols; ++k) acc += control.f(m, k) * control.f(m, k);
  return 0.5 * acc * dt;
}

double jump_cost(const ControlPair& control, const JumpMeasureSpec& nu, const TimeGrid& grid) {
  if (control.g.cols == 0) return 0.0;
  if (control.g.rows != grid.steps || control.g.cols != nu.control_dims())
    throw DimensionError("jump_cost: control grid does not match time grid / mark space");
  double dt = grid.dt();
  double acc = 0.0;
  for (int m = 0; m < control.g.rows; ++m)
    for (int i = 0; i < control.g.cols; ++i)
      acc += ell(control.g(m, i)) * nu.mark_mass(i) * dt;
  return acc;
}

double sup_h_distance(const Trajectory& a, const Trajectory& b) {
  if (a.n_nodes() != b.n_nodes()) throw DimensionError("sup_h_distance: grids differ");
  double worst = 0.0;
  for (int m = 0; m < a.n_nodes(); ++m) {
    double acc = 0.0;
    for (int k = 0; k < a.states[m].n_modes(); ++k) {
      double d = a.states[m].coeffs[k] - b.states[m].coeffs[k];
      acc += d * d;
    }
    worst = std::max(worst, acc);
  }
  return std::sqrt(worst);
}

Trajectory solve_skeleton(const ModelSpec& model, const ControlPair& control,
                          const GalerkinState& x0, const TimeGrid& grid) {
  const int n = model.n_modes();
  const int K = grid.steps;
  if (!x0.basis->compatible_with(*model.basis))
    throw DimensionError("solve_skeleton: initial state basis does not match model");
  if (control.f.rows != K || control.f.cols != n)
    throw ParameterError("solve_skeleton: f control grid misaligned with solver grid");
  if (model.has_jumps() && control.g.cols != model.jump_control_dims())
    throw ParameterError("solve_skeleton: g control grid misaligned with mark space");
  if (control.g.cols > 0 && control.g.rows != K)
    throw ParameterError("solve_skeleton: g control grid misaligned with solver grid");
  if (!all_finite(x0)) throw InvalidStateError("solve_skeleton: non-finite initial state");

  const double dt = grid.dt();
  auto diag = drift_stiff_diag(model);
  std::vector<double> efac(n), pfac(n);
  for (int k = 0; k < n; ++k) {
    efac[k] = std::exp(diag[k] * dt);
    pfac[k] = phi1(diag[k] * dt) * dt;
  }

  Trajectory traj;
  traj.times.resize(K + 1);
  traj.states.reserve(K + 1);
  traj.v_norms.resize(K + 1);
  traj.states.push_back(x0);
  traj.times[0] = 0.0;
  traj.v_norms[0] = norm(x0, NormKind::V);

  GalerkinState u = x0;
  GalerkinState w_dir = zero_state(x0.basis);
  for (int m = 0; m < K; ++m) {
    double t_mid = grid.node(m) + 0.5 * dt;
    GalerkinState force = apply_drift_nonstiff(model, t_mid, u);
    // B(u) f_m
    for (int k = 0; k < n; ++k) w_dir.coeffs[k] = control.f(m, k);
    GalerkinState bf = apply_diffusion(model, t_mid, u, w_dir);
    const double* g_row = (model.has_jumps() && control.g.cols > 0) ? control.g.row(m) : nullptr;
    GalerkinState jc = jump_compensation(model, t_mid, u, g_row);
    GalerkinState next = zero_state(x0.basis);
    for (int k = 0; k < n; ++k) {
      next.coeffs[k] =
          efac[k] * u.coeffs[k] + pfac[k] * (force.coeffs[k] + bf.coeffs[k] + jc.coeffs[k]);
    }
    double h2 = 0.0;
    for (double c : next.coeffs) {
      if (!std::isfinite(c)) throw BlowUpError("skeleton state lost finiteness", grid.node(m + 1));
      h2 += c * c;
    }
    if (h2 > kBlowUpThreshold * kBlowUpThreshold)
      throw BlowUpError("skeleton state exceeded the blow-up threshold", grid.node(m + 1));
    u = next;
    traj.states.push_back(u);
    traj.times[m + 1] = grid.node(m + 1);
    traj.v_norms[m + 1] = norm(u, NormKind::V);
  }
  return traj;
}

EnergyAudit energy_audit(const Trajectory& traj, const ModelSpec& model,
                         const ControlPair& control, const TimeGrid& grid, double tol) {
  EnergyAudit audit;
  const double dt = grid.dt();
  double sup_h2 = 0.0;
  double v_int = 0.0;
  for (int m = 0; m < traj.n_nodes(); ++m) {
    double h = norm(traj.states[m], NormKind::H);
    sup_h2 = std::max(sup_h2, h * h);
    if (m < traj.n_nodes() - 1) v_int += std::pow(traj.v_norms[m], model.beta) * dt;
  }
  audit.sup_h_sq = sup_h2;
  audit.v_integral = v_int;
  audit.lhs = sup_h2 + 2.0 * model.l_a * v_int;

  double h0 = norm(traj.states.front(), NormKind::H);
  double base = 0.0, expo = 0.0;
  for (int m = 0; m < grid.steps; ++m) {
    double f2 = 0.0;
    for (int k = 0; k < control.f.cols; ++k) f2 += control.f(m, k) * control.f(m, k);
    const double* g_row = control.g.cols > 0 ? control.g.row(m) : nullptr;
    double jg = l_gamma_g_integral(model, g_row);
    base += (2.0 * model.a_const + model.b_const + f2 + 2.0 * jg) * dt;
    expo += (model.a_const + model.b_const + f2 + jg) * dt;
  }
  audit.rhs = (h0 * h0 + base) * std::exp(4.0 * expo);
  audit.pass = audit.lhs <= audit.rhs * (1.0 + tol);
  return audit;
}

std::vector<double> continuity_experiment(const ModelSpec& model,
                                          std::span<const ControlPair> sequence,
                                          const ControlPair& limit, const GalerkinState& x0,
                                          const TimeGrid& grid) {
  Trajectory ref = solve_skeleton(model, limit, x0, grid);
  std::vector<double> errs;
  errs.reserve(sequence.size());
  for (const auto& p : sequence) {
    Trajectory t = solve_skeleton(model, p, x0, grid);
    errs.push_back(sup_h_distance(t, ref));
  }
  return errs;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  int n = traj.states.empty() ? 0 : traj.states.front().n_modes();
  out << "t";
  for (int k = 1; k <= n; ++k) out << ",c_" << k;
  out << ",norm_H,norm_V\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << sep;
  };
  for (int m = 0; m < traj.n_nodes(); ++m) {
    put(traj.times[m], ',');
    for (int k = 0; k < n; ++k) put(traj.states[m].coeffs[k], ',');
    put(norm(traj.states[m], NormKind::H), ',');
    std::snprintf(buf, sizeof(buf), "%.17g", traj.v_norms[m]);
    out << buf << "\n";
  }
  return out.str();
}

Trajectory trajectory_from_csv(const std::string& csv, std::shared_ptr<const Basis> basis) {
  Trajectory traj;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("trajectory_from_csv: empty input");
  int n = basis->n_modes();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != n + 3)
      throw ParameterError("trajectory_from_csv: wrong column count");
    traj.times.push_back(vals[0]);
    std::vector<double> coeffs(vals.begin() + 1, vals.begin() + 1 + n);
    traj.states.push_back(make_state(basis, std::move(coeffs)));
    traj.v_norms.push_back(vals[n + 2]);
  }
  return traj;
}

}  // namespace ldp
