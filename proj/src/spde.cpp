#include "ldp/spde.hpp"

#include <cmath>

#include "ldp/rng.hpp"

namespace ldp {

namespace {
constexpr double kBlowUpThreshold = 1e8;

PathResult simulate_one_path(const ModelSpec& model, const SimParams& params,
                             const ControlPair& control, const GalerkinState& x0,
                             int path_index) {
  const int n = model.n_modes();
  const int K = params.grid.steps;
  const double dt = params.grid.dt();
  const double eps = params.eps;
  const double theta = 1.0 / eps;

  auto diag = drift_stiff_diag(model);
  std::vector<double> efac(n), pfac(n), nfac(n);
  for (int k = 0; k < n; ++k) {
    efac[k] = std::exp(diag[k] * dt);
    pfac[k] = phi1(diag[k] * dt) * dt;
    nfac[k] = pfac[k] / dt;  // noise goes through the same linear channel as forcing
  }

  RngStream rng_w(params.seed, 2ull * static_cast<uint64_t>(path_index));
  RngStream rng_j(params.seed, 2ull * static_cast<uint64_t>(path_index) + 1ull);

  PathResult res;
  std::vector<JumpRecord> jumps;
  double tilt_comp = 0.0;  // theta * int int (phi - 1) d nu dt
  if (model.has_jumps()) {
    const JumpMeasureSpec& nu = *model.jump_measure;
    double bound = control.g.cols > 0 ? control.max_g() : 1.0;
    auto phi = grid_control(nu, control.g, params.grid);
    jumps = sample_controlled_prm(nu, phi, bound, theta, params.grid.t_final, rng_j);
    for (int m = 0; m < K; ++m)
      for (int i = 0; i < control.g.cols; ++i)
        tilt_comp += (control.g(m, i) - 1.0) * nu.mark_mass(i) * dt;
    tilt_comp *= theta;
  }
  res.n_jumps = static_cast<long>(jumps.size());

  Trajectory traj;
  traj.times.resize(K + 1);
  traj.states.reserve(K + 1);
  traj.v_norms.resize(K + 1);
  traj.states.push_back(x0);
  traj.times[0] = 0.0;
  traj.v_norms[0] = norm(x0, NormKind::V);

  GalerkinState u = x0;
  GalerkinState w_dir = zero_state(x0.basis);
  double log_weight = tilt_comp;
  size_t jptr = 0;
  const double sqrt_eps = std::sqrt(eps);
  std::vector<double> zero_row(std::max(1, model.jump_control_dims()), 0.0);

  for (int m = 0; m < K; ++m) {
    double t_mid = params.grid.node(m) + 0.5 * dt;
    GalerkinState force = apply_drift_nonstiff(model, t_mid, u);
    for (int k = 0; k < n; ++k) w_dir.coeffs[k] = control.f(m, k);
    GalerkinState bpsi = apply_diffusion(model, t_mid, u, w_dir);
    GalerkinState jplain = zero_state(x0.basis);
    if (model.has_jumps()) {
      // raw-measure form: the compensators collapse to -int gamma d nu
      jplain = jump_compensation(model, t_mid, u, zero_row.data());
    }
    // Wiener increment and Girsanov pairing with the control
    double psi_dw = 0.0, psi_sq = 0.0;
    for (int k = 0; k < n; ++k) {
      double dw = std::sqrt(dt) * rng_w.normal();
      w_dir.coeffs[k] = dw;
      psi_dw += control.f(m, k) * dw;
      psi_sq += control.f(m, k) * control.f(m, k);
    }
    GalerkinState bdw = apply_diffusion(model, t_mid, u, w_dir);
    log_weight += -psi_dw / sqrt_eps - 0.5 * psi_sq * dt / eps;

    GalerkinState next = zero_state(x0.basis);
    for (int k = 0; k < n; ++k) {
      next.coeffs[k] = efac[k] * u.coeffs[k] +
                       pfac[k] * (force.coeffs[k] + bpsi.coeffs[k] + jplain.coeffs[k]) +
                       nfac[k] * sqrt_eps * bdw.coeffs[k];
    }
    // jumps in (t_m, t_{m+1}] applied at the next node, left limit as argument
    double t_hi = params.grid.node(m + 1);
    while (jptr < jumps.size() && jumps[jptr].time <= t_hi) {
      const JumpRecord& jr = jumps[jptr];
      double s = jump_s_factor(model, next);
      next.coeffs[model.jump.direction_mode] += eps * jump_amp(model, jr.mark) * s;
      int cell = static_cast<int>(jr.time / dt);
      if (cell >= K) cell = K - 1;
      double phi_val = control.g.cols > 0 ? control.g(cell, jr.mark_index) : 1.0;
      log_weight += -std::log(phi_val);
      ++jptr;
    }

    bool finite = true;
    double h2 = 0.0;
    for (double c : next.coeffs) {
      if (!std::isfinite(c)) {
        finite = false;
        break;
      }
      h2 += c * c;
    }
    if (!finite || h2 > kBlowUpThreshold * kBlowUpThreshold) {
      res.blown_up = true;
      res.blowup_time = t_hi;
      for (int mm = m; mm < K; ++mm) {
        traj.states.push_back(u);
        traj.times[mm + 1] = params.grid.node(mm + 1);
        traj.v_norms[mm + 1] = traj.v_norms[mm];
      }
      break;
    }
    u = next;
    traj.states.push_back(u);
    traj.times[m + 1] = t_hi;
    traj.v_norms[m + 1] = norm(u, NormKind::V);
  }

  res.traj = std::move(traj);
  res.log_weight = log_weight;
  if (params.store_jumps) res.jumps = std::move(jumps);
  return res;
}

}  // namespace

void for_each_controlled_path(const ModelSpec& model, const SimParams& params,
                              const ControlPair& control, const GalerkinState& x0,
                              const PathObserver& observer) {
  params.validate();
  if (control.f.rows != params.grid.steps || control.f.cols != model.n_modes())
    throw ParameterError("for_each_controlled_path: f control misaligned with grid");
  if (model.has_jumps() && control.g.cols != model.jump_control_dims())
    throw ParameterError("for_each_controlled_path: g control misaligned with mark space");
  for (double v : control.g.data)
    if (v < 0.0) throw ParameterError("for_each_controlled_path: negative jump control");
  parallel_for(
      params.n_paths,
      [&](int i) { observer(i, simulate_one_path(model, params, control, x0, i)); },
      params.threads);
}

PathEnsemble simulate_controlled_spde(const ModelSpec& model, const SimParams& params,
                                      const ControlPair& control, const GalerkinState& x0) {
  PathEnsemble ens;
  ens.eps = params.eps;
  ens.paths.resize(params.n_paths);
  for_each_controlled_path(model, params, control, x0,
                           [&](int i, PathResult&& p) { ens.paths[i] = std::move(p); });
  return ens;
}

PathEnsemble simulate_spde(const ModelSpec& model, const SimParams& params,
                           const GalerkinState& x0) {
  ControlPair null = null_control(params.grid, model.n_modes(), model.jump_control_dims());
  return simulate_controlled_spde(model, params, null, x0);
}

MomentEstimate moment_estimate(const PathEnsemble& ens, double p, double beta) {
  if (p < 2.0) throw ParameterError("moment_estimate: p must be >= 2");
  MomentEstimate est;
  double s1 = 0.0, s2 = 0.0, v1 = 0.0, v2 = 0.0;
  long count = 0;
  for (const auto& path : ens.paths) {
    if (path.blown_up) {
      est.excluded += 1;
      continue;
    }
    double sup_h = 0.0;
    double v_int = 0.0;
    int K = path.traj.n_nodes() - 1;
    double dt = K > 0 ? path.traj.times[1] - path.traj.times[0] : 0.0;
    for (int m = 0; m <= K; ++m) {
      double h = norm(path.traj.states[m], NormKind::H);
      sup_h = std::max(sup_h, h);
      if (m < K) v_int += std::pow(h, p - 2.0) * std::pow(path.traj.v_norms[m], beta) * dt;
    }
    double sp = std::pow(sup_h, p);
    s1 += sp;
    s2 += sp * sp;
    v1 += v_int;
    v2 += v_int * v_int;
    ++count;
  }
  if (count == 0) throw ParameterError("moment_estimate: every path was excluded");
  double n = static_cast<double>(count);
  est.sup_moment = s1 / n;
  est.v_moment = v1 / n;
  if (count > 1) {
    est.sup_stderr = std::sqrt(std::max(0.0, (s2 / n - est.sup_moment * est.sup_moment) / (n - 1)));
    est.v_stderr = std::sqrt(std::max(0.0, (v2 / n - est.v_moment * est.v_moment) / (n - 1)));
  }
  return est;
}

std::vector<Condition2Row> condition2_experiment(const ModelSpec& model,
                                                 const std::vector<double>& eps_list,
                                                 const std::vector<ControlPair>& q_eps,
                                                 const ControlPair& q, const GalerkinState& x0,
                                                 const TimeGrid& grid, int n_paths, uint64_t seed,
                                                 int threads) {
  if (eps_list.size() != q_eps.size())
    throw ParameterError("condition2_experiment: eps list and control list differ in length");
  Trajectory skel = solve_skeleton(model, q, x0, grid);
  std::vector<Condition2Row> rows;
  for (size_t e = 0; e < eps_list.size(); ++e) {
    SimParams params;
    params.eps = eps_list[e];
    params.grid = grid;
    params.n_paths = n_paths;
    params.seed = seed + e;
    params.threads = threads;
    std::vector<double> sq(n_paths, 0.0);
    std::vector<char> bad(n_paths, 0);
    for_each_controlled_path(model, params, q_eps[e], x0, [&](int i, PathResult&& p) {
      if (p.blown_up) {
        bad[i] = 1;
        return;
      }
      double d = sup_h_distance(p.traj, skel);
      sq[i] = d * d;
    });
    Condition2Row row;
    row.eps = eps_list[e];
    double s1 = 0.0, s2 = 0.0;
    long count = 0;
    for (int i = 0; i < n_paths; ++i) {
      if (bad[i]) {
        row.blowups += 1;
        continue;
      }
      s1 += sq[i];
      s2 += sq[i] * sq[i];
      ++count;
    }
    double n = static_cast<double>(std::max<long>(count, 1));
    row.mean_sq_sup_err = s1 / n;
    if (count > 1)
      row.std_err =
          std::sqrt(std::max(0.0, (s2 / n - row.mean_sq_sup_err * row.mean_sq_sup_err) / (n - 1)));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ldp
