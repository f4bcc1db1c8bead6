#include "ldp/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldp/rng.hpp"

namespace ldp {

double ell(double r) {
  if (r < 0.0) throw DomainError("ell: argument must be nonnegative");
  if (r == 0.0) return 1.0;
  return std::max(0.0, r * std::log(r) - r + 1.0);
}

double control_cost(const ControlPair& control, const JumpMeasureSpec& nu, const TimeGrid& grid) {
  return gaussian_cost(control, grid) + jump_cost(control, nu, grid);
}

double control_cost(const ControlPair& control, const TimeGrid& grid) {
  if (control.g.cols != 0)
    throw ParameterError("control_cost: jump control present but no measure given");
  return gaussian_cost(control, grid);
}

TargetSpec TargetSpec::terminal_point(std::vector<double> y, double tol) {
  if (tol <= 0.0) throw ParameterError("TargetSpec: tol must be positive");
  TargetSpec t;
  t.kind = TargetKind::TerminalPoint;
  t.point = std::move(y);
  t.tol = tol;
  return t;
}

TargetSpec TargetSpec::terminal_halfspace(std::vector<double> dir, double level) {
  TargetSpec t;
  t.kind = TargetKind::TerminalHalfspace;
  t.direction = std::move(dir);
  t.level = level;
  t.tol = 1e-6;
  return t;
}

TargetSpec TargetSpec::full_path(std::vector<std::vector<double>> path, double tol) {
  if (tol <= 0.0) throw ParameterError("TargetSpec: tol must be positive");
  TargetSpec t;
  t.kind = TargetKind::FullPath;
  t.path = std::move(path);
  t.tol = tol;
  return t;
}

double target_residual(const TargetSpec& target, const Trajectory& traj) {
  const GalerkinState& yT = traj.terminal();
  switch (target.kind) {
    case TargetKind::TerminalPoint: {
      if (static_cast<int>(target.point.size()) != yT.n_modes())
        throw DimensionError("target_residual: point dimension mismatch");
      double acc = 0.0;
      for (int k = 0; k < yT.n_modes(); ++k) {
        double d = yT.coeffs[k] - target.point[k];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    case TargetKind::TerminalHalfspace: {
      if (static_cast<int>(target.direction.size()) != yT.n_modes())
        throw DimensionError("target_residual: direction dimension mismatch");
      double v = 0.0;
      for (int k = 0; k < yT.n_modes(); ++k) v += target.direction[k] * yT.coeffs[k];
      return std::max(0.0, target.level - v);
    }
    case TargetKind::FullPath: {
      if (static_cast<int>(target.path.size()) != traj.n_nodes())
        throw DimensionError("target_residual: path node count mismatch");
      double worst = 0.0;
      for (int m = 0; m < traj.n_nodes(); ++m) {
        double acc = 0.0;
        for (int k = 0; k < yT.n_modes(); ++k) {
          double d = traj.states[m].coeffs[k] - target.path[m][k];
          acc += d * d;
        }
        worst = std::max(worst, acc);
      }
      return std::sqrt(worst);
    }
  }
  return 0.0;
}

bool target_hit(const TargetSpec& target, const Trajectory& traj) {
  double r = target_residual(target, traj);
  if (target.kind == TargetKind::TerminalHalfspace) return r == 0.0;
  return r <= target.tol;
}

namespace {

struct Problem {
  const ModelSpec* model;
  const TargetSpec* target;
  const GalerkinState* x0;
  TimeGrid grid;
  int n_modes;
  int mark_dims;
  bool with_jump_control;
  int dim() const {
    return grid.steps * n_modes + (with_jump_control ? grid.steps * mark_dims : 0);
  }

  ControlPair unpack(const std::vector<double>& v) const {
    ControlPair c = null_control(grid, n_modes, mark_dims);
    int idx = 0;
    for (int m = 0; m < grid.steps; ++m)
      for (int k = 0; k < n_modes; ++k) c.f(m, k) = v[idx++];
    if (with_jump_control) {
      for (int m = 0; m < grid.steps; ++m)
        for (int i = 0; i < mark_dims; ++i) c.g(m, i) = std::exp(v[idx++]);
    }
    return c;
  }

  double cost(const ControlPair& c) const {
    if (model->has_jumps()) return control_cost(c, *model->jump_measure, grid);
    return gaussian_cost(c, grid);
  }

  struct Eval {
    double objective;
    double cost;
    double residual;
  };

  Eval eval(const std::vector<double>& v, double mu) const {
    ControlPair c = unpack(v);
    Eval e;
    try {
      Trajectory traj = solve_skeleton(*model, c, *x0, grid);
      e.cost = cost(c);
      e.residual = target_residual(*target, traj);
      e.objective = e.cost + mu * e.residual * e.residual;
    } catch (const BlowUpError&) {
      e.cost = std::numeric_limits<double>::infinity();
      e.residual = std::numeric_limits<double>::infinity();
      e.objective = 1e50;
    }
    return e;
  }
};

void fd_gradient(const Problem& prob, const std::vector<double>& v, double mu, double fd_step,
                 int threads, std::vector<double>& grad) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  double h = fd_step * (1.0 + scale);
  grad.assign(v.size(), 0.0);
  parallel_for(
      static_cast<int>(v.size()),
      [&](int i) {
        std::vector<double> vp = v;
        vp[i] += h;
        double jp = prob.eval(vp, mu).objective;
        vp[i] = v[i] - h;
        double jm = prob.eval(vp, mu).objective;
        grad[i] = (jp - jm) / (2.0 * h);
      },
      threads);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// L-BFGS with Armijo backtracking. Returns iterations used.
int lbfgs_minimize(const Problem& prob, double mu, const MinimizeOptions& opts,
                   std::vector<double>& x, double& fx) {
  const int mem = 8;
  const size_t d = x.size();
  std::vector<std::vector<double>> s_list, y_list;
  std::vector<double> rho_list;
  std::vector<double> grad(d), grad_new(d), dir(d), x_new(d);

  fx = prob.eval(x, mu).objective;
  fd_gradient(prob, x, mu, opts.fd_step, opts.threads, grad);
  int iter = 0;
  for (; iter < opts.max_inner_iterations; ++iter) {
    double gnorm = std::sqrt(dot(grad, grad));
    if (gnorm <= 1e-9 * std::max(1.0, std::abs(fx))) break;

    // two-loop recursion
    dir = grad;
    int hist = static_cast<int>(s_list.size());
    std::vector<double> alpha(hist);
    for (int i = hist - 1; i >= 0; --i) {
      alpha[i] = rho_list[i] * dot(s_list[i], dir);
      for (size_t j = 0; j < d; ++j) dir[j] -= alpha[i] * y_list[i][j];
    }
    if (hist > 0) {
      double gamma = dot(s_list[hist - 1], y_list[hist - 1]) /
                     std::max(1e-300, dot(y_list[hist - 1], y_list[hist - 1]));
      for (size_t j = 0; j < d; ++j) dir[j] *= gamma;
    }
    for (int i = 0; i < hist; ++i) {
      double beta = rho_list[i] * dot(y_list[i], dir);
      for (size_t j = 0; j < d; ++j) dir[j] += (alpha[i] - beta) * s_list[i][j];
    }
    for (size_t j = 0; j < d; ++j) dir[j] = -dir[j];

    double slope = dot(grad, dir);
    if (slope >= 0.0) {  // not a descent direction; reset to steepest descent
      for (size_t j = 0; j < d; ++j) dir[j] = -grad[j];
      slope = -dot(grad, grad);
      s_list.clear();
      y_list.clear();
      rho_list.clear();
    }

    double step = 1.0;
    double f_new = fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (size_t j = 0; j < d; ++j) x_new[j] = x[j] + step * dir[j];
      f_new = prob.eval(x_new, mu).objective;
      if (f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    fd_gradient(prob, x_new, mu, opts.fd_step, opts.threads, grad_new);
    std::vector<double> s(d), yv(d);
    for (size_t j = 0; j < d; ++j) {
      s[j] = x_new[j] - x[j];
      yv[j] = grad_new[j] - grad[j];
    }
    double sy = dot(s, yv);
    if (sy > 1e-12) {
      if (static_cast<int>(s_list.size()) == mem) {
        s_list.erase(s_list.begin());
        y_list.erase(y_list.begin());
        rho_list.erase(rho_list.begin());
      }
      s_list.push_back(std::move(s));
      y_list.push_back(std::move(yv));
      rho_list.push_back(1.0 / sy);
    }
    x = x_new;
    fx = f_new;
    grad = grad_new;
    if (std::abs(step * slope) <= 1e-12 * std::max(1.0, std::abs(fx))) break;
  }
  return iter;
}

}  // namespace

RateEstimate minimize_rate(const ModelSpec& model, const TargetSpec& target,
                           const GalerkinState& x0, const TimeGrid& grid,
                           const MinimizeOptions& opts) {
  Problem prob;
  prob.model = &model;
  prob.target = &target;
  prob.x0 = &x0;
  prob.grid = grid;
  prob.n_modes = model.n_modes();
  prob.mark_dims = model.jump_control_dims();
  prob.with_jump_control = opts.optimize_jump_control && model.has_jumps();

  const int d = prob.dim();
  RateEstimate best;
  bool have_best = false;
  int total_iters = 0;

  for (int init = 0; init < std::max(1, opts.initializations); ++init) {
    std::vector<double> x(d, 0.0);
    if (init > 0) {
      RngStream rng(opts.seed, 900 + init);
      for (double& v : x) v = 0.1 * rng.normal();
    }
    double mu = opts.mu0;
    double fx = 0.0;
    double prev_res = std::numeric_limits<double>::infinity();
    bool stalled = false;
    for (int round = 0; round < opts.outer_rounds; ++round) {
      total_iters += lbfgs_minimize(prob, mu, opts, x, fx);
      double res = prob.eval(x, mu).residual;
      if (res < 0.2 * target.tol) break;
      if (round + 1 < opts.outer_rounds) mu *= opts.mu_factor;
      stalled = res > 10.0 * target.tol && res > 0.95 * prev_res;
      prev_res = res;
    }
    auto e = prob.eval(x, mu);
    RateEstimate cand;
    cand.value = e.cost;
    cand.minimizer = prob.unpack(x);
    cand.minimizer.budget = e.cost;
    cand.constraint_residual = e.residual;
    cand.converged = e.residual < target.tol;
    cand.likely_infeasible = stalled && !cand.converged;
    if (!have_best) {
      best = cand;
      have_best = true;
    } else if (cand.converged != best.converged) {
      if (cand.converged) best = cand;
    } else if (cand.converged ? (cand.value < best.value)
                              : (cand.constraint_residual < best.constraint_residual)) {
      best = cand;
    }
  }
  best.iterations = total_iters;
  return best;
}

double gaussian_rate_oracle(const ModelSpec& model, const Trajectory& phi) {
  if (model.drift != DriftKind::Heat)
    throw ParameterError("gaussian_rate_oracle: needs a linear (heat-type) drift");
  if (model.diffusion != DiffusionKind::Additive)
    throw ParameterError("gaussian_rate_oracle: needs additive diffusion");
  const int n = model.n_modes();
  const int K = phi.n_nodes() - 1;
  if (K < 1) throw ParameterError("gaussian_rate_oracle: need at least one step");
  double dt = phi.times[1] - phi.times[0];
  auto diag = drift_stiff_diag(model);
  double total = 0.0;
  for (int m = 0; m < K; ++m) {
    for (int k = 0; k < n; ++k) {
      double efac = std::exp(diag[k] * dt);
      double pfac = phi1(diag[k] * dt) * dt;
      double resid = phi.states[m + 1].coeffs[k] - efac * phi.states[m].coeffs[k];
      if (model.sigma[k] == 0.0) {
        if (std::abs(resid) > 1e-12 * (1.0 + std::abs(phi.states[m].coeffs[k])))
          return std::numeric_limits<double>::infinity();
        continue;
      }
      double f = resid / (model.sigma[k] * pfac);
      total += 0.5 * f * f * dt;
    }
  }
  return total;
}

std::vector<double> linear_adjoint_gradient(const ModelSpec& model, const TargetSpec& target,
                                            const GalerkinState& x0, const TimeGrid& grid,
                                            const ControlPair& control, double mu) {
  if (model.drift != DriftKind::Heat || model.diffusion != DiffusionKind::Additive)
    throw ParameterError("linear_adjoint_gradient: linear/additive case only");
  if (target.kind != TargetKind::TerminalPoint)
    throw ParameterError("linear_adjoint_gradient: terminal-point target only");
  const int n = model.n_modes();
  const int K = grid.steps;
  const double dt = grid.dt();
  auto diag = drift_stiff_diag(model);

  Trajectory traj = solve_skeleton(model, control, x0, grid);
  std::vector<double> grad(static_cast<size_t>(K) * n, 0.0);
  for (int k = 0; k < n; ++k) {
    double efac = std::exp(diag[k] * dt);
    double pfac = phi1(diag[k] * dt) * dt;
    double dres = traj.terminal().coeffs[k] - target.point[k];
    double sens = 2.0 * mu * dres;  // d(mu * res^2)/dY_K
    // propagate backwards: dY_K/df_m = efac^{K-1-m} * pfac * sigma_k
    double power = 1.0;
    for (int m = K - 1; m >= 0; --m) {
      grad[static_cast<size_t>(m) * n + k] =
          control.f(m, k) * dt + sens * power * pfac * model.sigma[k];
      power *= efac;
    }
  }
  return grad;
}

}  // namespace ldp
