#include "ldp/experiments.hpp"

#include <cmath>

namespace ldp {

ProbEstimate estimate_event_prob(const ModelSpec& model, double eps, const TargetSpec& event,
                                 int n_paths, uint64_t seed, const GalerkinState& x0,
                                 const TimeGrid& grid, int threads) {
  if (n_paths < 100) throw ParameterError("estimate_event_prob: need at least 100 paths");
  SimParams params;
  params.eps = eps;
  params.grid = grid;
  params.n_paths = n_paths;
  params.seed = seed;
  params.threads = threads;
  ControlPair null = null_control(grid, model.n_modes(), model.jump_control_dims());

  std::vector<char> hit(n_paths, 0), bad(n_paths, 0);
  for_each_controlled_path(model, params, null, x0, [&](int i, PathResult&& p) {
    if (p.blown_up) {
      bad[i] = 1;
      return;
    }
    hit[i] = target_hit(event, p.traj) ? 1 : 0;
  });

  ProbEstimate est;
  long hits = 0, valid = 0;
  for (int i = 0; i < n_paths; ++i) {
    if (bad[i]) {
      est.blowups += 1;
      continue;
    }
    hits += hit[i];
    ++valid;
  }
  est.hits = hits;
  est.n_paths = valid;
  auto w = wilson_ci(hits, std::max<long>(valid, 1));
  est.probability = w.estimate;
  est.ci_lower = w.lower;
  est.ci_upper = w.upper;
  if (hits == 0) est.note = "zero hits: increase n or use tilting";
  return est;
}

ProbEstimate tilted_estimate(const ModelSpec& model, double eps, const TargetSpec& event,
                             const ControlPair& tilt, int n_paths, uint64_t seed,
                             const GalerkinState& x0, const TimeGrid& grid, int threads) {
  if (n_paths < 100) throw ParameterError("tilted_estimate: need at least 100 paths");
  SimParams params;
  params.eps = eps;
  params.grid = grid;
  params.n_paths = n_paths;
  params.seed = seed;
  params.threads = threads;

  std::vector<double> contrib(n_paths, 0.0), weight(n_paths, 0.0);
  std::vector<char> bad(n_paths, 0), clamped(n_paths, 0);
  for_each_controlled_path(model, params, tilt, x0, [&](int i, PathResult&& p) {
    if (p.blown_up) {
      bad[i] = 1;
      return;
    }
    double lw = p.log_weight;
    if (lw > 700.0) {
      lw = 700.0;
      clamped[i] = 1;
    }
    double w = std::exp(lw);
    weight[i] = w;
    contrib[i] = target_hit(event, p.traj) ? w : 0.0;
  });

  ProbEstimate est;
  est.weighted = true;
  std::vector<double> vals, ws;
  vals.reserve(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    if (bad[i]) {
      est.blowups += 1;
      continue;
    }
    if (clamped[i]) est.unreliable = true;
    vals.push_back(contrib[i]);
    ws.push_back(weight[i]);
    if (contrib[i] > 0.0) est.hits += 1;
  }
  if (vals.empty()) throw ParameterError("tilted_estimate: every path was excluded");
  auto ms = mean_stderr(vals);
  auto mw = mean_stderr(ws);
  est.n_paths = ms.n;
  est.probability = ms.mean;
  est.std_error = ms.stderr_;
  est.mean_weight = mw.mean;
  est.per_sample_variance = ms.stderr_ * ms.stderr_ * ms.n;
  est.ci_lower = std::max(0.0, ms.mean - 1.959963984540054 * ms.stderr_);
  est.ci_upper = ms.mean + 1.959963984540054 * ms.stderr_;
  if (est.unreliable) est.note = "per-path log-weight clamped; estimate unreliable";
  return est;
}

LdpReport ldp_slope_study(const ModelSpec& model, const TargetSpec& event,
                          const std::vector<double>& eps_list, int n_paths, double rate_value,
                          uint64_t seed, const GalerkinState& x0, const TimeGrid& grid,
                          const ControlPair* tilt, int threads) {
  if (eps_list.size() < 3)
    throw ParameterError("ldp_slope_study: need at least 3 eps values");
  LdpReport report;
  report.eps_list = eps_list;
  report.rate_value = rate_value;

  std::vector<double> inv_eps, ln_p;
  for (size_t e = 0; e < eps_list.size(); ++e) {
    double eps = eps_list[e];
    ProbEstimate est =
        tilt ? tilted_estimate(model, eps, event, *tilt, n_paths, seed + e, x0, grid, threads)
             : estimate_event_prob(model, eps, event, n_paths, seed + e, x0, grid, threads);
    report.estimates.push_back(est);
    if (est.probability <= 0.0) {
      report.warnings.push_back("eps level excluded (zero hits)");
      report.eps_ln_p.push_back(0.0);
      continue;
    }
    double lp = std::log(est.probability);
    report.eps_ln_p.push_back(eps * lp);
    inv_eps.push_back(1.0 / eps);
    ln_p.push_back(lp);
  }
  if (inv_eps.size() < 2) {
    report.warnings.push_back("too few usable eps levels for a slope fit");
    report.relative_gap = 1.0;
    return report;
  }
  auto [slope, intercept] = linear_fit(inv_eps, ln_p);
  (void)intercept;
  report.slope = slope;
  if (rate_value != 0.0)
    report.relative_gap = std::abs(-slope - rate_value) / std::abs(rate_value);
  else
    report.relative_gap = std::abs(-slope);
  return report;
}

}  // namespace ldp
