#pragma once

#include <functional>
#include <vector>

#include "ldp/skeleton.hpp"

namespace ldp {

struct SimParams {
  double eps = 1e-2;
  TimeGrid grid;
  int n_paths = 1;
  uint64_t seed = 1;
  int threads = 0;
  bool store_jumps = false;

  void validate() const {
    if (eps <= 0.0) throw ParameterError("SimParams: eps must be positive");
    if (n_paths < 1) throw ParameterError("SimParams: n_paths must be >= 1");
  }
};

struct PathResult {
  Trajectory traj;
  std::vector<JumpRecord> jumps;  // filled only when store_jumps is set
  long n_jumps = 0;
  bool blown_up = false;
  double blowup_time = 0.0;
  double log_weight = 0.0;  // Girsanov log-density of the original law w.r.t. the controlled one
};

struct PathEnsemble {
  std::vector<PathResult> paths;
  double eps = 0.0;
  int blowup_count() const {
    int c = 0;
    for (const auto& p : paths) c += p.blown_up ? 1 : 0;
    return c;
  }
  long total_jumps() const {
    long c = 0;
    for (const auto& p : paths) c += p.n_jumps;
    return c;
  }
};

using PathObserver = std::function<void(int path_index, PathResult&&)>;

/// Simulate paths of the controlled small-noise equation; one rng stream pair
/// per path index, so results are independent of thread scheduling. The
/// observer receives each finished path exactly once.
void for_each_controlled_path(const ModelSpec& model, const SimParams& params,
                              const ControlPair& control, const GalerkinState& x0,
                              const PathObserver& observer);

/// Pathwise simulation of the small-noise equation (null control).
PathEnsemble simulate_spde(const ModelSpec& model, const SimParams& params,
                           const GalerkinState& x0);

/// Controlled version: adds B psi dt, tilts the jump intensity to
/// theta * phi * nu by thinning, and accumulates the Girsanov log-weight.
PathEnsemble simulate_controlled_spde(const ModelSpec& model, const SimParams& params,
                                      const ControlPair& control, const GalerkinState& x0);

struct MomentEstimate {
  double sup_moment = 0.0;
  double sup_stderr = 0.0;
  double v_moment = 0.0;
  double v_stderr = 0.0;
  int excluded = 0;
};

/// Monte Carlo estimates of E[sup_t |Y|_H^p] and E[int |Y|_H^{p-2} |Y|_V^beta dt].
/// Blow-up paths are excluded and counted.
MomentEstimate moment_estimate(const PathEnsemble& ens, double p, double beta);

struct Condition2Row {
  double eps = 0.0;
  double mean_sq_sup_err = 0.0;
  double std_err = 0.0;
  int blowups = 0;
};

/// E[sup_t |Y^eps - skeleton(q)|_H^2] for each eps, with q_eps driving the
/// controlled simulation and q driving the deterministic limit.
std::vector<Condition2Row> condition2_experiment(const ModelSpec& model,
                                                 const std::vector<double>& eps_list,
                                                 const std::vector<ControlPair>& q_eps,
                                                 const ControlPair& q, const GalerkinState& x0,
                                                 const TimeGrid& grid, int n_paths, uint64_t seed,
                                                 int threads = 0);

}  // namespace ldp
