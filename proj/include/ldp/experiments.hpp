#pragma once

#include <string>
#include <vector>

#include "ldp/rate.hpp"
#include "ldp/spde.hpp"
#include "ldp/stats.hpp"

namespace ldp {

struct ProbEstimate {
  double probability = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  long hits = 0;
  long n_paths = 0;
  int blowups = 0;
  std::string note;

  // importance-sampling diagnostics (weighted estimator only)
  bool weighted = false;
  double std_error = 0.0;
  double mean_weight = 1.0;
  double per_sample_variance = 0.0;
  bool unreliable = false;
};

/// Plain Monte Carlo probability of the event with a Wilson 95% interval.
ProbEstimate estimate_event_prob(const ModelSpec& model, double eps, const TargetSpec& event,
                                 int n_paths, uint64_t seed, const GalerkinState& x0,
                                 const TimeGrid& grid, int threads = 0);

/// Importance sampling under the tilt control: simulates the controlled
/// equation and reweights by the Girsanov density of the original law.
ProbEstimate tilted_estimate(const ModelSpec& model, double eps, const TargetSpec& event,
                             const ControlPair& tilt, int n_paths, uint64_t seed,
                             const GalerkinState& x0, const TimeGrid& grid, int threads = 0);

struct LdpReport {
  std::vector<double> eps_list;
  std::vector<ProbEstimate> estimates;
  std::vector<double> eps_ln_p;
  double slope = 0.0;       // fitted d(ln P)/d(1/eps)
  double rate_value = 0.0;  // I from the minimizer / closed form
  double relative_gap = 0.0;
  std::vector<std::string> warnings;
};

/// Fits ln P(eps) against 1/eps; the negative slope estimates the rate I.
/// Zero-hit levels are excluded with a warning. When `tilt` is non-null the
/// probabilities come from the tilted estimator.
LdpReport ldp_slope_study(const ModelSpec& model, const TargetSpec& event,
                          const std::vector<double>& eps_list, int n_paths, double rate_value,
                          uint64_t seed, const GalerkinState& x0, const TimeGrid& grid,
                          const ControlPair* tilt = nullptr, int threads = 0);

}  // namespace ldp
