#pragma once

#include <utility>
#include <vector>

namespace ldp {

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

struct WilsonInterval {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Wilson 95% score interval for a binomial proportion.
WilsonInterval wilson_ci(long hits, long n, double z = 1.959963984540054);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Chi-square survival p-value.
double chi2_sf(double stat, int dof);

/// Goodness of fit of integer counts against a Poisson(mean) law; bins with
/// expected count below `min_expected` are pooled into the tail.
double poisson_chi2_pvalue(const std::vector<long>& counts, double mean,
                           double min_expected = 5.0);

double sample_skewness(const std::vector<double>& xs);

/// Least-squares slope/intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ldp
