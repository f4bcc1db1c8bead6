#include "ldp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ldp/errors.hpp"

namespace ldp {

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr r;
  r.n = static_cast<long>(xs.size());
  if (r.n == 0) return r;
  double s1 = 0.0;
  for (double x : xs) s1 += x;
  r.mean = s1 / r.n;
  if (r.n > 1) {
    double s2 = 0.0;
    for (double x : xs) s2 += (x - r.mean) * (x - r.mean);
    r.stderr_ = std::sqrt(s2 / (r.n - 1) / r.n);
  }
  return r;
}

WilsonInterval wilson_ci(long hits, long n, double z) {
  if (n <= 0) throw ParameterError("wilson_ci: need n > 0");
  double p = static_cast<double>(hits) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  WilsonInterval w;
  w.estimate = p;
  w.lower = std::max(0.0, center - half);
  w.upper = std::min(1.0, center + half);
  return w;
}

namespace {

// series expansion of P(a, x)
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a, x)
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw ParameterError("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double stat, int dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * stat);
}

double poisson_chi2_pvalue(const std::vector<long>& counts, double mean, double min_expected) {
  if (counts.empty()) throw ParameterError("poisson_chi2_pvalue: no samples");
  long n = static_cast<long>(counts.size());
  long max_count = *std::max_element(counts.begin(), counts.end());

  // pmf over 0..max_count, remainder mass in the tail
  std::vector<double> pmf(max_count + 1);
  double p = std::exp(-mean);
  double cum = 0.0;
  for (long k = 0; k <= max_count; ++k) {
    pmf[k] = p;
    cum += p;
    p *= mean / (k + 1);
  }
  double tail = std::max(0.0, 1.0 - cum);

  std::vector<long> observed(max_count + 2, 0);
  for (long c : counts) observed[c] += 1;

  // pool bins until each expected count reaches the floor
  std::vector<double> exp_bins;
  std::vector<long> obs_bins;
  double e_acc = 0.0;
  long o_acc = 0;
  for (long k = 0; k <= max_count + 1; ++k) {
    double ek = (k <= max_count ? pmf[k] : tail) * n;
    long ok = (k <= max_count ? observed[k] : 0);
    e_acc += ek;
    o_acc += ok;
    if (e_acc >= min_expected) {
      exp_bins.push_back(e_acc);
      obs_bins.push_back(o_acc);
      e_acc = 0.0;
      o_acc = 0;
    }
  }
  if (e_acc > 0.0 && !exp_bins.empty()) {
    exp_bins.back() += e_acc;
    obs_bins.back() += o_acc;
  }
  if (exp_bins.size() < 2) return 1.0;

  double stat = 0.0;
  for (size_t i = 0; i < exp_bins.size(); ++i) {
    double d = obs_bins[i] - exp_bins[i];
    stat += d * d / exp_bins[i];
  }
  return chi2_sf(stat, static_cast<int>(exp_bins.size()) - 1);
}

double sample_skewness(const std::vector<double>& xs) {
  if (xs.size() < 3) throw ParameterError("sample_skewness: need at least 3 samples");
  double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double m2 = 0.0, m3 = 0.0;
  for (double x : xs) {
    double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  if (m2 <= 0.0) return 0.0;
  return m3 / std::pow(m2, 1.5);
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ParameterError("linear_fit: need >= 2 points");
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("linear_fit: degenerate abscissae");
  double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace ldp
