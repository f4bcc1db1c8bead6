#include "ldp/noise.hpp"

#include <algorithm>
#include <cmath>

namespace ldp {

JumpMeasureSpec JumpMeasureSpec::finite(std::vector<double> values, std::vector<double> masses) {
  if (values.empty() || values.size() != masses.size())
    throw ParameterError("JumpMeasureSpec: need matching non-empty mark/mass lists");
  JumpMeasureSpec s;
  s.kind_ = MarkKind::Finite;
  s.values_ = std::move(values);
  s.masses_ = std::move(masses);
  s.cum_.resize(s.masses_.size());
  double acc = 0.0;
  for (size_t i = 0; i < s.masses_.size(); ++i) {
    if (s.masses_[i] < 0.0) throw ParameterError("JumpMeasureSpec: negative mark mass");
    acc += s.masses_[i];
    s.cum_[i] = acc;
  }
  s.total_mass_ = acc;
  if (!(acc > 0.0) || !std::isfinite(acc))
    throw ParameterError("JumpMeasureSpec: total mass must be positive and finite");
  return s;
}

JumpMeasureSpec JumpMeasureSpec::interval(double a, double b, double density) {
  if (!(b > a)) throw ParameterError("JumpMeasureSpec: interval needs b > a");
  if (density <= 0.0 || !std::isfinite(density))
    throw ParameterError("JumpMeasureSpec: density must be positive and finite");
  JumpMeasureSpec s;
  s.kind_ = MarkKind::Interval;
  s.a_ = a;
  s.b_ = b;
  s.density_ = density;
  s.total_mass_ = density * (b - a);
  s.values_ = {0.5 * (a + b)};  // representative mark for control_dims == 1 bookkeeping
  return s;
}

bool JumpMeasureSpec::contains(double z) const {
  if (kind_ == MarkKind::Interval) return z >= a_ && z <= b_;
  for (double v : values_)
    if (v == z) return true;
  return false;
}

double JumpMeasureSpec::moment(int k) const {
  if (kind_ == MarkKind::Finite) {
    double acc = 0.0;
    for (size_t i = 0; i < values_.size(); ++i) acc += std::pow(values_[i], k) * masses_[i];
    return acc;
  }
  return density_ * (std::pow(b_, k + 1) - std::pow(a_, k + 1)) / (k + 1);
}

double JumpMeasureSpec::abs_moment(int k) const {
  if (kind_ == MarkKind::Finite) {
    double acc = 0.0;
    for (size_t i = 0; i < values_.size(); ++i) acc += std::pow(std::abs(values_[i]), k) * masses_[i];
    return acc;
  }
  auto prim = [&](double x) { return std::pow(std::abs(x), k + 1) / (k + 1); };
  if (a_ >= 0.0) return density_ * (prim(b_) - prim(a_));
  if (b_ <= 0.0) return density_ * (prim(a_) - prim(b_));
  return density_ * (prim(a_) + prim(b_));
}

std::pair<double, int> JumpMeasureSpec::sample_mark(RngStream& rng) const {
  if (kind_ == MarkKind::Interval) {
    double z = a_ + (b_ - a_) * rng.uniform();
    return {z, 0};
  }
  double u = rng.uniform() * total_mass_;
  auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
  int idx = static_cast<int>(it - cum_.begin());
  if (idx >= static_cast<int>(values_.size())) idx = static_cast<int>(values_.size()) - 1;
  return {values_[idx], idx};
}

std::vector<double> sample_wiener_increments(int n_modes, double dt, RngStream& rng) {
  if (dt <= 0.0) throw ParameterError("sample_wiener_increments: dt must be positive");
  if (n_modes < 1) throw ParameterError("sample_wiener_increments: n_modes must be >= 1");
  double s = std::sqrt(dt);
  std::vector<double> out(n_modes);
  for (int k = 0; k < n_modes; ++k) out[k] = s * rng.normal();
  return out;
}

std::vector<JumpRecord> sample_controlled_prm(const JumpMeasureSpec& nu,
                                              const IntensityControl& phi, double phi_bound,
                                              double theta, double horizon, RngStream& rng) {
  if (!(phi_bound >= 0.0) || !std::isfinite(phi_bound))
    throw ParameterError("sample_controlled_prm: need a finite bound on phi");
  if (horizon <= 0.0) throw ParameterError("sample_controlled_prm: horizon must be positive");
  if (theta <= 0.0) throw ParameterError("sample_controlled_prm: theta must be positive");
  std::vector<JumpRecord> out;
  if (phi_bound == 0.0) return out;
  double rate = theta * phi_bound * nu.total_mass();
  double t = 0.0;
  while (true) {
    t += rng.exponential(rate);
    if (t >= horizon) break;
    auto [z, idx] = nu.sample_mark(rng);
    double p = phi(t, z, idx) / phi_bound;
    if (p < 0.0) throw ParameterError("sample_controlled_prm: negative intensity control");
    if (rng.uniform() <= p) out.push_back(JumpRecord{t, z, idx});
  }
  return out;
}

double compensator(const JumpMeasureSpec& nu, const Matrix& phi_grid, const TimeGrid& grid,
                   double theta, double t0, double t1) {
  if (t0 > t1) throw ParameterError("compensator: t0 must be <= t1");
  if (phi_grid.rows != grid.steps || phi_grid.cols != nu.control_dims())
    throw DimensionError("compensator: control grid does not match time grid / mark space");
  double acc = 0.0;
  for (int m = 0; m < grid.steps; ++m) {
    double lo = std::max(t0, grid.node(m));
    double hi = std::min(t1, grid.node(m + 1));
    if (hi <= lo) continue;
    double cell = 0.0;
    for (int i = 0; i < phi_grid.cols; ++i) cell += phi_grid(m, i) * nu.mark_mass(i);
    acc += cell * (hi - lo);
  }
  return theta * acc;
}

double compensator(const JumpMeasureSpec& nu, const IntensityControl& phi, double theta,
                   double t0, double t1, int time_cells) {
  if (t0 > t1) throw ParameterError("compensator: t0 must be <= t1");
  if (t1 == t0) return 0.0;
  double h = (t1 - t0) / time_cells;
  double acc = 0.0;
  for (int m = 0; m < time_cells; ++m) {
    double t = t0 + (m + 0.5) * h;
    if (nu.kind() == MarkKind::Finite) {
      for (int i = 0; i < nu.mark_count(); ++i)
        acc += phi(t, nu.mark_value(i), i) * nu.mark_mass(i) * h;
    } else {
      // midpoint in z as well
      int zc = 64;
      double dz = (nu.upper() - nu.lower()) / zc;
      double dens = nu.total_mass() / (nu.upper() - nu.lower());
      for (int j = 0; j < zc; ++j) {
        double z = nu.lower() + (j + 0.5) * dz;
        acc += phi(t, z, 0) * dens * dz * h;
      }
    }
  }
  return theta * acc;
}

IntensityControl grid_control(const JumpMeasureSpec& nu, const Matrix& g, const TimeGrid& grid) {
  if (g.rows != grid.steps || g.cols != nu.control_dims())
    throw DimensionError("grid_control: control grid does not match time grid / mark space");
  Matrix copy = g;
  TimeGrid tg = grid;
  return [copy, tg](double t, double /*z*/, int mark_index) {
    int cell = static_cast<int>(t / tg.dt());
    if (cell >= tg.steps) cell = tg.steps - 1;
    if (cell < 0) cell = 0;
    return copy(cell, mark_index);
  };
}

}  // namespace ldp
