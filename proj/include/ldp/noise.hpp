#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ldp/rng.hpp"
#include "ldp/util.hpp"

namespace ldp {

enum class MarkKind { Finite, Interval };

/// Mark space Z with a finite intensity measure nu. Either a finite list of
/// weighted marks or an interval [a, b] with constant density.
class JumpMeasureSpec {
 public:
  static JumpMeasureSpec finite(std::vector<double> values, std::vector<double> masses);
  static JumpMeasureSpec interval(double a, double b, double density);

  MarkKind kind() const { return kind_; }
  double total_mass() const { return total_mass_; }

  /// Number of mark slots a piecewise-constant control g carries per time cell.
  int control_dims() const { return kind_ == MarkKind::Finite ? static_cast<int>(values_.size()) : 1; }

  int mark_count() const { return static_cast<int>(values_.size()); }
  double mark_value(int i) const { return values_[i]; }
  double mark_mass(int i) const { return kind_ == MarkKind::Finite ? masses_[i] : total_mass_; }

  double lower() const { return a_; }
  double upper() const { return b_; }

  bool contains(double z) const;

  /// nu-moments: integral of z^k d nu and |z|^k d nu over Z.
  double moment(int k) const;
  double abs_moment(int k) const;

  /// Draw a mark from nu / nu(Z). Returns (value, mark index); index 0 for interval marks.
  std::pair<double, int> sample_mark(RngStream& rng) const;

 private:
  JumpMeasureSpec() = default;
  MarkKind kind_ = MarkKind::Finite;
  std::vector<double> values_;
  std::vector<double> masses_;
  std::vector<double> cum_;  // cumulative masses for finite sampling
  double a_ = 0.0, b_ = 0.0, density_ = 0.0;
  double total_mass_ = 0.0;
};

/// One accepted point of the controlled Poisson measure.
struct JumpRecord {
  double time;
  double mark;
  int mark_index;  // index into the finite mark list; 0 for interval marks
};

/// Truncated cylindrical Wiener increment: n_modes iid N(0, dt) entries.
std::vector<double> sample_wiener_increments(int n_modes, double dt, RngStream& rng);

/// Intensity control phi(t, z) with a known bound; mark_index is provided for
/// finite mark spaces so grid-based controls can do O(1) lookups.
using IntensityControl = std::function<double(double t, double z, int mark_index)>;

/// Sample N^{theta phi} on [0, horizon] by thinning a dominating Poisson
/// process of intensity theta * phi_bound * nu. Times are strictly increasing.
std::vector<JumpRecord> sample_controlled_prm(const JumpMeasureSpec& nu,
                                              const IntensityControl& phi, double phi_bound,
                                              double theta, double horizon, RngStream& rng);

/// theta * int_{t0}^{t1} int_Z phi d nu dt for a piecewise-constant control on
/// the grid (rows = time cells, cols = control_dims). Exact.
double compensator(const JumpMeasureSpec& nu, const Matrix& phi_grid, const TimeGrid& grid,
                   double theta, double t0, double t1);

/// Same for a callable control, evaluated by midpoint quadrature in time.
double compensator(const JumpMeasureSpec& nu, const IntensityControl& phi, double theta,
                   double t0, double t1, int time_cells = 256);

/// Wrap a grid control (rows = time cells, cols = control_dims) as a callable.
IntensityControl grid_control(const JumpMeasureSpec& nu, const Matrix& g, const TimeGrid& grid);

}  // namespace ldp
