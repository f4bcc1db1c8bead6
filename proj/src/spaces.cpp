#include "ldp/spaces.hpp"

#include <cmath>

namespace ldp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
}  // namespace

Basis::Basis(BasisKind kind, int n_modes) : kind_(kind), n_modes_(n_modes) {
  if (n_modes < 1) throw ParameterError("Basis: n_modes must be >= 1");
  eigenvalues_.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    if (kind == BasisKind::DirichletSine) {
      double freq = (k + 1) * kPi;
      eigenvalues_[k] = freq * freq;
    } else {
      int m = k / 2 + 1;
      double freq = 2.0 * kPi * m;
      eigenvalues_[k] = freq * freq;
    }
  }
  int n_quad = 4 * n_modes;
  quad_nodes_.resize(n_quad);
  for (int j = 0; j < n_quad; ++j) quad_nodes_[j] = (j + 0.5) / n_quad;
}

double Basis::eval(int k, double x) const {
  if (kind_ == BasisKind::DirichletSine) {
    return kSqrt2 * std::sin((k + 1) * kPi * x);
  }
  int m = k / 2 + 1;
  double arg = 2.0 * kPi * m * x;
  return (k % 2 == 0) ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

double Basis::eval_deriv(int k, double x) const {
  if (kind_ == BasisKind::DirichletSine) {
    double freq = (k + 1) * kPi;
    return kSqrt2 * freq * std::cos(freq * x);
  }
  int m = k / 2 + 1;
  double freq = 2.0 * kPi * m;
  double arg = freq * x;
  return (k % 2 == 0) ? -kSqrt2 * freq * std::sin(arg) : kSqrt2 * freq * std::cos(arg);
}

std::shared_ptr<const Basis> make_basis(BasisKind kind, int n_modes) {
  return std::make_shared<const Basis>(kind, n_modes);
}

GalerkinState make_state(std::shared_ptr<const Basis> basis, std::vector<double> coeffs) {
  if (!basis) throw ParameterError("make_state: null basis");
  if (static_cast<int>(coeffs.size()) != basis->n_modes())
    throw DimensionError("make_state: coefficient count does not match basis");
  return GalerkinState{std::move(coeffs), std::move(basis)};
}

GalerkinState zero_state(std::shared_ptr<const Basis> basis) {
  std::vector<double> c(basis->n_modes(), 0.0);
  return GalerkinState{std::move(c), std::move(basis)};
}

GalerkinState unit_mode(std::shared_ptr<const Basis> basis, int k, double amplitude) {
  if (k < 0 || k >= basis->n_modes()) throw DimensionError("unit_mode: mode index out of range");
  std::vector<double> c(basis->n_modes(), 0.0);
  c[k] = amplitude;
  return GalerkinState{std::move(c), std::move(basis)};
}

void check_same_basis(const GalerkinState& a, const GalerkinState& b) {
  if (!a.basis || !b.basis) throw ParameterError("state without basis");
  if (!a.basis->compatible_with(*b.basis))
    throw DimensionError("states live in different bases");
  if (a.coeffs.size() != b.coeffs.size())
    throw DimensionError("states have different mode counts");
}

bool all_finite(const GalerkinState& s) {
  for (double c : s.coeffs)
    if (!std::isfinite(c)) return false;
  return true;
}

double norm(const GalerkinState& state, NormKind which) {
  if (!all_finite(state)) throw InvalidStateError("norm: non-finite coefficients");
  const auto& lam = state.basis->eigenvalues();
  double acc = 0.0;
  switch (which) {
    case NormKind::H:
      for (double c : state.coeffs) acc += c * c;
      break;
    case NormKind::V:
      for (int k = 0; k < state.n_modes(); ++k) acc += lam[k] * state.coeffs[k] * state.coeffs[k];
      break;
    case NormKind::Vstar:
      for (int k = 0; k < state.n_modes(); ++k) acc += state.coeffs[k] * state.coeffs[k] / lam[k];
      break;
  }
  return std::sqrt(acc);
}

double dual_pair(const GalerkinState& functional, const GalerkinState& state) {
  check_same_basis(functional, state);
  double acc = 0.0;
  for (int k = 0; k < state.n_modes(); ++k) acc += functional.coeffs[k] * state.coeffs[k];
  return acc;
}

GalerkinState project(const GalerkinState& state, int m) {
  if (m < 1 || m > state.n_modes())
    throw DimensionError("project: m out of range");
  GalerkinState out = state;
  for (int k = m; k < out.n_modes(); ++k) out.coeffs[k] = 0.0;
  return out;
}

std::vector<double> evaluate_on_nodes(const GalerkinState& state, std::span<const double> xs) {
  std::vector<double> out(xs.size(), 0.0);
  const Basis& b = *state.basis;
  for (int k = 0; k < state.n_modes(); ++k) {
    double c = state.coeffs[k];
    if (c == 0.0) continue;
    for (size_t j = 0; j < xs.size(); ++j) out[j] += c * b.eval(k, xs[j]);
  }
  return out;
}

std::vector<double> evaluate_deriv_on_nodes(const GalerkinState& state, std::span<const double> xs) {
  std::vector<double> out(xs.size(), 0.0);
  const Basis& b = *state.basis;
  for (int k = 0; k < state.n_modes(); ++k) {
    double c = state.coeffs[k];
    if (c == 0.0) continue;
    for (size_t j = 0; j < xs.size(); ++j) out[j] += c * b.eval_deriv(k, xs[j]);
  }
  return out;
}

std::vector<double> project_samples(const Basis& basis, std::span<const double> values) {
  if (values.size() != basis.quad_nodes().size())
    throw DimensionError("project_samples: values must be given at the quadrature nodes");
  const auto& xs = basis.quad_nodes();
  double w = basis.quad_weight();
  std::vector<double> coeffs(basis.n_modes(), 0.0);
  for (int k = 0; k < basis.n_modes(); ++k) {
    double acc = 0.0;
    for (size_t j = 0; j < xs.size(); ++j) acc += values[j] * basis.eval(k, xs[j]);
    coeffs[k] = acc * w;
  }
  return coeffs;
}

}  // namespace ldp
