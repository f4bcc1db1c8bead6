#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ldp/errors.hpp"

namespace ldp {

enum class BasisKind { DirichletSine, PeriodicFourier };
enum class NormKind { H, V, Vstar };

/// Spectral basis on the unit interval. Dirichlet: e_k(x) = sqrt(2) sin((k+1) pi x)
/// with eigenvalue ((k+1) pi)^2. Periodic (zero-mean): alternating
/// sqrt(2) cos(2 pi m x), sqrt(2) sin(2 pi m x) pairs with eigenvalue (2 pi m)^2.
/// Quadrature is composite midpoint with 4*n_modes points, which integrates
/// all products of basis modes appearing in the shipped nonlinearities exactly.
class Basis {
 public:
  Basis(BasisKind kind, int n_modes);

  BasisKind kind() const { return kind_; }
  int n_modes() const { return n_modes_; }
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }

  double eval(int k, double x) const;
  double eval_deriv(int k, double x) const;

  const std::vector<double>& quad_nodes() const { return quad_nodes_; }
  double quad_weight() const { return 1.0 / static_cast<double>(quad_nodes_.size()); }

  bool compatible_with(const Basis& other) const {
    return kind_ == other.kind_ && n_modes_ == other.n_modes_;
  }

 private:
  BasisKind kind_;
  int n_modes_;
  std::vector<double> eigenvalues_;
  std::vector<double> quad_nodes_;
};

std::shared_ptr<const Basis> make_basis(BasisKind kind, int n_modes);

/// Element of the Galerkin subspace H_n: coefficients in the basis.
struct GalerkinState {
  std::vector<double> coeffs;
  std::shared_ptr<const Basis> basis;

  int n_modes() const { return static_cast<int>(coeffs.size()); }
};

GalerkinState make_state(std::shared_ptr<const Basis> basis, std::vector<double> coeffs);
GalerkinState zero_state(std::shared_ptr<const Basis> basis);
/// amplitude * e_k (k is a 0-based mode index).
GalerkinState unit_mode(std::shared_ptr<const Basis> basis, int k, double amplitude = 1.0);

void check_same_basis(const GalerkinState& a, const GalerkinState& b);
bool all_finite(const GalerkinState& s);

/// H = l2 of coefficients, V = (sum lambda_k c_k^2)^(1/2), V* = (sum c_k^2 / lambda_k)^(1/2).
double norm(const GalerkinState& state, NormKind which);

/// Duality pairing; in coordinates the l2 dot product.
double dual_pair(const GalerkinState& functional, const GalerkinState& state);

/// Orthogonal projection onto the first m modes.
GalerkinState project(const GalerkinState& state, int m);

/// Pointwise field values u(x_i) for the reconstructed field.
std::vector<double> evaluate_on_nodes(const GalerkinState& state, std::span<const double> xs);
std::vector<double> evaluate_deriv_on_nodes(const GalerkinState& state, std::span<const double> xs);

/// L2 projection of samples given at the basis quadrature nodes back onto the basis.
std::vector<double> project_samples(const Basis& basis, std::span<const double> values);

}  // namespace ldp
