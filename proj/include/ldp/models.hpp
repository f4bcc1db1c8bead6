#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldp/noise.hpp"
#include "ldp/spaces.hpp"

namespace ldp {

enum class DriftKind { Heat, Burgers, PLaplacian, AllenCahn };
enum class DiffusionKind { Additive, DiagonalMultiplicative };
enum class JumpAmpKind { Constant, Linear };  // amp(z) = amp0 or amp0 * z
enum class JumpSatKind { Saturated, Unit };   // s(u) = smax tanh((1+|u|_H)/smax) or 1

struct JumpCoeff {
  JumpAmpKind amp_kind = JumpAmpKind::Linear;
  double amp0 = 0.0;
  JumpSatKind sat = JumpSatKind::Saturated;
  double s_max = 2.0;
  int direction_mode = 0;  // gamma points along e_{direction_mode}
};

/// Drift/diffusion/jump triple plus every declared constant of the model
/// contracts. Immutable after construction; operations are reentrant.
struct ModelSpec {
  std::string name;

  DriftKind drift = DriftKind::Heat;
  double nu_visc = 0.1;      // heat/burgers/allen-cahn viscosity
  double p_exponent = 4.0;   // p-laplacian exponent

  // declared contract constants
  double beta = 2.0;
  double alpha = 0.0;
  double zeta = 0.0;
  double eta0 = 1.0;
  double big_m = 6.0;
  double l_a = 0.1;       // coercivity constant
  double growth_c = 1.0;  // growth-inequality constant
  double a_const = 1.0;   // time profile a(t), constant
  double b_const = 1.0;   // time profile b(t), constant
  // local-monotonicity split: rho(x) = eta(x) = loc_c * (1 + |x|_V^loc_pow)
  double loc_c = 0.0;
  double loc_pow = 0.0;

  DiffusionKind diffusion = DiffusionKind::Additive;
  std::vector<double> sigma;
  double clip_bound = 1.0;  // saturation bound for multiplicative diffusion

  JumpCoeff jump;
  std::optional<JumpMeasureSpec> jump_measure;

  std::shared_ptr<const Basis> basis;

  int n_modes() const { return basis->n_modes(); }
  bool has_jumps() const { return jump_measure.has_value() && jump.amp0 != 0.0; }
  int jump_control_dims() const { return jump_measure ? jump_measure->control_dims() : 0; }
  double sigma_l2_sq() const;
  double l_b_const() const;     // Lipschitz constant of B in the H norm
  double r_gamma_sq_mass() const;  // int_Z R_gamma(z)^2 nu(dz)
};

/// Options shared by the shipped model factories.
struct ModelNoiseOptions {
  DiffusionKind diffusion = DiffusionKind::Additive;
  double sigma_scale = 0.3;
  double sigma_decay = 1.0;  // sigma_k = scale * k^{-decay}, k = 1..n
  std::vector<double> sigma_explicit;  // overrides the rule when non-empty
  double clip_bound = 1.0;
  bool with_jumps = true;
  JumpCoeff jump{JumpAmpKind::Linear, 0.2, JumpSatKind::Saturated, 2.0, 0};
  std::optional<JumpMeasureSpec> jump_measure;  // default: marks {-1, +1}, mass 1/2 each
};

ModelSpec make_heat_model(std::shared_ptr<const Basis> basis, double nu,
                          const ModelNoiseOptions& noise = {});
ModelSpec make_burgers_model(std::shared_ptr<const Basis> basis, double nu,
                             const ModelNoiseOptions& noise = {});
ModelSpec make_p_laplacian_model(std::shared_ptr<const Basis> basis, double p,
                                 const ModelNoiseOptions& noise = {});
ModelSpec make_allen_cahn_model(std::shared_ptr<const Basis> basis, double nu,
                                const ModelNoiseOptions& noise = {});

/// Throws ParameterError when declared constants are inconsistent
/// (used by the factories; custom specs may call it too).
void validate_model(const ModelSpec& model, bool require_coercive = true);

/// Galerkin coordinates of P_n A(t, u).
GalerkinState apply_drift(const ModelSpec& model, double t, const GalerkinState& u);

/// Diagonal of the stiff linear part handled by the integrating factor.
std::vector<double> drift_stiff_diag(const ModelSpec& model);

/// apply_drift minus the stiff diagonal part, computed directly.
GalerkinState apply_drift_nonstiff(const ModelSpec& model, double t, const GalerkinState& u);

/// B(t, u) applied to a direction w.
GalerkinState apply_diffusion(const ModelSpec& model, double t, const GalerkinState& u,
                              const GalerkinState& w);

/// Squared Hilbert-Schmidt norm of B(t, u).
double diffusion_hs_norm_sq(const ModelSpec& model, double t, const GalerkinState& u);

/// gamma(t, u, z).
GalerkinState apply_jump(const ModelSpec& model, double t, const GalerkinState& u, double z);

double jump_amp(const ModelSpec& model, double z);
double jump_s_factor(const ModelSpec& model, const GalerkinState& u);
double l_gamma(const ModelSpec& model, double t, double z);
double r_gamma(const ModelSpec& model, double t, double z);

/// int_Z gamma(t, u, z) (g(z) - 1) nu(dz) for one piecewise-constant row of g
/// (g_row has jump_control_dims entries; pass {} for g == 1).
GalerkinState jump_compensation(const ModelSpec& model, double t, const GalerkinState& u,
                                const double* g_row);

/// int_Z L_gamma(t, z) |g(z) - 1| nu(dz) for one control row.
double l_gamma_g_integral(const ModelSpec& model, const double* g_row);

struct HypothesisEntry {
  long checked = 0;
  double worst_margin = 0.0;
  long violations = 0;
};

struct HypothesisReport {
  std::map<std::string, HypothesisEntry> entries;  // keys "H2".."H9"
  long total_violations() const {
    long v = 0;
    for (const auto& [k, e] : entries) v += e.violations;
    return v;
  }
};

/// Samples the inequalities (H.2)-(H.9) on random pairs in the H-ball of the
/// given radius. Records margins (RHS - LHS); never throws on a violation.
HypothesisReport check_hypotheses(const ModelSpec& model, int n_samples, double radius,
                                  uint64_t rng_seed);

}  // namespace ldp
