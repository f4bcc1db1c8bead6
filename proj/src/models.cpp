#include "ldp/models.hpp"

#include <algorithm>
#include <cmath>

#include "ldp/rng.hpp"

namespace ldp {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double clip_sat(double v, double bound) { return bound * std::tanh(v / bound); }

std::vector<double> sigma_from_options(const ModelNoiseOptions& noise, int n) {
  if (!noise.sigma_explicit.empty()) {
    if (static_cast<int>(noise.sigma_explicit.size()) != n)
      throw DimensionError("sigma list length does not match n_modes");
    return noise.sigma_explicit;
  }
  std::vector<double> s(n);
  for (int k = 0; k < n; ++k) s[k] = noise.sigma_scale * std::pow(k + 1.0, -noise.sigma_decay);
  return s;
}

JumpMeasureSpec default_marks() {
  return JumpMeasureSpec::finite({-1.0, 1.0}, {0.5, 0.5});
}

double big_m_formula(double alpha, double beta, double eta0) {
  double m1 = 2.0 * alpha * (beta - 1.0) * (beta + eta0) / beta;
  double m2 = 4.0 * (beta - 1.0) * (beta + eta0) / beta;
  return std::max(std::max(m1, m2), std::max(4.0, alpha + 2.0));
}

ModelSpec base_model(std::shared_ptr<const Basis> basis, const ModelNoiseOptions& noise) {
  ModelSpec m;
  m.basis = std::move(basis);
  m.diffusion = noise.diffusion;
  m.sigma = sigma_from_options(noise, m.basis->n_modes());
  m.clip_bound = noise.clip_bound;
  if (noise.with_jumps) {
    m.jump = noise.jump;
    m.jump_measure = noise.jump_measure ? *noise.jump_measure : default_marks();
    if (m.jump.direction_mode < 0 || m.jump.direction_mode >= m.basis->n_modes())
      throw DimensionError("jump direction mode out of range");
  } else {
    m.jump = JumpCoeff{JumpAmpKind::Constant, 0.0, JumpSatKind::Unit, 1.0, 0};
    m.jump_measure.reset();
  }
  m.b_const = m.sigma_l2_sq() * std::max(1.0, m.clip_bound * m.clip_bound);
  return m;
}

// a(t) floor shared by every shipped model: absorbs the B and gamma Lipschitz
// terms appearing on the left of the local-monotonicity inequality.
double a_floor(const ModelSpec& m) { return m.l_b_const() + m.r_gamma_sq_mass() + 0.5; }

}  // namespace

double ModelSpec::sigma_l2_sq() const {
  double acc = 0.0;
  for (double s : sigma) acc += s * s;
  return acc;
}

double ModelSpec::l_b_const() const {
  if (diffusion == DiffusionKind::Additive) return 0.0;
  return sigma_l2_sq();  // saturation has Lipschitz constant 1
}

double ModelSpec::r_gamma_sq_mass() const {
  if (!has_jumps() || jump.sat == JumpSatKind::Unit) return 0.0;
  double amp_sq = jump.amp_kind == JumpAmpKind::Linear
                      ? jump.amp0 * jump.amp0 * jump_measure->moment(2)
                      : jump.amp0 * jump.amp0 * jump_measure->total_mass();
  return amp_sq;
}

ModelSpec make_heat_model(std::shared_ptr<const Basis> basis, double nu,
                          const ModelNoiseOptions& noise) {
  ModelSpec m = base_model(std::move(basis), noise);
  m.name = "heat";
  m.drift = DriftKind::Heat;
  m.nu_visc = nu;
  m.beta = 2.0;
  m.alpha = 0.0;
  m.zeta = 0.0;
  m.l_a = nu;
  m.growth_c = nu * nu + 0.1;
  m.loc_c = 0.0;
  m.loc_pow = 0.0;
  m.eta0 = 1.0;
  m.big_m = big_m_formula(m.alpha, m.beta, m.eta0);
  m.a_const = a_floor(m);
  validate_model(m, nu > 0.0);
  return m;
}

ModelSpec make_burgers_model(std::shared_ptr<const Basis> basis, double nu,
                             const ModelNoiseOptions& noise) {
  if (nu <= 0.0) throw ParameterError("burgers: viscosity must be positive");
  ModelSpec m = base_model(std::move(basis), noise);
  m.name = "burgers";
  m.drift = DriftKind::Burgers;
  m.nu_visc = nu;
  m.beta = 2.0;
  m.alpha = 2.0;
  m.zeta = 0.0;
  m.l_a = nu;
  m.growth_c = std::max(2.0 * nu * nu, 0.56) + 0.5;
  // Young split of the convection difference against 2 nu |w|_V^2 leaves
  // (3/4) (8 nu)^{-1/3} (1/sqrt(2))^{4/3} 2^{1/3} (|x|_V^{4/3} + |y|_V^{4/3}).
  m.loc_c = 1.1 * 0.75 * std::pow(2.0, -2.0 / 3.0 + 1.0 / 3.0) * std::pow(8.0 * nu, -1.0 / 3.0);
  m.loc_pow = 4.0 / 3.0;
  m.eta0 = 1.0;
  m.big_m = big_m_formula(m.alpha, m.beta, m.eta0);
  m.a_const = a_floor(m);
  validate_model(m);
  return m;
}

ModelSpec make_p_laplacian_model(std::shared_ptr<const Basis> basis, double p,
                                 const ModelNoiseOptions& noise) {
  if (p < 2.0) throw ParameterError("p-laplacian: exponent must be >= 2");
  ModelSpec m = base_model(std::move(basis), noise);
  m.name = "p_laplacian";
  m.drift = DriftKind::PLaplacian;
  m.p_exponent = p;
  m.beta = p;
  m.alpha = 0.0;
  m.zeta = 0.0;
  m.l_a = 1.0;
  // |A(u)|_{V*} <= |u_x|_inf^{p-2} |u_x|_2 and |u_x|_inf <= sqrt(2 n) |u|_V.
  double n = m.basis->n_modes();
  m.growth_c = 1.1 * std::pow(2.0 * n, p * (p - 2.0) / (2.0 * (p - 1.0)));
  m.loc_c = 0.0;
  m.loc_pow = 0.0;
  m.eta0 = 1.0;
  m.big_m = big_m_formula(m.alpha, m.beta, m.eta0);
  m.a_const = a_floor(m);
  validate_model(m);
  return m;
}

ModelSpec make_allen_cahn_model(std::shared_ptr<const Basis> basis, double nu,
                                const ModelNoiseOptions& noise) {
  if (nu <= 0.0) throw ParameterError("allen-cahn: viscosity must be positive");
  ModelSpec m = base_model(std::move(basis), noise);
  m.name = "allen_cahn";
  m.drift = DriftKind::AllenCahn;
  m.nu_visc = nu;
  m.beta = 2.0;
  m.alpha = 4.0;
  m.zeta = 0.0;
  m.l_a = nu;
  m.growth_c = 3.0 * nu * nu + 12.0 / (kPi * kPi) + 0.5;
  m.loc_c = 0.0;
  m.loc_pow = 0.0;
  m.eta0 = 1.0;
  m.big_m = big_m_formula(m.alpha, m.beta, m.eta0);
  m.a_const = 2.0 + a_floor(m);
  validate_model(m);
  return m;
}

void validate_model(const ModelSpec& model, bool require_coercive) {
  if (!model.basis) throw ParameterError("model: missing basis");
  if (static_cast<int>(model.sigma.size()) != model.n_modes())
    throw DimensionError("model: sigma length does not match n_modes");
  if (require_coercive && !(model.l_a > 0.0))
    throw ParameterError("model: coercivity constant L_A must be positive");
  if (model.beta <= 1.0) throw ParameterError("model: beta must exceed 1");
  if (model.clip_bound <= 0.0) throw ParameterError("model: clip bound must be positive");
  double mf = big_m_formula(model.alpha, model.beta, model.eta0);
  if (model.big_m < mf - 1e-12) throw ParameterError("model: declared M below its lower bound");
  if (model.has_jumps()) {
    if (model.jump.direction_mode < 0 || model.jump.direction_mode >= model.n_modes())
      throw DimensionError("model: jump direction mode out of range");
    if (model.jump.sat == JumpSatKind::Saturated && model.jump.s_max <= 0.0)
      throw ParameterError("model: jump saturation bound must be positive");
  }
  for (double s : model.sigma)
    if (!std::isfinite(s)) throw ParameterError("model: non-finite sigma entry");
}

std::vector<double> drift_stiff_diag(const ModelSpec& model) {
  std::vector<double> d(model.n_modes(), 0.0);
  const auto& lam = model.basis->eigenvalues();
  switch (model.drift) {
    case DriftKind::Heat:
    case DriftKind::Burgers:
      for (int k = 0; k < model.n_modes(); ++k) d[k] = -model.nu_visc * lam[k];
      break;
    case DriftKind::AllenCahn:
      for (int k = 0; k < model.n_modes(); ++k) d[k] = -model.nu_visc * lam[k] + 1.0;
      break;
    case DriftKind::PLaplacian:
      break;  // fully nonlinear; no stiff diagonal split off
  }
  return d;
}

GalerkinState apply_drift_nonstiff(const ModelSpec& model, double t, const GalerkinState& u) {
  if (!all_finite(u)) throw InvalidStateError("apply_drift: non-finite state");
  const Basis& b = *u.basis;
  GalerkinState out = zero_state(u.basis);
  switch (model.drift) {
    case DriftKind::Heat:
      break;
    case DriftKind::Burgers: {
      auto vals = evaluate_on_nodes(u, b.quad_nodes());
      auto dvals = evaluate_deriv_on_nodes(u, b.quad_nodes());
      for (size_t j = 0; j < vals.size(); ++j) vals[j] *= dvals[j];
      auto proj = project_samples(b, vals);
      for (int k = 0; k < u.n_modes(); ++k) out.coeffs[k] = -proj[k];
      break;
    }
    case DriftKind::AllenCahn: {
      auto vals = evaluate_on_nodes(u, b.quad_nodes());
      for (double& v : vals) v = v * v * v;
      auto proj = project_samples(b, vals);
      for (int k = 0; k < u.n_modes(); ++k) out.coeffs[k] = -proj[k];
      break;
    }
    case DriftKind::PLaplacian: {
      auto dvals = evaluate_deriv_on_nodes(u, b.quad_nodes());
      double p = model.p_exponent;
      for (double& v : dvals) v = std::pow(std::abs(v), p - 2.0) * v;
      // <A(u), e_k> = -int |u_x|^{p-2} u_x e_k' dx
      double w = b.quad_weight();
      for (int k = 0; k < u.n_modes(); ++k) {
        double acc = 0.0;
        for (size_t j = 0; j < dvals.size(); ++j)
          acc += dvals[j] * b.eval_deriv(k, b.quad_nodes()[j]);
        out.coeffs[k] = -acc * w;
      }
      break;
    }
  }
  if (!all_finite(out)) throw BlowUpError("drift evaluation overflowed", t);
  return out;
}

GalerkinState apply_drift(const ModelSpec& model, double t, const GalerkinState& u) {
  GalerkinState out = apply_drift_nonstiff(model, t, u);
  auto diag = drift_stiff_diag(model);
  for (int k = 0; k < u.n_modes(); ++k) out.coeffs[k] += diag[k] * u.coeffs[k];
  if (!all_finite(out)) throw BlowUpError("drift evaluation overflowed", t);
  return out;
}

GalerkinState apply_diffusion(const ModelSpec& model, double /*t*/, const GalerkinState& u,
                              const GalerkinState& w) {
  check_same_basis(u, w);
  if (static_cast<int>(model.sigma.size()) != u.n_modes())
    throw DimensionError("apply_diffusion: sigma does not match state");
  GalerkinState out = zero_state(u.basis);
  for (int k = 0; k < u.n_modes(); ++k) {
    double mult = model.diffusion == DiffusionKind::Additive
                      ? 1.0
                      : clip_sat(u.coeffs[k], model.clip_bound);
    out.coeffs[k] = model.sigma[k] * mult * w.coeffs[k];
  }
  return out;
}

double diffusion_hs_norm_sq(const ModelSpec& model, double /*t*/, const GalerkinState& u) {
  double acc = 0.0;
  for (int k = 0; k < u.n_modes(); ++k) {
    double mult = model.diffusion == DiffusionKind::Additive
                      ? 1.0
                      : clip_sat(u.coeffs[k], model.clip_bound);
    acc += model.sigma[k] * model.sigma[k] * mult * mult;
  }
  return acc;
}

double jump_amp(const ModelSpec& model, double z) {
  return model.jump.amp_kind == JumpAmpKind::Linear ? model.jump.amp0 * z : model.jump.amp0;
}

double jump_s_factor(const ModelSpec& model, const GalerkinState& u) {
  if (model.jump.sat == JumpSatKind::Unit) return 1.0;
  return clip_sat(1.0 + norm(u, NormKind::H), model.jump.s_max);
}

GalerkinState apply_jump(const ModelSpec& model, double t, const GalerkinState& u, double z) {
  if (!model.jump_measure) throw ParameterError("apply_jump: model has no jump component");
  if (!model.jump_measure->contains(z)) throw DomainError("apply_jump: mark outside Z");
  GalerkinState out = zero_state(u.basis);
  out.coeffs[model.jump.direction_mode] = jump_amp(model, z) * jump_s_factor(model, u);
  (void)t;
  return out;
}

double l_gamma(const ModelSpec& model, double /*t*/, double z) {
  double s_bound = model.jump.sat == JumpSatKind::Unit ? 1.0 : model.jump.s_max;
  return std::abs(jump_amp(model, z)) * s_bound;
}

double r_gamma(const ModelSpec& model, double /*t*/, double z) {
  double lip = model.jump.sat == JumpSatKind::Unit ? 0.0 : 1.0;
  return std::abs(jump_amp(model, z)) * lip;
}

GalerkinState jump_compensation(const ModelSpec& model, double t, const GalerkinState& u,
                                const double* g_row) {
  GalerkinState out = zero_state(u.basis);
  if (!model.has_jumps() || g_row == nullptr) return out;
  const JumpMeasureSpec& nu = *model.jump_measure;
  double factor = 0.0;
  if (nu.kind() == MarkKind::Finite) {
    for (int i = 0; i < nu.mark_count(); ++i)
      factor += jump_amp(model, nu.mark_value(i)) * (g_row[i] - 1.0) * nu.mark_mass(i);
  } else {
    double m = model.jump.amp_kind == JumpAmpKind::Linear ? model.jump.amp0 * nu.moment(1)
                                                          : model.jump.amp0 * nu.total_mass();
    factor = m * (g_row[0] - 1.0);
  }
  out.coeffs[model.jump.direction_mode] = factor * jump_s_factor(model, u);
  (void)t;
  return out;
}

double l_gamma_g_integral(const ModelSpec& model, const double* g_row) {
  if (!model.has_jumps()) return 0.0;
  if (g_row == nullptr) return 0.0;  // g == 1
  const JumpMeasureSpec& nu = *model.jump_measure;
  double s_bound = model.jump.sat == JumpSatKind::Unit ? 1.0 : model.jump.s_max;
  double acc = 0.0;
  if (nu.kind() == MarkKind::Finite) {
    for (int i = 0; i < nu.mark_count(); ++i)
      acc += std::abs(jump_amp(model, nu.mark_value(i))) * std::abs(g_row[i] - 1.0) * nu.mark_mass(i);
  } else {
    double m = model.jump.amp_kind == JumpAmpKind::Linear
                   ? std::abs(model.jump.amp0) * nu.abs_moment(1)
                   : std::abs(model.jump.amp0) * nu.total_mass();
    acc = m * std::abs(g_row[0] - 1.0);
  }
  return acc * s_bound;
}

namespace {

GalerkinState random_ball_state(std::shared_ptr<const Basis> basis, double radius, int decay,
                                RngStream& rng) {
  int n = basis->n_modes();
  std::vector<double> c(n);
  double nrm = 0.0;
  for (int k = 0; k < n; ++k) {
    c[k] = rng.normal() * std::pow(k + 1.0, -static_cast<double>(decay));
    nrm += c[k] * c[k];
  }
  nrm = std::sqrt(nrm);
  double target = radius * rng.uniform();
  if (nrm > 0.0)
    for (double& v : c) v *= target / nrm;
  return make_state(std::move(basis), std::move(c));
}

void record(HypothesisReport& rep, const std::string& key, double margin, double scale) {
  auto& e = rep.entries[key];
  e.checked += 1;
  if (e.checked == 1 || margin < e.worst_margin) e.worst_margin = margin;
  if (margin < -1e-9 * std::max(1.0, scale)) e.violations += 1;
}

}  // namespace

HypothesisReport check_hypotheses(const ModelSpec& model, int n_samples, double radius,
                                  uint64_t rng_seed) {
  HypothesisReport rep;
  for (const char* k : {"H2", "H3", "H4", "H5", "H6", "H7", "H8", "H9"}) rep.entries[k];
  if (n_samples <= 0) return rep;

  RngStream rng(rng_seed, 7001);
  double a_t = model.a_const;
  double b_t = model.b_const;
  double l_b = model.l_b_const();
  double amp_sq_mass = model.r_gamma_sq_mass();
  double h2_const = 0.0;  // int L_gamma^2 d nu
  std::vector<double> probe_marks;
  if (model.has_jumps()) {
    const auto& nu = *model.jump_measure;
    double s_bound = model.jump.sat == JumpSatKind::Unit ? 1.0 : model.jump.s_max;
    h2_const = s_bound * s_bound *
               (model.jump.amp_kind == JumpAmpKind::Linear
                    ? model.jump.amp0 * model.jump.amp0 * nu.moment(2)
                    : model.jump.amp0 * model.jump.amp0 * nu.total_mass());
    if (nu.kind() == MarkKind::Finite) {
      for (int i = 0; i < nu.mark_count(); ++i) probe_marks.push_back(nu.mark_value(i));
    } else {
      for (int j = 0; j < 8; ++j)
        probe_marks.push_back(nu.lower() + (j + 0.5) * (nu.upper() - nu.lower()) / 8.0);
    }
  }

  // Declared-constants part of (H.8).
  {
    double m1 = 2.0 * model.alpha * (model.beta - 1.0) * (model.beta + model.eta0) / model.beta;
    double m2 = 4.0 * (model.beta - 1.0) * (model.beta + model.eta0) / model.beta;
    double mf = std::max(std::max(m1, m2), std::max(4.0, model.alpha + 2.0));
    record(rep, "H8", model.big_m - mf, mf);
  }

  for (int s = 0; s < n_samples; ++s) {
    GalerkinState x = random_ball_state(model.basis, radius, s % 2, rng);
    GalerkinState y = random_ball_state(model.basis, radius, (s + 1) % 2, rng);
    GalerkinState w = x;
    for (int k = 0; k < w.n_modes(); ++k) w.coeffs[k] -= y.coeffs[k];

    double t = 0.0;
    GalerkinState ax = apply_drift(model, t, x);
    GalerkinState ay = apply_drift(model, t, y);
    double xh = norm(x, NormKind::H), xv = norm(x, NormKind::V);
    double yv = norm(y, NormKind::V);
    double wh2 = 0.0;
    for (double c : w.coeffs) wh2 += c * c;

    // (H.2) local monotonicity
    {
      GalerkinState da = ax;
      for (int k = 0; k < da.n_modes(); ++k) da.coeffs[k] -= ay.coeffs[k];
      double lhs = 2.0 * dual_pair(da, w);
      if (model.diffusion == DiffusionKind::DiagonalMultiplicative) {
        double acc = 0.0;
        for (int k = 0; k < x.n_modes(); ++k) {
          double d = clip_sat(x.coeffs[k], model.clip_bound) - clip_sat(y.coeffs[k], model.clip_bound);
          acc += model.sigma[k] * model.sigma[k] * d * d;
        }
        lhs += acc;
      }
      if (model.has_jumps()) {
        double ds = jump_s_factor(model, x) - jump_s_factor(model, y);
        lhs += ds * ds * amp_sq_mass;
      }
      double rho_x = model.loc_c * (1.0 + std::pow(xv, model.loc_pow));
      double eta_y = model.loc_c * (1.0 + std::pow(yv, model.loc_pow));
      double rhs = (a_t + rho_x + eta_y) * wh2;
      record(rep, "H2", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.3) coercivity
    {
      double lhs = dual_pair(ax, x);
      double rhs = a_t * (1.0 + xh * xh) - model.l_a * std::pow(xv, model.beta);
      record(rep, "H3", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.4) growth
    {
      double lhs = std::pow(norm(ax, NormKind::Vstar), model.beta / (model.beta - 1.0));
      double rhs = (a_t + model.growth_c * std::pow(xv, model.beta)) *
                   (1.0 + std::pow(xh, model.alpha));
      record(rep, "H4", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.5) diffusion growth
    {
      double lhs = diffusion_hs_norm_sq(model, t, x);
      double rhs = b_t * (1.0 + xh * xh);
      record(rep, "H5", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.6) jump square integrability, p = 2
    if (model.has_jumps()) {
      double sx = jump_s_factor(model, x);
      double lhs = sx * sx *
                   (model.jump.amp_kind == JumpAmpKind::Linear
                        ? model.jump.amp0 * model.jump.amp0 * model.jump_measure->moment(2)
                        : model.jump.amp0 * model.jump.amp0 * model.jump_measure->total_mass());
      double rhs = h2_const * (1.0 + xh * xh);
      record(rep, "H6", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.7) diffusion Lipschitz
    {
      double lhs = 0.0;
      if (model.diffusion == DiffusionKind::DiagonalMultiplicative) {
        for (int k = 0; k < x.n_modes(); ++k) {
          double d = clip_sat(x.coeffs[k], model.clip_bound) - clip_sat(y.coeffs[k], model.clip_bound);
          lhs += model.sigma[k] * model.sigma[k] * d * d;
        }
      }
      double rhs = l_b * wh2;
      record(rep, "H7", rhs - lhs, std::abs(lhs) + std::abs(rhs));
    }

    // (H.8) jump growth and (H.9) jump Lipschitz, minimum margin over marks
    if (model.has_jumps()) {
      double m8 = 0.0, m9 = 0.0;
      bool first = true;
      double sx = jump_s_factor(model, x);
      double sy = jump_s_factor(model, y);
      for (double z : probe_marks) {
        double gnorm = std::abs(jump_amp(model, z)) * sx;
        double v8 = l_gamma(model, t, z) * (1.0 + xh) - gnorm;
        double dnorm = std::abs(jump_amp(model, z)) * std::abs(sx - sy);
        double v9 = r_gamma(model, t, z) * std::sqrt(wh2) - dnorm;
        if (first || v8 < m8) m8 = v8;
        if (first || v9 < m9) m9 = v9;
        first = false;
      }
      if (!first) {
        record(rep, "H8", m8, 1.0 + xh);
        record(rep, "H9", m9, 1.0 + std::sqrt(wh2));
      }
    }
  }
  return rep;
}

}  // namespace ldp
