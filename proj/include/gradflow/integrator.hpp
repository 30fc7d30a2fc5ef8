// integrator.hpp — auxiliary-variable time integrators for gradient flows.
//
// Schemes:
//   csav-bdf1 / csav-cn / csav-bdf2   constant-SAV family: one diagonal solve per
//                                     step, explicit scalar ratio r per nonlinear
//                                     term relaxing toward 1 at rate alpha
//   mcsav-bdf1 / mcsav-cn             the same steppers on multi-term models
//                                     (single-term models reduce bitwise)
//   sav-bdf1 / sav-cn                 original SAV with q = sqrt(E0 + C0) coupled
//                                     implicitly; rank-one elimination with two
//                                     diagonal solves
//   rsav-cn                           sav-cn plus the relaxation step pulling q
//                                     back toward sqrt(E0(phi^{n+1}) + C0) within
//                                     the dissipation budget
//   sicn-ref                          csav-cn with alpha = 0 (frozen r = 1);
//                                     the accurate-energy reference scheme
//
// Two-step schemes (cn / bdf2) need one bootstrap level, produced by a bdf1 step
// of the same family, either at the full dt or as 10 substeps of dt/10.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gradflow/model.hpp"

namespace gradflow {

enum class Scheme {
  CsavBdf1,
  CsavCn,
  CsavBdf2,
  SavBdf1,
  SavCn,
  RsavCn,
  McsavBdf1,
  McsavCn,
  SemiImplicitCn,
};

inline const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::CsavBdf1: return "csav-bdf1";
    case Scheme::CsavCn: return "csav-cn";
    case Scheme::CsavBdf2: return "csav-bdf2";
    case Scheme::SavBdf1: return "sav-bdf1";
    case Scheme::SavCn: return "sav-cn";
    case Scheme::RsavCn: return "rsav-cn";
    case Scheme::McsavBdf1: return "mcsav-bdf1";
    case Scheme::McsavCn: return "mcsav-cn";
    case Scheme::SemiImplicitCn: return "sicn-ref";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::CsavBdf1, Scheme::CsavCn, Scheme::CsavBdf2, Scheme::SavBdf1,
                   Scheme::SavCn, Scheme::RsavCn, Scheme::McsavBdf1, Scheme::McsavCn,
                   Scheme::SemiImplicitCn})
    if (name == scheme_name(s)) return s;
  throw ValidationError("unknown scheme '" + name + "'");
}

inline bool is_two_step(Scheme s) {
  switch (s) {
    case Scheme::CsavCn:
    case Scheme::CsavBdf2:
    case Scheme::SavCn:
    case Scheme::RsavCn:
    case Scheme::McsavCn:
    case Scheme::SemiImplicitCn: return true;
    default: return false;
  }
}

inline bool is_sav_family(Scheme s) {
  return s == Scheme::SavBdf1 || s == Scheme::SavCn || s == Scheme::RsavCn;
}

enum class BootstrapPolicy { Bdf1SameDt, Substep10 };

inline const char* bootstrap_name(BootstrapPolicy p) {
  return p == BootstrapPolicy::Bdf1SameDt ? "bdf1" : "substep10";
}

inline BootstrapPolicy parse_bootstrap(const std::string& name) {
  if (name == "bdf1") return BootstrapPolicy::Bdf1SameDt;
  if (name == "substep10") return BootstrapPolicy::Substep10;
  throw ValidationError("unknown bootstrap policy '" + name + "'");
}

struct SchemeConfig {
  Scheme scheme = Scheme::CsavCn;
  double dt = 1e-3;
  double alpha = 1e-4;  // csav relaxation rate (ignored by sav/sicn)
  double C0 = 1.0;      // sav energy shift
  double eta = 0.99;    // rsav dissipation-budget fraction, in [0, 1]
  BootstrapPolicy bootstrap = BootstrapPolicy::Bdf1SameDt;
  bool dealias = false;  // 2/3-rule truncation of nonlinear forces
};

struct State {
  long step = 0;
  double t = 0.0;
  ScalarField phi;
  std::vector<double> r;        // csav ratios, one per nonlinear term
  std::vector<double> e_terms;  // cached stabilized term energies E_i(phi)
  double q = 0.0;               // sav auxiliary variable
  bool has_prev = false;        // previous level present (two-step schemes)
  ScalarField phi_prev;
  std::vector<double> r_prev;
  std::vector<double> e_terms_prev;
};

struct StepReport {
  State state;
  ScalarField mu;              // chemical potential the step used
  double dissipation = 0.0;    // <G mu, mu> >= 0
  double consistency = 1.0;    // coefficient that multiplied the nonlinear force
  double q_tilde = 0.0;        // rsav pre-relaxation q (otherwise q)
  double xi0 = 0.0;            // rsav relaxation parameter
  double solve_residual = 0.0; // relative residual of the diagonal solve
};

inline void validate_config(const ModelSpec& m, const SchemeConfig& cfg) {
  require(cfg.dt > 0.0, "config: dt must be positive");
  require(cfg.alpha >= 0.0, "config: alpha must be nonnegative");
  require(cfg.eta >= 0.0 && cfg.eta <= 1.0, "config: eta must lie in [0, 1]");
  require(!m.terms.empty(), "config: model has no nonlinear terms");
  if (is_sav_family(cfg.scheme))
    require(m.single_term(), "config: sav schemes require a single-term model");
}

inline State init_state(const ModelSpec& m, const SchemeConfig& cfg, ScalarField phi0) {
  validate_config(m, cfg);
  require(phi0.grid() == m.grid, "init_state: field grid does not match the model");
  require(phi0.finite(), "init_state: initial field has non-finite entries");
  State st;
  st.phi = std::move(phi0);
  st.r.assign(m.terms.size(), 1.0);
  st.e_terms.resize(m.terms.size());
  for (size_t i = 0; i < m.terms.size(); ++i) st.e_terms[i] = m.terms[i].energy(st.phi);
  if (is_sav_family(cfg.scheme)) {
    const double shifted = st.e_terms[0] + cfg.C0;
    require(shifted > 0.0,
            "init_state: E0(phi0) + C0 must be positive (increase C0 in the config)");
    st.q = std::sqrt(shifted);
  }
  return st;
}

// Minimal relaxation parameter: min xi in [0,1] s.t. a xi^2 + b xi + c <= 0, with
// a, b, c from the relaxed-SAV constraint (q^{n+1})^2 - (q~)^2 <= budget,
// q^{n+1} = xi q~ + (1-xi) sqrt(E0 + C0). xi = 1 is always feasible (budget >= 0).
inline double relax_xi(double q_tilde, double e0_new, double C0, double budget) {
  const double shifted = e0_new + C0;
  require(shifted > 0.0, "relax_xi: E0 + C0 must be positive");
  const double rho = std::sqrt(shifted);
  const double a = (q_tilde - rho) * (q_tilde - rho);
  const double b = 2.0 * (q_tilde - rho) * rho;
  const double c = shifted - q_tilde * q_tilde - budget;
  if (a < 1e-14 * std::max(1.0, q_tilde * q_tilde)) {
    // degenerate quadratic: q~ ~ rho, constraint is effectively b xi + c <= 0
    if (c <= 0.0) return 0.0;
    if (b < 0.0) return std::clamp(-c / b, 0.0, 1.0);
    return 1.0;
  }
  double disc = b * b - 4.0 * a * c;  // = 4 a (q~^2 + budget) >= 0 in exact arithmetic
  if (disc < 0.0) disc = 0.0;
  const double xi = (-b - std::sqrt(disc)) / (2.0 * a);
  return std::clamp(xi, 0.0, 1.0);
}

namespace detail {

enum class Variant { Bdf1, Cn, Bdf2 };

inline ScalarField lincomb(double a, const ScalarField& u, double b, const ScalarField& v) {
  ScalarField w(u.grid());
  for (size_t n = 0; n < w.size(); ++n) w[n] = a * u[n] + b * v[n];
  return w;
}

// P(k) = G(k) (L(k) + S(k)) + extra(k): the implicit multiplier of the solve.
inline SpectralSymbol implicit_symbol(const ModelSpec& m) {
  SpectralSymbol p(m.grid);
  for (size_t n = 0; n < p.size(); ++n)
    p[n] = m.mobility[n] * (m.linear[n] + m.stabilization[n]) + m.extra_linear[n];
  return p;
}

// Multiplier of phi in the chemical potential (Green symbol included so the
// recorded dissipation matches the nonlocal model's Lyapunov identity).
inline SpectralSymbol mu_symbol(const ModelSpec& m) {
  SpectralSymbol p(m.grid);
  for (size_t n = 0; n < p.size(); ++n) p[n] = m.linear[n] + m.stabilization[n] + m.green[n];
  return p;
}

inline void check_spectrum_finite(const Spectrum& s, long step) {
  for (size_t n = 0; n < s.size(); ++n)
    if (!std::isfinite(s[n].real()) || !std::isfinite(s[n].imag()))
      throw DivergenceError(step, "time step produced a non-finite field");
}

inline void check_scalar_finite(double x, long step, const char* what) {
  if (!std::isfinite(x))
    throw DivergenceError(step, std::string("time step produced a non-finite ") + what);
}

// Divide rhs by (1 + c_imp P) mode-wise; returns the relative solve residual.
inline double diagonal_solve(Spectrum& rhs, const SpectralSymbol& P, double c_imp) {
  double max_rhs = 0.0;
  for (size_t n = 0; n < rhs.size(); ++n) max_rhs = std::max(max_rhs, std::abs(rhs[n]));
  double max_res = 0.0;
  for (size_t n = 0; n < rhs.size(); ++n) {
    const double d = 1.0 + c_imp * P[n];
    require(d != 0.0, "diagonal solve: singular mode (1 + shift = 0)");
    const cplx u = rhs[n] / d;
    max_res = std::max(max_res, std::abs(u * d - rhs[n]));
    rhs[n] = u;
  }
  return max_res / std::max(1.0, max_rhs);
}

// Shared CSAV stepper (also serves mcsav-* and, with alpha = 0, sicn-ref).
inline StepReport csav_step(const ModelSpec& m, const SchemeConfig& cfg, const State& st,
                            Variant v) {
  const Grid& g = m.grid;
  const double dt = cfg.dt;
  const long new_step = st.step + 1;
  const size_t nt = m.terms.size();

  // Evaluation point and force coefficients. cn extrapolates to t^{n+1/2}; bdf2
  // extrapolates to t^{n+1} (required for second order since its derivative and
  // implicit part are centered there). The energy-stability proofs cancel the
  // nonlinear terms between the mu-equation and the r-update for any explicit
  // (phi_e, r_e), so the Lyapunov structure is independent of this choice.
  ScalarField phi_e;
  std::vector<double> r_e(nt);
  if (v == Variant::Bdf1) {
    phi_e = st.phi;
    r_e = st.r;
  } else if (v == Variant::Cn) {
    require(st.has_prev, "two-step scheme stepped without a bootstrap level");
    phi_e = lincomb(1.5, st.phi, -0.5, st.phi_prev);
    for (size_t i = 0; i < nt; ++i) r_e[i] = 1.5 * st.r[i] - 0.5 * st.r_prev[i];
  } else {
    require(st.has_prev, "two-step scheme stepped without a bootstrap level");
    phi_e = lincomb(2.0, st.phi, -1.0, st.phi_prev);
    for (size_t i = 0; i < nt; ++i) r_e[i] = 2.0 * st.r[i] - st.r_prev[i];
  }

  std::vector<ScalarField> gi(nt);
  ScalarField gw(g);
  for (size_t i = 0; i < nt; ++i) {
    gi[i] = m.terms[i].force(phi_e);
    if (cfg.dealias) gi[i] = filter_two_thirds(gi[i]);
    for (size_t n = 0; n < gw.size(); ++n) gw[n] += r_e[i] * gi[i][n];
  }

  const SpectralSymbol P = implicit_symbol(m);
  Spectrum phin_hat = forward(st.phi);
  Spectrum gw_hat = forward(gw);

  double c_imp = dt;  // bdf1
  Spectrum rhs(g);
  if (v == Variant::Bdf1) {
    for (size_t n = 0; n < rhs.size(); ++n)
      rhs[n] = phin_hat[n] - dt * m.mobility[n] * gw_hat[n];
    rhs[0] += dt * m.extra_forcing * static_cast<double>(g.size());
  } else if (v == Variant::Cn) {
    c_imp = 0.5 * dt;
    for (size_t n = 0; n < rhs.size(); ++n)
      rhs[n] = (1.0 - 0.5 * dt * P[n]) * phin_hat[n] - dt * m.mobility[n] * gw_hat[n];
    rhs[0] += dt * m.extra_forcing * static_cast<double>(g.size());
  } else {  // bdf2
    c_imp = 2.0 * dt / 3.0;
    Spectrum phim_hat = forward(st.phi_prev);
    for (size_t n = 0; n < rhs.size(); ++n)
      rhs[n] = (4.0 * phin_hat[n] - phim_hat[n]) / 3.0 - c_imp * m.mobility[n] * gw_hat[n];
    rhs[0] += c_imp * m.extra_forcing * static_cast<double>(g.size());
  }

  const double residual = diagonal_solve(rhs, P, c_imp);
  check_spectrum_finite(rhs, new_step);
  Spectrum& phinew_hat = rhs;
  ScalarField phi_new = inverse(phinew_hat);

  // auxiliary ratio updates
  std::vector<double> r_new(nt), e_new(nt);
  ScalarField dphi(g);
  if (v == Variant::Bdf2) {
    for (size_t n = 0; n < dphi.size(); ++n)
      dphi[n] = 3.0 * phi_new[n] - 4.0 * st.phi[n] + st.phi_prev[n];
  } else {
    for (size_t n = 0; n < dphi.size(); ++n) dphi[n] = phi_new[n] - st.phi[n];
  }
  for (size_t i = 0; i < nt; ++i) {
    e_new[i] = m.terms[i].energy(phi_new);
    check_scalar_finite(e_new[i], new_step, "term energy");
    const double work = inner_product(gi[i], dphi);
    if (v == Variant::Bdf2) {
      r_new[i] = (4.0 * st.r[i] - st.r_prev[i]) / 3.0 +
                 (cfg.alpha / 3.0) *
                     (-(3.0 * e_new[i] - 4.0 * st.e_terms[i] + st.e_terms_prev[i]) +
                      r_e[i] * work);
    } else {
      r_new[i] = st.r[i] + cfg.alpha * (-(e_new[i] - st.e_terms[i]) + r_e[i] * work);
    }
    check_scalar_finite(r_new[i], new_step, "auxiliary ratio r");
  }

  // chemical potential and dissipation, assembled spectrally
  const SpectralSymbol muL = mu_symbol(m);
  Spectrum mu_hat(g);
  if (v == Variant::Cn) {
    for (size_t n = 0; n < mu_hat.size(); ++n)
      mu_hat[n] = muL[n] * 0.5 * (phin_hat[n] + phinew_hat[n]) + gw_hat[n];
  } else {
    for (size_t n = 0; n < mu_hat.size(); ++n)
      mu_hat[n] = muL[n] * phinew_hat[n] + gw_hat[n];
  }
  const double dissipation = quadratic_form(m.mobility, mu_hat);

  StepReport rep;
  rep.state.step = new_step;
  rep.state.t = static_cast<double>(new_step) * dt;
  rep.state.phi_prev = st.phi;
  rep.state.r_prev = st.r;
  rep.state.e_terms_prev = st.e_terms;
  rep.state.has_prev = true;
  rep.state.phi = std::move(phi_new);
  rep.state.r = std::move(r_new);
  rep.state.e_terms = std::move(e_new);
  rep.state.q = st.q;
  rep.mu = inverse(mu_hat);
  rep.dissipation = dissipation;
  rep.consistency = r_e[0];
  rep.solve_residual = residual;
  return rep;
}

// Shared SAV stepper: bdf1, cn, and relaxed cn.
inline StepReport sav_step(const ModelSpec& m, const SchemeConfig& cfg, const State& st,
                           Variant v, bool relaxed) {
  require(m.single_term(), "sav schemes require a single-term model");
  const Grid& g = m.grid;
  const double dt = cfg.dt;
  const long new_step = st.step + 1;
  const bool cn = (v == Variant::Cn);

  ScalarField phi_e;
  double e0_bar;
  if (cn) {
    require(st.has_prev, "two-step scheme stepped without a bootstrap level");
    phi_e = lincomb(1.5, st.phi, -0.5, st.phi_prev);
    e0_bar = m.term_energy(phi_e);
  } else {
    phi_e = st.phi;
    e0_bar = st.e_terms[0];
  }
  const double shifted = e0_bar + cfg.C0;
  require(shifted > 0.0, "sav step: E0 + C0 must stay positive (increase C0)");
  const double rho = std::sqrt(shifted);

  ScalarField b = m.terms[0].force(phi_e);
  if (cfg.dealias) b = filter_two_thirds(b);
  for (size_t n = 0; n < b.size(); ++n) b[n] /= 2.0 * rho;

  const SpectralSymbol P = implicit_symbol(m);
  Spectrum phin_hat = forward(st.phi);
  Spectrum b_hat = forward(b);
  const double c_imp = cn ? 0.5 * dt : dt;
  const double b_phin = inner_product(b, st.phi);

  // rank-one elimination: phi^{n+1} = phi1 + gamma phi2 with gamma = <b, phi^{n+1}>
  const double c0 = cn ? st.q - 0.5 * b_phin : st.q - b_phin;
  Spectrum rhs1(g), rhs2(g);
  for (size_t n = 0; n < rhs1.size(); ++n) {
    const cplx base = cn ? (1.0 - 0.5 * dt * P[n]) * phin_hat[n] : phin_hat[n];
    rhs1[n] = base - dt * m.mobility[n] * 2.0 * b_hat[n] * c0;
    rhs2[n] = -dt * m.mobility[n] * (cn ? b_hat[n] : 2.0 * b_hat[n]);
  }
  rhs1[0] += dt * m.extra_forcing * static_cast<double>(g.size());

  const double res1 = diagonal_solve(rhs1, P, c_imp);
  const double res2 = diagonal_solve(rhs2, P, c_imp);
  check_spectrum_finite(rhs1, new_step);
  check_spectrum_finite(rhs2, new_step);
  ScalarField phi1 = inverse(rhs1);
  ScalarField phi2 = inverse(rhs2);

  const double denom = 1.0 - inner_product(b, phi2);
  require(denom > 0.0, "sav step: rank-one denominator not positive");
  const double gamma = inner_product(b, phi1) / denom;
  check_scalar_finite(gamma, new_step, "rank-one coefficient");

  ScalarField phi_new = lincomb(1.0, phi1, gamma, phi2);
  Spectrum phinew_hat(g);
  for (size_t n = 0; n < phinew_hat.size(); ++n) phinew_hat[n] = rhs1[n] + gamma * rhs2[n];

  const double q_tilde = st.q + gamma - b_phin;
  check_scalar_finite(q_tilde, new_step, "auxiliary variable q");

  const SpectralSymbol muL = mu_symbol(m);
  const double q_mu = cn ? 0.5 * (st.q + q_tilde) : q_tilde;
  Spectrum mu_hat(g);
  for (size_t n = 0; n < mu_hat.size(); ++n) {
    const cplx phi_mid = cn ? 0.5 * (phin_hat[n] + phinew_hat[n]) : phinew_hat[n];
    mu_hat[n] = muL[n] * phi_mid + 2.0 * b_hat[n] * q_mu;
  }
  const double dissipation = quadratic_form(m.mobility, mu_hat);

  double q_new = q_tilde, xi0 = 0.0;
  double e0_new = m.term_energy(phi_new);
  check_scalar_finite(e0_new, new_step, "term energy");
  if (relaxed) {
    const double budget = dt * cfg.eta * dissipation;
    xi0 = relax_xi(q_tilde, e0_new, cfg.C0, budget);
    q_new = xi0 * q_tilde + (1.0 - xi0) * std::sqrt(e0_new + cfg.C0);
  }

  StepReport rep;
  rep.state.step = new_step;
  rep.state.t = static_cast<double>(new_step) * dt;
  rep.state.phi_prev = st.phi;
  rep.state.r_prev = st.r;
  rep.state.e_terms_prev = st.e_terms;
  rep.state.has_prev = true;
  rep.state.phi = std::move(phi_new);
  rep.state.r = st.r;
  rep.state.e_terms = {e0_new};
  rep.state.q = q_new;
  rep.mu = inverse(mu_hat);
  rep.dissipation = dissipation;
  rep.consistency = cn ? 0.5 * (st.q + q_tilde) / rho : q_tilde / rho;
  rep.q_tilde = q_tilde;
  rep.xi0 = xi0;
  rep.solve_residual = std::max(res1, res2);
  return rep;
}

}  // namespace detail

// Advance one step. Two-step schemes require st.has_prev (see bootstrap_step).
inline StepReport step(const ModelSpec& m, const SchemeConfig& cfg, const State& st) {
  using detail::Variant;
  switch (cfg.scheme) {
    case Scheme::CsavBdf1:
    case Scheme::McsavBdf1: return detail::csav_step(m, cfg, st, Variant::Bdf1);
    case Scheme::CsavCn:
    case Scheme::McsavCn: return detail::csav_step(m, cfg, st, Variant::Cn);
    case Scheme::SemiImplicitCn: {
      SchemeConfig c = cfg;
      c.alpha = 0.0;  // frozen r = 1
      return detail::csav_step(m, c, st, Variant::Cn);
    }
    case Scheme::CsavBdf2: return detail::csav_step(m, cfg, st, Variant::Bdf2);
    case Scheme::SavBdf1: return detail::sav_step(m, cfg, st, Variant::Bdf1, false);
    case Scheme::SavCn: return detail::sav_step(m, cfg, st, Variant::Cn, false);
    case Scheme::RsavCn: return detail::sav_step(m, cfg, st, Variant::Cn, true);
  }
  throw ValidationError("step: unhandled scheme");
}

// Produce the first level for a two-step scheme with a first-order step of the
// same family, either one step at the full dt or 10 substeps at dt/10. The
// returned state carries (phi^1, phi^0) at spacing dt either way.
inline StepReport bootstrap_step(const ModelSpec& m, const SchemeConfig& cfg, const State& st) {
  require(st.step == 0 && !st.has_prev, "bootstrap_step: expected the initial state");
  SchemeConfig c1 = cfg;
  c1.scheme = is_sav_family(cfg.scheme) ? Scheme::SavBdf1 : Scheme::CsavBdf1;
  if (cfg.scheme == Scheme::SemiImplicitCn) c1.alpha = 0.0;

  if (cfg.bootstrap == BootstrapPolicy::Bdf1SameDt) return step(m, c1, st);

  c1.dt = cfg.dt / 10.0;
  State s = st;
  StepReport rep;
  for (int k = 0; k < 10; ++k) {
    rep = step(m, c1, s);
    s = rep.state;
  }
  rep.state.step = 1;
  rep.state.t = cfg.dt;
  rep.state.phi_prev = st.phi;
  rep.state.r_prev = st.r;
  rep.state.e_terms_prev = st.e_terms;
  rep.state.has_prev = true;
  return rep;
}

// Bootstrap-aware stepping: what run loops should call.
inline StepReport advance(const ModelSpec& m, const SchemeConfig& cfg, const State& st) {
  if (is_two_step(cfg.scheme) && !st.has_prev) return bootstrap_step(m, cfg, st);
  return step(m, cfg, st);
}

}  // namespace gradflow
