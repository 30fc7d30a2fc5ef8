// diagnostics.hpp — energy traces and stability audits.
//
// Each scheme family controls its own discrete Lyapunov functional:
//   csav bdf1/cn     E = 1/2 <phi,(L+S)phi> (+ nonlocal term) + sum_i E_i(phi)
//                        + sum_i r_i / alpha
//   csav bdf2        the two-level variant
//                        1/4 [Q(phi^n) + Q(2 phi^n - phi^{n-1})]
//                        + sum_i (3 r_i^n - r_i^{n-1}) / (2 alpha)
//                        + 1/2 sum_i (3 E_i^n - E_i^{n-1})
//   sav / rsav       E_M = 1/2 <phi,(L+S)phi> (+ nonlocal term) + q^2 - C0
//   sicn-ref         no guaranteed functional; the original energy is reported
//
// The single-level csav functional satisfies E_discrete = E_original + sum r/alpha
// identically, so traces expose both without redundancy.
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gradflow/integrator.hpp"

namespace gradflow {

namespace detail {

// 1/2 <u, (L + S + green) u> evaluated with one transform.
inline double quadratic_part(const ModelSpec& m, const ScalarField& u) {
  Spectrum s = forward(u);
  SpectralSymbol sym(m.grid);
  for (size_t n = 0; n < sym.size(); ++n)
    sym[n] = m.linear[n] + m.stabilization[n] + m.green[n];
  return 0.5 * quadratic_form(sym, s);
}

}  // namespace detail

// The continuous functional E(phi); alias kept so callers do not need model.hpp
// naming to express intent.
inline double original_energy(const ModelSpec& m, const ScalarField& phi) {
  return total_energy(m, phi);
}

// Energies a csav run reports: the modified functional E_CM = E + r/alpha and
// the plotted curve E_CM - r/alpha, which collapses to the original functional
// exactly. With alpha = 0 both are the original energy.
struct ReportedEnergy {
  double original = 0.0;
  double modified = 0.0;
};

inline ReportedEnergy csav_reported_energy(const ModelSpec& m, const ScalarField& phi,
                                           double r, double alpha) {
  ReportedEnergy e;
  e.original = total_energy(m, phi);
  e.modified = alpha > 0.0 ? e.original + r / alpha : e.original;
  return e;
}

// The coefficient that multiplied the nonlinear force, normalized so 1 means
// the discrete modified system coincided with the original one.
inline double sav_consistency_ratio(double q_half, double e0_bar, double C0) {
  require(e0_bar + C0 > 0.0, "consistency ratio: E0 + C0 must be positive");
  return q_half / std::sqrt(e0_bar + C0);
}

// Scheme-consistent discrete energy. For csav-bdf2 the two-level form needs the
// previous level; before it exists the single-level value is reported. With
// alpha = 0 (sicn-ref) the original functional is reported instead.
inline double discrete_energy(const ModelSpec& m, const SchemeConfig& cfg, const State& st) {
  if (is_sav_family(cfg.scheme))
    return detail::quadratic_part(m, st.phi) + st.q * st.q - cfg.C0;
  const double alpha = (cfg.scheme == Scheme::SemiImplicitCn) ? 0.0 : cfg.alpha;
  if (alpha == 0.0) return total_energy(m, st.phi);
  if ((cfg.scheme == Scheme::CsavBdf2) && st.has_prev) {
    ScalarField ext = detail::lincomb(2.0, st.phi, -1.0, st.phi_prev);
    // 1/4 [<phi, A phi> + <ext, A ext>] written via the 1/2-weighted helper
    double e = 0.5 * (detail::quadratic_part(m, st.phi) + detail::quadratic_part(m, ext));
    for (size_t i = 0; i < st.r.size(); ++i) {
      e += (3.0 * st.r[i] - st.r_prev[i]) / (2.0 * alpha);
      e += 0.5 * (3.0 * st.e_terms[i] - st.e_terms_prev[i]);
    }
    return e;
  }
  double e = detail::quadratic_part(m, st.phi);
  for (size_t i = 0; i < st.r.size(); ++i) e += st.e_terms[i] + st.r[i] / alpha;
  return e;
}

struct TraceRecord {
  long step = 0;
  double t = 0.0;
  double energy_original = 0.0;  // continuous functional E(phi)
  double energy_discrete = 0.0;  // scheme Lyapunov functional
  double aux = 1.0;              // r[0] (csav) or q (sav)
  double xi0 = 0.0;              // rsav relaxation parameter
  double consistency = 1.0;      // coefficient that multiplied the nonlinear force
  double mass = 0.0;             // mean(phi)
  double dissipation = 0.0;      // <G mu, mu> of the step ending here
  double solve_residual = 0.0;
};

using EnergyTrace = std::vector<TraceRecord>;

inline TraceRecord initial_record(const ModelSpec& m, const SchemeConfig& cfg,
                                  const State& st) {
  TraceRecord rec;
  rec.step = st.step;
  rec.t = st.t;
  rec.energy_original = total_energy(m, st.phi);
  rec.energy_discrete = discrete_energy(m, cfg, st);
  rec.aux = is_sav_family(cfg.scheme) ? st.q : st.r[0];
  rec.mass = mean(st.phi);
  return rec;
}

inline TraceRecord make_record(const ModelSpec& m, const SchemeConfig& cfg,
                               const StepReport& rep) {
  TraceRecord rec;
  rec.step = rep.state.step;
  rec.t = rep.state.t;
  rec.energy_original = total_energy(m, rep.state.phi);
  rec.energy_discrete = discrete_energy(m, cfg, rep.state);
  rec.aux = is_sav_family(cfg.scheme) ? rep.state.q : rep.state.r[0];
  rec.xi0 = rep.xi0;
  rec.consistency = rep.consistency;
  rec.mass = mean(rep.state.phi);
  rec.dissipation = rep.dissipation;
  rec.solve_residual = rep.solve_residual;
  return rec;
}

inline void write_trace_csv(std::ostream& out, const EnergyTrace& trace) {
  out << "step,t,energy_original,energy_discrete,aux,xi0,consistency,mass,dissipation,"
         "solve_residual\n";
  char buf[512];
  for (const TraceRecord& r : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step, r.t,
                  r.energy_original, r.energy_discrete, r.aux, r.xi0, r.consistency, r.mass,
                  r.dissipation, r.solve_residual);
    out << buf;
  }
}

struct EnergyAudit {
  bool monotone = true;
  long first_violation = -1;   // step index of the first increase
  double max_increase = 0.0;   // largest E^{n+1} - E^n above tolerance
  double max_identity_gap = 0.0;  // largest |dE + dt * dissipation| (filled by
                                  // audit_dissipation_identity)
};

// Checks E^{n+1} <= E^n + tol_abs + tol_rel |E^n| along the discrete-energy column.
inline EnergyAudit audit_monotonicity(const EnergyTrace& trace, double tol_abs = 1e-10,
                                      double tol_rel = 1e-12) {
  EnergyAudit a;
  for (size_t n = 1; n < trace.size(); ++n) {
    const double before = trace[n - 1].energy_discrete;
    const double after = trace[n].energy_discrete;
    const double allowed = tol_abs + tol_rel * std::abs(before);
    const double rise = after - before;
    if (rise > allowed) {
      a.monotone = false;
      if (a.first_violation < 0) a.first_violation = trace[n].step;
      a.max_increase = std::max(a.max_increase, rise);
    }
  }
  return a;
}

// Checks the equality E^{n+1} - E^n = -dt <G mu, mu> record by record (valid for
// the cn-family schemes whose theorems are equalities). Requires a trace recorded
// at every step. Returns the audit with max_identity_gap filled.
inline EnergyAudit audit_dissipation_identity(const EnergyTrace& trace, double dt) {
  EnergyAudit a;
  for (size_t n = 1; n < trace.size(); ++n) {
    require(trace[n].step == trace[n - 1].step + 1,
            "dissipation identity audit needs a trace recorded at every step");
    const double de = trace[n].energy_discrete - trace[n - 1].energy_discrete;
    const double gap = std::abs(de + dt * trace[n].dissipation);
    a.max_identity_gap = std::max(a.max_identity_gap, gap);
  }
  return a;
}

}  // namespace gradflow
