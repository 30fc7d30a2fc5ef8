// model.hpp — gradient-flow model descriptors.
//
// A model is phi_t = -G mu with mu = L phi + S phi + sum_i g_i(phi), where G, L, S
// are Fourier multipliers (mobility, leading linear operator, stabilization) and
// each nonlinear term carries a stabilized energy E_i(phi) = int F_i - (s_i/2)<phi,phi>_S
// together with its variational derivative g_i. The auxiliary-variable integrators
// only ever touch models through this struct.
//
// Two additive pieces cover the nonlocal (diblock) model: `extra_linear` is an
// implicit multiplier standing outside the mobility product (the -lambda*sigma*phi
// relaxation), `extra_forcing` its constant source, and `green` the sigma/|k|^2
// symbol entering the energy and the dissipation functional (k = 0 excluded).
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gradflow/grid.hpp"

namespace gradflow {

struct NonlinearTerm {
  double s = 0.0;  // stabilization constant folded into the implicit operator
  std::function<double(const ScalarField&)> energy;       // stabilized E_i(phi)
  std::function<ScalarField(const ScalarField&)> force;   // dE_i/dphi
};

struct ModelSpec {
  std::string name;
  Grid grid;
  SpectralSymbol mobility;        // G(k) >= 0
  SpectralSymbol linear;          // L(k) >= 0
  SpectralSymbol stabilization;   // S(k): s (potential models) or s|k|^2 (thin film)
  std::vector<NonlinearTerm> terms;
  SpectralSymbol extra_linear;    // implicit multiplier outside G*(L+S); usually 0
  double extra_forcing = 0.0;     // constant source paired with extra_linear
  SpectralSymbol green;           // nonlocal energy symbol (diblock); usually 0

  // int F(phi) without any stabilization shift; used by the reported (original)
  // energy so that the split parameter s never changes the energy value.
  std::function<double(const ScalarField&)> raw_bulk_energy;

  double s = 0.0;  // scalar stabilization parameter, for reporting

  bool single_term() const { return terms.size() == 1; }
  double term_energy(const ScalarField& phi) const { return terms[0].energy(phi); }
};

// E(phi) = 1/2 <phi, L phi> + int F(phi)  (+ nonlocal Green term when present).
inline double total_energy(const ModelSpec& m, const ScalarField& phi) {
  Spectrum s = forward(phi);
  double e = 0.5 * quadratic_form(m.linear, s) + m.raw_bulk_energy(phi);
  e += 0.5 * quadratic_form(m.green, s);
  return e;
}

namespace detail {

// int ( a/4 phi^4 + b/2 phi^2 + c ) dOmega
inline double quartic_energy(const ScalarField& phi, double a, double b, double c) {
  Kahan k;
  for (size_t n = 0; n < phi.size(); ++n) {
    const double p2 = phi[n] * phi[n];
    k.add(0.25 * a * p2 * p2 + 0.5 * b * p2 + c);
  }
  return k.sum * phi.grid().cell_area();
}

// a phi^3 + b phi, pointwise
inline ScalarField cubic_force(const ScalarField& phi, double a, double b) {
  ScalarField f(phi.grid());
  for (size_t n = 0; n < phi.size(); ++n) f[n] = a * phi[n] * phi[n] * phi[n] + b * phi[n];
  return f;
}

inline NonlinearTerm double_well_term(double coeff, double s) {
  // E = int ( coeff/4 (phi^2-1)^2 - s/2 phi^2 ), force = coeff (phi^3 - phi) - s phi
  NonlinearTerm t;
  t.s = s;
  t.energy = [coeff, s](const ScalarField& phi) {
    return quartic_energy(phi, coeff, -(coeff + s), 0.25 * coeff);
  };
  t.force = [coeff, s](const ScalarField& phi) {
    return cubic_force(phi, coeff, -(coeff + s));
  };
  return t;
}

}  // namespace detail

// phi_t = -lambda ( -eps^2 lap phi + phi^3 - phi ); mobility carries lambda, mu is lambda-free.
inline ModelSpec build_allen_cahn(const Grid& g, double eps, double lambda, double s) {
  require(eps > 0.0 && lambda > 0.0, "allen-cahn: eps and lambda must be positive");
  ModelSpec m;
  m.name = "allen-cahn";
  m.grid = g;
  m.mobility = SpectralSymbol::constant(g, lambda);
  m.linear = (eps * eps) * SpectralSymbol::neg_laplacian(g);
  m.stabilization = SpectralSymbol::constant(g, s);
  m.extra_linear = SpectralSymbol::constant(g, 0.0);
  m.green = SpectralSymbol::constant(g, 0.0);
  m.terms = {detail::double_well_term(1.0, s)};
  m.raw_bulk_energy = [](const ScalarField& phi) {
    return detail::quartic_energy(phi, 1.0, -1.0, 0.25);
  };
  m.s = s;
  return m;
}

// phi_t = lap mu, mu = lambda ( -eps^2 lap phi + phi^3 - phi ).
// Convention fixed here: lambda lives in mu (so L, f, E0 are lambda-scaled) and the
// mobility is the bare |k|^2. The induced phi dynamics match the equivalent
// lambda-in-mobility form.
inline ModelSpec build_cahn_hilliard(const Grid& g, double eps, double lambda, double s) {
  require(eps > 0.0 && lambda > 0.0, "cahn-hilliard: eps and lambda must be positive");
  ModelSpec m;
  m.name = "cahn-hilliard";
  m.grid = g;
  m.mobility = SpectralSymbol::neg_laplacian(g);
  m.linear = (lambda * eps * eps) * SpectralSymbol::neg_laplacian(g);
  m.stabilization = SpectralSymbol::constant(g, s);
  m.extra_linear = SpectralSymbol::constant(g, 0.0);
  m.green = SpectralSymbol::constant(g, 0.0);
  m.terms = {detail::double_well_term(lambda, s)};
  m.raw_bulk_energy = [lambda](const ScalarField& phi) {
    return detail::quartic_energy(phi, lambda, -lambda, 0.25 * lambda);
  };
  m.s = s;
  return m;
}

// Thin-film growth without slope selection:
// phi_t = -( eps^2 lap^2 phi - s lap phi + r * g(phi) ),
// g(phi) = -div( (|grad phi|^2 - 1 - s) grad phi ),  E0 = 1/4 int (|grad phi|^2 - 1 - s)^2.
inline ModelSpec build_mbe(const Grid& g, double eps2, double s) {
  require(eps2 > 0.0, "mbe: eps^2 must be positive");
  ModelSpec m;
  m.name = "mbe";
  m.grid = g;
  m.mobility = SpectralSymbol::constant(g, 1.0);
  m.linear = SpectralSymbol::from_function(g, [eps2](double kx, double ky) {
    const double k2 = kx * kx + ky * ky;
    return eps2 * k2 * k2;
  });
  m.stabilization = s * SpectralSymbol::neg_laplacian(g);
  m.extra_linear = SpectralSymbol::constant(g, 0.0);
  m.green = SpectralSymbol::constant(g, 0.0);
  NonlinearTerm t;
  t.s = s;
  t.energy = [s](const ScalarField& phi) {
    VectorField dphi = gradient(phi);
    Kahan k;
    for (size_t n = 0; n < phi.size(); ++n) {
      const double w = dphi.x[n] * dphi.x[n] + dphi.y[n] * dphi.y[n] - 1.0 - s;
      k.add(0.25 * w * w);
    }
    return k.sum * phi.grid().cell_area();
  };
  t.force = [s](const ScalarField& phi) {
    VectorField dphi = gradient(phi);
    VectorField flux{ScalarField(phi.grid()), ScalarField(phi.grid())};
    for (size_t n = 0; n < phi.size(); ++n) {
      const double w = dphi.x[n] * dphi.x[n] + dphi.y[n] * dphi.y[n] - 1.0 - s;
      flux.x[n] = w * dphi.x[n];
      flux.y[n] = w * dphi.y[n];
    }
    ScalarField div = divergence(flux);
    for (size_t n = 0; n < div.size(); ++n) div[n] = -div[n];
    return div;
  };
  m.terms = {t};
  m.raw_bulk_energy = [](const ScalarField& phi) {
    VectorField dphi = gradient(phi);
    Kahan k;
    for (size_t n = 0; n < phi.size(); ++n) {
      const double w = dphi.x[n] * dphi.x[n] + dphi.y[n] * dphi.y[n] - 1.0;
      k.add(0.25 * w * w);
    }
    return k.sum * phi.grid().cell_area();
  };
  m.s = s;
  return m;
}

// Phase-field crystal: phi_t = lambda lap mu, mu = (a0 + lap)^2 phi + phi^3 - b0 phi.
inline ModelSpec build_pfc(const Grid& g, double a0, double b0, double lambda, double s) {
  require(lambda > 0.0, "pfc: lambda must be positive");
  ModelSpec m;
  m.name = "pfc";
  m.grid = g;
  m.mobility = lambda * SpectralSymbol::neg_laplacian(g);
  m.linear = SpectralSymbol::from_function(g, [a0](double kx, double ky) {
    const double d = a0 - (kx * kx + ky * ky);
    return d * d;
  });
  m.stabilization = SpectralSymbol::constant(g, s);
  m.extra_linear = SpectralSymbol::constant(g, 0.0);
  m.green = SpectralSymbol::constant(g, 0.0);
  NonlinearTerm t;
  t.s = s;
  t.energy = [b0, s](const ScalarField& phi) {
    return detail::quartic_energy(phi, 1.0, -(b0 + s), 0.0);
  };
  t.force = [b0, s](const ScalarField& phi) {
    return detail::cubic_force(phi, 1.0, -(b0 + s));
  };
  m.terms = {t};
  m.raw_bulk_energy = [b0](const ScalarField& phi) {
    return detail::quartic_energy(phi, 1.0, -b0, 0.0);
  };
  m.s = s;
  return m;
}

// Diblock copolymer (Ohta-Kawasaki):
// phi_t = lambda lap mu - lambda sigma (phi - phibar0), mu = -eps^2 lap phi + phi^3 - phi.
// The sigma relaxation is implicit via extra_linear; the nonlocal energy
// (sigma/2) <phi, (-lap)^{-1} phi> over k != 0 enters through `green`.
inline ModelSpec build_diblock(const Grid& g, double eps, double lambda, double sigma,
                               double phibar0, double s) {
  require(eps > 0.0 && lambda > 0.0 && sigma >= 0.0,
          "diblock: eps, lambda must be positive and sigma nonnegative");
  ModelSpec m;
  m.name = "diblock";
  m.grid = g;
  m.mobility = lambda * SpectralSymbol::neg_laplacian(g);
  m.linear = (eps * eps) * SpectralSymbol::neg_laplacian(g);
  m.stabilization = SpectralSymbol::constant(g, s);
  m.extra_linear = SpectralSymbol::constant(g, lambda * sigma);
  m.extra_forcing = lambda * sigma * phibar0;
  m.green = SpectralSymbol::from_function(g, [sigma](double kx, double ky) {
    const double k2 = kx * kx + ky * ky;
    return k2 > 0.0 ? sigma / k2 : 0.0;
  });
  m.terms = {detail::double_well_term(1.0, s)};
  m.raw_bulk_energy = [](const ScalarField& phi) {
    return detail::quartic_energy(phi, 1.0, -1.0, 0.25);
  };
  m.s = s;
  return m;
}

// Replace a model's nonlinear part with an explicit term list (multi-term splitting).
// The raw bulk energy is synthesized as sum_i E_i + (s_i/2) ||phi||^2.
inline ModelSpec build_multi_term(ModelSpec base, std::vector<NonlinearTerm> terms) {
  require(!terms.empty(), "multi-term model: at least one term required");
  double s_total = 0.0;
  for (const NonlinearTerm& t : terms) s_total += t.s;
  base.stabilization = SpectralSymbol::constant(base.grid, s_total);
  base.s = s_total;
  base.raw_bulk_energy = [terms](const ScalarField& phi) {
    double e = 0.0, s_sum = 0.0;
    for (const NonlinearTerm& t : terms) {
      e += t.energy(phi);
      s_sum += t.s;
    }
    return e + 0.5 * s_sum * inner_product(phi, phi);
  };
  base.terms = std::move(terms);
  return base;
}

// The canonical two-term split of the double-well potential:
// F1 = 1/4 phi^4 (stabilized by s1), F2 = 1/4 - 1/2 phi^2 (s2 = 0). Energies sum to
// the single-term value exactly; forces sum to phi^3 - (1+s1) phi.
inline std::vector<NonlinearTerm> double_well_split(double s1) {
  NonlinearTerm t1;
  t1.s = s1;
  t1.energy = [s1](const ScalarField& phi) {
    return detail::quartic_energy(phi, 1.0, -s1, 0.0);
  };
  t1.force = [s1](const ScalarField& phi) { return detail::cubic_force(phi, 1.0, -s1); };
  NonlinearTerm t2;
  t2.s = 0.0;
  t2.energy = [](const ScalarField& phi) {
    return detail::quartic_energy(phi, 0.0, -1.0, 0.25);
  };
  t2.force = [](const ScalarField& phi) { return detail::cubic_force(phi, 0.0, -1.0); };
  return {t1, t2};
}

}  // namespace gradflow
