// initial.hpp — canonical initial conditions for the experiment suite.
//
// Random fields draw one uniform number per node in row-major order from
// splitmix64, so a (seed, grid) pair fully determines the field on any platform.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "gradflow/expr.hpp"
#include "gradflow/grid.hpp"

namespace gradflow {

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform_pm1(uint64_t& state) {
  const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;  // [0,1)
  return 2.0 * u - 1.0;
}

}  // namespace detail

struct BubbleSpec {
  double x = 0.0, y = 0.0, radius = 1.0;
};

// Two tanh bubbles at +1 over a -1 background:
// phi = sum_i tanh((R_i - dist_i)/(sqrt(2) eps)) + 1, valued in [-1, 1] for
// disjoint bubbles (the +1 offset cancels the two exterior tanh's).
inline ScalarField ic_two_bubbles(const Grid& g, double eps, BubbleSpec b1, BubbleSpec b2) {
  require(eps > 0.0, "two-bubbles: eps must be positive");
  ScalarField u(g);
  const double w = std::sqrt(2.0) * eps;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double v = 1.0;
      for (const BubbleSpec& b : {b1, b2}) {
        const double dx = g.x(i) - b.x;
        const double dy = g.y(j) - b.y;
        v += std::tanh((b.radius - std::sqrt(dx * dx + dy * dy)) / w);
      }
      u.at(i, j) = v;
    }
  return u;
}

// Six-petal star: tanh((1.5 + 1.2 cos(6 theta) - 2 pi rho)/(sqrt(2) eps)) around the
// domain center. atan2 is used for theta; since cos(6 theta) has period pi/3 the
// branch choice does not change the field.
inline ScalarField ic_flower(const Grid& g, double eps) {
  require(eps > 0.0, "flower: eps must be positive");
  ScalarField u(g);
  const double cx = 0.5 * g.lx(), cy = 0.5 * g.ly();
  const double w = std::sqrt(2.0) * eps;
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double dx = g.x(i) - cx;
      const double dy = g.y(j) - cy;
      const double theta = std::atan2(dy, dx);
      const double rho = std::sqrt(dx * dx + dy * dy);
      u.at(i, j) = std::tanh((1.5 + 1.2 * std::cos(6.0 * theta) - 2.0 * M_PI * rho) / w);
    }
  return u;
}

// 0.1 (sin 3x sin 2y + sin 5x sin 5y) — the thin-film benchmark profile.
inline ScalarField ic_mbe_sine(const Grid& g) {
  ScalarField u(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i), y = g.y(j);
      u.at(i, j) = 0.1 * (std::sin(3.0 * x) * std::sin(2.0 * y) +
                          std::sin(5.0 * x) * std::sin(5.0 * y));
    }
  return u;
}

// base + amplitude * uniform[-1,1) noise. With subtract_noise_mean the sampled
// noise is centered so mean(phi) == base exactly (needed when the model pins the
// mean, e.g. the nonlocal coupling).
inline ScalarField ic_random_uniform(const Grid& g, double base, double amplitude,
                                     uint64_t seed, bool subtract_noise_mean = false) {
  ScalarField u(g);
  uint64_t state = seed;
  for (size_t n = 0; n < u.size(); ++n) u[n] = amplitude * detail::uniform_pm1(state);
  if (subtract_noise_mean) {
    const double m = mean(u);
    for (size_t n = 0; n < u.size(); ++n) u[n] -= m;
  }
  for (size_t n = 0; n < u.size(); ++n) u[n] += base;
  return u;
}

// Three rotated hexagonal crystallites in square patches over a uniform bath:
// phi = base + c1 (cos(c2/sqrt(3) y_l) cos(c2 x_l) - 0.5 cos(2 c2/sqrt(3) y_l))
// inside each patch, with local coordinates x_l = x sin t + y cos t,
// y_l = -x cos t + y sin t for t in {-pi/4, 0, pi/4}. Patch centers and the side
// length follow the standard supercooled-liquid benchmark on [0,800]^2.
inline ScalarField ic_crystallites(const Grid& g, double base = 0.285, double c1 = 0.446,
                                   double c2 = 0.66) {
  struct Patch {
    double cx, cy, theta;
  };
  const Patch patches[3] = {{350.0, 400.0, -M_PI / 4.0}, {200.0, 200.0, 0.0},
                            {600.0, 300.0, M_PI / 4.0}};
  const double half = 20.0;  // side length 40
  ScalarField u(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double x = g.x(i), y = g.y(j);
      double v = base;
      for (const Patch& p : patches) {
        if (std::abs(x - p.cx) > half || std::abs(y - p.cy) > half) continue;
        const double xl = x * std::sin(p.theta) + y * std::cos(p.theta);
        const double yl = -x * std::cos(p.theta) + y * std::sin(p.theta);
        v = base + c1 * (std::cos(c2 / std::sqrt(3.0) * yl) * std::cos(c2 * xl) -
                         0.5 * std::cos(2.0 * c2 / std::sqrt(3.0) * yl));
        break;
      }
      u.at(i, j) = v;
    }
  return u;
}

inline ScalarField ic_constant(const Grid& g, double value) {
  ScalarField u(g);
  for (size_t n = 0; n < u.size(); ++n) u[n] = value;
  return u;
}

// Arbitrary expression in x, y with pi, Lx, Ly bound.
inline ScalarField ic_expression(const Grid& g, const std::string& expr) {
  Expression e = Expression::parse(expr);
  ScalarField u(g);
  std::unordered_map<std::string, double> vars = {
      {"pi", M_PI}, {"Lx", g.lx()}, {"Ly", g.ly()}, {"x", 0.0}, {"y", 0.0}};
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      vars["x"] = g.x(i);
      vars["y"] = g.y(j);
      u.at(i, j) = e.eval(vars);
    }
  require(u.finite(), "expression initial condition produced non-finite values");
  return u;
}

}  // namespace gradflow
