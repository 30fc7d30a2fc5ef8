// helpers.hpp — shared test utilities: seeded random fields and small oracles.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gradflow/grid.hpp"

namespace testutil {

// splitmix64; fixed seeds keep every test deterministic.
inline uint64_t next_u64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double uniform(uint64_t& state, double lo, double hi) {
  const double u = static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;  // [0,1)
  return lo + (hi - lo) * u;
}

// Unsmoothed node-wise random field (full spectrum incl. Nyquist content).
inline gradflow::ScalarField random_field(const gradflow::Grid& g, uint64_t seed,
                                          double lo = -1.0, double hi = 1.0) {
  gradflow::ScalarField u(g);
  uint64_t s = seed;
  for (size_t n = 0; n < u.size(); ++n) u[n] = uniform(s, lo, hi);
  return u;
}

// Band-limited random field: a fixed trig polynomial (modes up to 3), so the same
// continuum function can be sampled on any grid. Smooth identities hold to rounding.
inline gradflow::ScalarField trig_field(const gradflow::Grid& g, uint64_t seed,
                                        double amplitude = 1.0) {
  uint64_t s = seed;
  struct Mode {
    int mx, my;
    double a, phase;
  };
  std::vector<Mode> modes;
  for (int mx = 0; mx <= 3; ++mx)
    for (int my = -3; my <= 3; ++my) {
      if (mx == 0 && my < 0) continue;
      modes.push_back({mx, my, uniform(s, -1.0, 1.0), uniform(s, 0.0, 2.0 * M_PI)});
    }
  gradflow::ScalarField u(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double v = 0.0;
      for (const Mode& m : modes)
        v += m.a * std::cos(2.0 * M_PI * (m.mx * g.x(i) / g.lx() + m.my * g.y(j) / g.ly()) +
                            m.phase);
      u.at(i, j) = amplitude * v / static_cast<double>(modes.size());
    }
  return u;
}

inline double max_abs_diff(const gradflow::ScalarField& a, const gradflow::ScalarField& b) {
  double m = 0.0;
  for (size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n] - b[n]));
  return m;
}

inline double max_abs(const gradflow::ScalarField& a) {
  double m = 0.0;
  for (size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a[n]));
  return m;
}

}  // namespace testutil
