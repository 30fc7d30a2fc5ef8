// grid.hpp — uniform periodic grid, real fields, and Fourier-diagonal operator algebra.
//
// Storage convention: fields are row-major with x fastest, index(i,j) = j*Nx + i,
// node (i,j) at (i*hx, j*hy). Spectra use the same layout over the unshifted FFT
// wavenumber lattice, kx[i] = (2*pi/Lx) * (i < Nx/2 ? i : i - Nx).
//
// Transforms are complex-to-complex FFTW with unnormalized forward and 1/(Nx*Ny)
// inverse. Inverse transforms of spectra that should be real verify that the
// imaginary residue is below 1e-10 of the field norm and discard it; anything
// larger is a hard error. First-derivative symbols zero the Nyquist wavenumber
// (the usual symmetric-interpolant convention), so gradients of real fields are
// real to rounding.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "gradflow/errors.hpp"

namespace gradflow {

using cplx = std::complex<double>;

// Compensated (Kahan) accumulator; quadrature and energy sums go through this so
// results are deterministic and resistant to cancellation.
struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

namespace detail {

// FFTW's planner is not thread-safe; serialize plan creation/destruction.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One plan pair per grid, reused through the new-array execute interface.
// Planned with FFTW_UNALIGNED so any properly-sized buffer may be used.
struct FftEngine {
  int nx = 0, ny = 0;
  fftw_plan fwd = nullptr, bwd = nullptr;

  FftEngine(int nx_, int ny_) : nx(nx_), ny(ny_) {
    const size_t n = static_cast<size_t>(nx) * ny;
    std::vector<cplx> a(n), b(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    // dims are (slow, fast) = (Ny, Nx) for index(i,j) = j*Nx + i
    fwd = fftw_plan_dft_2d(ny, nx, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd = fftw_plan_dft_2d(ny, nx, reinterpret_cast<fftw_complex*>(a.data()),
                           reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd || !bwd) throw ValidationError("FFTW plan creation failed");
  }
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;
  ~FftEngine() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }

  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
};

struct GridImpl {
  double Lx, Ly;
  int Nx, Ny;
  double hx, hy;
  std::vector<double> kx, ky;              // true wavenumbers (Nyquist negative)
  std::vector<double> kx_deriv, ky_deriv;  // first-derivative wavenumbers (Nyquist zeroed)
  FftEngine fft;

  GridImpl(double Lx_, double Ly_, int Nx_, int Ny_)
      : Lx(Lx_), Ly(Ly_), Nx(Nx_), Ny(Ny_), hx(Lx_ / Nx_), hy(Ly_ / Ny_), fft(Nx_, Ny_) {
    kx.resize(Nx);
    kx_deriv.resize(Nx);
    for (int i = 0; i < Nx; ++i) {
      int m = (i < Nx / 2) ? i : i - Nx;
      kx[i] = 2.0 * M_PI / Lx * m;
      kx_deriv[i] = (i == Nx / 2) ? 0.0 : kx[i];
    }
    ky.resize(Ny);
    ky_deriv.resize(Ny);
    for (int j = 0; j < Ny; ++j) {
      int m = (j < Ny / 2) ? j : j - Ny;
      ky[j] = 2.0 * M_PI / Ly * m;
      ky_deriv[j] = (j == Ny / 2) ? 0.0 : ky[j];
    }
  }
};

}  // namespace detail

// Value-semantic handle to an immutable periodic grid. Copies share the FFT engine.
class Grid {
 public:
  Grid() = default;

  static Grid make(double Lx, double Ly, int Nx, int Ny) {
    require(Lx > 0.0 && Ly > 0.0, "grid: domain lengths must be positive");
    require(Nx >= 4 && Ny >= 4, "grid: Nx, Ny must be at least 4");
    require(Nx % 2 == 0 && Ny % 2 == 0, "grid: Nx, Ny must be even");
    Grid g;
    g.impl_ = std::make_shared<const detail::GridImpl>(Lx, Ly, Nx, Ny);
    return g;
  }

  bool valid() const { return impl_ != nullptr; }
  int nx() const { return impl_->Nx; }
  int ny() const { return impl_->Ny; }
  double lx() const { return impl_->Lx; }
  double ly() const { return impl_->Ly; }
  double hx() const { return impl_->hx; }
  double hy() const { return impl_->hy; }
  size_t size() const { return static_cast<size_t>(impl_->Nx) * impl_->Ny; }
  double area() const { return impl_->Lx * impl_->Ly; }
  double cell_area() const { return impl_->hx * impl_->hy; }
  double x(int i) const { return i * impl_->hx; }
  double y(int j) const { return j * impl_->hy; }
  double kx(int i) const { return impl_->kx[i]; }
  double ky(int j) const { return impl_->ky[j]; }
  double kx_deriv(int i) const { return impl_->kx_deriv[i]; }
  double ky_deriv(int j) const { return impl_->ky_deriv[j]; }
  const detail::FftEngine& fft() const { return impl_->fft; }

  // Fields are bound to one grid; "same grid" means same geometry and resolution.
  friend bool operator==(const Grid& a, const Grid& b) {
    if (a.impl_ == b.impl_) return true;
    if (!a.impl_ || !b.impl_) return false;
    return a.nx() == b.nx() && a.ny() == b.ny() && a.lx() == b.lx() && a.ly() == b.ly();
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  std::shared_ptr<const detail::GridImpl> impl_;
};

// Real scalar field bound to a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid g, double fill = 0.0)
      : grid_(std::move(g)), v_(grid_.size(), fill) {}

  const Grid& grid() const { return grid_; }
  double& operator[](size_t n) { return v_[n]; }
  double operator[](size_t n) const { return v_[n]; }
  double& at(int i, int j) { return v_[static_cast<size_t>(j) * grid_.nx() + i]; }
  double at(int i, int j) const { return v_[static_cast<size_t>(j) * grid_.nx() + i]; }
  size_t size() const { return v_.size(); }
  std::vector<double>& values() { return v_; }
  const std::vector<double>& values() const { return v_; }

  bool finite() const {
    for (double x : v_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<double> v_;
};

struct VectorField {
  ScalarField x, y;
};

// Complex spectrum over the full wavenumber lattice (same layout as fields).
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(Grid g) : grid_(std::move(g)), v_(grid_.size(), cplx(0.0, 0.0)) {}

  const Grid& grid() const { return grid_; }
  cplx& operator[](size_t n) { return v_[n]; }
  const cplx& operator[](size_t n) const { return v_[n]; }
  cplx& at(int i, int j) { return v_[static_cast<size_t>(j) * grid_.nx() + i]; }
  size_t size() const { return v_.size(); }
  std::vector<cplx>& values() { return v_; }
  const std::vector<cplx>& values() const { return v_; }

 private:
  Grid grid_;
  std::vector<cplx> v_;
};

// Real multiplier in Fourier space (all operators used here are real-symbol).
class SpectralSymbol {
 public:
  SpectralSymbol() = default;
  explicit SpectralSymbol(Grid g, double fill = 0.0)
      : grid_(std::move(g)), v_(grid_.size(), fill) {}

  static SpectralSymbol constant(const Grid& g, double c) { return SpectralSymbol(g, c); }

  // Build from a function of the (true) wavenumbers.
  static SpectralSymbol from_function(const Grid& g,
                                      const std::function<double(double, double)>& f) {
    SpectralSymbol s(g);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) s.v_[static_cast<size_t>(j) * g.nx() + i] = f(g.kx(i), g.ky(j));
    return s;
  }

  // |k|^2, the symbol of -Laplacian.
  static SpectralSymbol neg_laplacian(const Grid& g) {
    return from_function(g, [](double kx, double ky) { return kx * kx + ky * ky; });
  }

  const Grid& grid() const { return grid_; }
  double operator[](size_t n) const { return v_[n]; }
  double& operator[](size_t n) { return v_[n]; }
  size_t size() const { return v_.size(); }
  double at_zero() const { return v_[0]; }

  friend SpectralSymbol operator+(const SpectralSymbol& a, const SpectralSymbol& b) {
    require(a.grid_ == b.grid_, "symbol: grid mismatch");
    SpectralSymbol r = a;
    for (size_t n = 0; n < r.v_.size(); ++n) r.v_[n] += b.v_[n];
    return r;
  }
  friend SpectralSymbol operator*(double c, const SpectralSymbol& a) {
    SpectralSymbol r = a;
    for (double& x : r.v_) x *= c;
    return r;
  }

 private:
  Grid grid_;
  std::vector<double> v_;
};

namespace detail {

inline void check_same_grid(const Grid& a, const Grid& b, const char* op) {
  require(a == b, std::string(op) + ": grid mismatch");
}

// Extract the real part of a complex buffer, verifying the imaginary residue is
// below 1e-10 of the field norm (rounding-level for Hermitian spectra).
inline ScalarField take_real(const Grid& g, const std::vector<cplx>& buf) {
  ScalarField out(g);
  Kahan re2, im2;
  for (size_t n = 0; n < buf.size(); ++n) {
    out[n] = buf[n].real();
    re2.add(buf[n].real() * buf[n].real());
    im2.add(buf[n].imag() * buf[n].imag());
  }
  // Overflowed norms (blowing-up solutions) cannot be compared meaningfully;
  // return the real part and let the step-level finite checks flag divergence.
  if (std::isfinite(re2.sum) && std::isfinite(im2.sum)) {
    const double scale = std::max(re2.sum, 1e-30);
    require(im2.sum <= 1e-20 * scale,
            "inverse transform: imaginary residue exceeds 1e-10 of field norm "
            "(spectrum is not the transform of a real field)");
  }
  return out;
}

}  // namespace detail

// Unnormalized forward transform.
inline Spectrum forward(const ScalarField& u) {
  const Grid& g = u.grid();
  std::vector<cplx> in(g.size());
  for (size_t n = 0; n < in.size(); ++n) in[n] = cplx(u[n], 0.0);
  Spectrum out(g);
  g.fft().forward(in.data(), out.values().data());
  return out;
}

// Inverse transform with 1/(Nx*Ny) normalization; result must be real.
inline ScalarField inverse(const Spectrum& s) {
  const Grid& g = s.grid();
  std::vector<cplx> out(g.size());
  g.fft().backward(s.values().data(), out.data());
  const double norm = 1.0 / static_cast<double>(g.size());
  for (cplx& z : out) z *= norm;
  return detail::take_real(g, out);
}

// u -> F^-1[ sym .* F[u] ]
inline ScalarField apply_symbol(const SpectralSymbol& sym, const ScalarField& u) {
  detail::check_same_grid(sym.grid(), u.grid(), "apply_symbol");
  Spectrum s = forward(u);
  for (size_t n = 0; n < s.size(); ++n) s[n] *= sym[n];
  return inverse(s);
}

// Solve (I + diag(shift)) u = rhs in Fourier space. Pre: 1 + shift(k) != 0.
inline ScalarField solve_shifted_diagonal(const SpectralSymbol& shift, const ScalarField& rhs) {
  detail::check_same_grid(shift.grid(), rhs.grid(), "solve_shifted_diagonal");
  Spectrum s = forward(rhs);
  for (size_t n = 0; n < s.size(); ++n) {
    const double d = 1.0 + shift[n];
    require(d != 0.0, "solve_shifted_diagonal: singular mode (1 + shift = 0)");
    s[n] /= d;
  }
  return inverse(s);
}

inline VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  Spectrum s = forward(u);
  Spectrum sx(g), sy(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const size_t n = static_cast<size_t>(j) * g.nx() + i;
      sx[n] = cplx(0.0, g.kx_deriv(i)) * s[n];
      sy[n] = cplx(0.0, g.ky_deriv(j)) * s[n];
    }
  return {inverse(sx), inverse(sy)};
}

inline ScalarField divergence(const VectorField& v) {
  detail::check_same_grid(v.x.grid(), v.y.grid(), "divergence");
  const Grid& g = v.x.grid();
  Spectrum sx = forward(v.x);
  Spectrum sy = forward(v.y);
  Spectrum s(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const size_t n = static_cast<size_t>(j) * g.nx() + i;
      s[n] = cplx(0.0, g.kx_deriv(i)) * sx[n] + cplx(0.0, g.ky_deriv(j)) * sy[n];
    }
  return inverse(s);
}

inline ScalarField laplacian(const ScalarField& u) {
  const Grid& g = u.grid();
  Spectrum s = forward(u);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const size_t n = static_cast<size_t>(j) * g.nx() + i;
      const double kd_x = g.kx_deriv(i), kd_y = g.ky_deriv(j);
      s[n] *= -(kd_x * kd_x + kd_y * kd_y);
    }
  return inverse(s);
}

// Zero every mode with |m_x| > Nx/3 or |m_y| > Ny/3 (2/3-rule dealiasing; off by
// default everywhere, enabled per run via config).
inline ScalarField filter_two_thirds(const ScalarField& u) {
  const Grid& g = u.grid();
  Spectrum s = forward(u);
  for (int j = 0; j < g.ny(); ++j) {
    const int mj = (j < g.ny() / 2) ? j : g.ny() - j;
    for (int i = 0; i < g.nx(); ++i) {
      const int mi = (i < g.nx() / 2) ? i : g.nx() - i;
      if (3 * mi > g.nx() || 3 * mj > g.ny())
        s[static_cast<size_t>(j) * g.nx() + i] = cplx(0.0, 0.0);
    }
  }
  return inverse(s);
}

// Trapezoid (= midpoint on a periodic uniform grid) quadrature.
inline double integrate(const ScalarField& u) {
  Kahan k;
  for (size_t n = 0; n < u.size(); ++n) k.add(u[n]);
  return k.sum * u.grid().cell_area();
}

inline double inner_product(const ScalarField& u, const ScalarField& v) {
  detail::check_same_grid(u.grid(), v.grid(), "inner_product");
  Kahan k;
  for (size_t n = 0; n < u.size(); ++n) k.add(u[n] * v[n]);
  return k.sum * u.grid().cell_area();
}

inline double mean(const ScalarField& u) { return integrate(u) / u.grid().area(); }

inline double l2_norm(const ScalarField& u) { return std::sqrt(inner_product(u, u)); }

// <u, Op v> evaluated spectrally via Parseval: (hx*hy/(Nx*Ny)) * sum sym |u_hat|^2
// when u == v; general form pairs the two spectra.
inline double quadratic_form(const SpectralSymbol& sym, const Spectrum& s) {
  detail::check_same_grid(sym.grid(), s.grid(), "quadratic_form");
  Kahan k;
  for (size_t n = 0; n < s.size(); ++n) k.add(sym[n] * std::norm(s[n]));
  return k.sum * s.grid().cell_area() / static_cast<double>(s.grid().size());
}

inline double quadratic_form(const SpectralSymbol& sym, const ScalarField& u) {
  return quadratic_form(sym, forward(u));
}

}  // namespace gradflow
