#pragma once

#include <complex>
#include <string>
#include <vector>

#include "mitf/errors.hpp"

namespace mitf {

using cplx = std::complex<double>;

// Uniform sampling grid: n samples x_i = a + i h on the window [a, a + n h).
struct FunctionGrid {
  double a = 0.0;
  int n = 0;
  double h = 0.0;

  double length() const { return n * h; }
  double x(int i) const { return a + i * h; }
  double b() const { return a + length(); }
  // Frequency of spectral bin m (m in [-n/2, n/2)).
  double xi(int m) const { return m / length(); }
  double nyquist() const { return 0.5 / h; }

  bool operator==(const FunctionGrid& o) const { return a == o.a && n == o.n && h == o.h; }
};

enum class QuadRule { Rectangle, Trapezoid };

// Spectrum of a sampled function: c[k] approximates fhat(xi_m) with
// m = k - n/2, fhat(xi) = int f(x) e^{-2pi i xi x} dx.
struct Spectrum {
  FunctionGrid grid;
  std::vector<cplx> c;

  int m_lo() const { return -grid.n / 2; }
  int m_hi() const { return grid.n / 2; }  // exclusive
  cplx& at_m(int m) { return c[m - m_lo()]; }
  const cplx& at_m(int m) const { return c[m - m_lo()]; }
  double xi_of(int k) const { return grid.xi(k + m_lo()); }
};

class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(FunctionGrid g, QuadRule rule = QuadRule::Rectangle)
      : grid_(g), rule_(rule), v_(g.n, cplx(0)) {
    check_grid(g);
  }
  SampledFunction(FunctionGrid g, std::vector<cplx> values, QuadRule rule = QuadRule::Rectangle)
      : grid_(g), rule_(rule), v_(std::move(values)) {
    check_grid(g);
    if (int(v_.size()) != g.n) raise(Errc::ConfigInvalid, "value count != n");
  }

  const FunctionGrid& grid() const { return grid_; }
  QuadRule rule() const { return rule_; }
  const std::vector<cplx>& values() const { return v_; }
  std::vector<cplx>& values() { return v_; }
  cplx operator[](int i) const { return v_[i]; }

  double norm2() const;
  double norm1() const;
  cplx integral() const;
  SampledFunction conj() const;

  // Spectral representation (and back).
  Spectrum spectrum() const;
  static SampledFunction from_spectrum(const Spectrum& s, QuadRule rule = QuadRule::Rectangle);

  // tau_v f(x) = f(x - v): shifts the window. Exact for any v.
  SampledFunction translate(double v) const;
  // L^p-normalized dilation D_a^p f(x) = a^{-1/p} f(x/a), a > 0; p <= 0 means
  // the L^inf normalization (no prefactor).
  SampledFunction dilate(double a, double p) const;
  // M_eta f(x) = e^{2pi i eta x} f(x).
  SampledFunction modulate(double eta) const;

  // Trigonometric upsampling by a power-of-two factor.
  SampledFunction refine(int factor) const;
  // Zero-extension onto a larger window; offsets must be integer multiples of h.
  SampledFunction extend(double new_a, int new_n) const;

  void save_binary(const std::string& path) const;
  static SampledFunction load_binary(const std::string& path);
  void save_csv(const std::string& path) const;

 private:
  static void check_grid(const FunctionGrid& g) {
    if (g.n <= 0 || (g.n & (g.n - 1)) != 0) raise(Errc::ConfigInvalid, "n must be a power of two");
    if (!(g.h > 0)) raise(Errc::ConfigInvalid, "h must be positive");
    if (std::abs(g.a) > 1e9 || g.length() > 1e9 || g.h < 1e-9)
      raise(Errc::ScaleOutOfWindow, "sampling window out of range");
  }

  FunctionGrid grid_;
  QuadRule rule_ = QuadRule::Rectangle;
  std::vector<cplx> v_;
};

// L^2 inner product <f, g> = int f conj(g), conjugate linear in g.
// Grids must share h with integer window offset; non-overlap contributes zero.
cplx inner(const SampledFunction& f, const SampledFunction& g);

// Pointwise product on a common grid.
SampledFunction pointwise(const SampledFunction& f, const SampledFunction& g);

}  // namespace mitf
