#include "mitf/sampled.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mitf/fft.hpp"

namespace mitf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double quad_weight(QuadRule rule, int i, int n) {
  if (rule == QuadRule::Trapezoid && (i == 0 || i == n - 1)) return 0.5;
  return 1.0;
}
}  // namespace

double SampledFunction::norm2() const {
  double s = 0;
  for (int i = 0; i < grid_.n; ++i) s += quad_weight(rule_, i, grid_.n) * std::norm(v_[i]);
  return std::sqrt(grid_.h * s);
}

double SampledFunction::norm1() const {
  double s = 0;
  for (int i = 0; i < grid_.n; ++i) s += quad_weight(rule_, i, grid_.n) * std::abs(v_[i]);
  return grid_.h * s;
}

cplx SampledFunction::integral() const {
  cplx s = 0;
  for (int i = 0; i < grid_.n; ++i) s += quad_weight(rule_, i, grid_.n) * v_[i];
  return grid_.h * s;
}

SampledFunction SampledFunction::conj() const {
  auto out = *this;
  for (auto& z : out.v_) z = std::conj(z);
  return out;
}

Spectrum SampledFunction::spectrum() const {
  const int n = grid_.n;
  std::vector<cplx> work = v_;
  fft(work, false);
  Spectrum s{grid_, std::vector<cplx>(n)};
  const double L = grid_.length();
  for (int k = 0; k < n; ++k) {
    int m = k - n / 2;
    int idx = ((m % n) + n) % n;
    double ph = -kTwoPi * m * grid_.a / L;
    s.c[k] = grid_.h * work[idx] * cplx(std::cos(ph), std::sin(ph));
  }
  return s;
}

SampledFunction SampledFunction::from_spectrum(const Spectrum& s, QuadRule rule) {
  const int n = s.grid.n;
  const double L = s.grid.length();
  std::vector<cplx> work(n, cplx(0));
  for (int k = 0; k < n; ++k) {
    int m = k - n / 2;
    int idx = ((m % n) + n) % n;
    double ph = kTwoPi * m * s.grid.a / L;
    work[idx] = s.c[k] * cplx(std::cos(ph), std::sin(ph));
  }
  fft(work, true);
  double scale = 1.0 / s.grid.h;
  for (auto& z : work) z *= scale;
  return SampledFunction(s.grid, std::move(work), rule);
}

SampledFunction SampledFunction::translate(double v) const {
  auto out = *this;
  out.grid_.a += v;
  check_grid(out.grid_);
  return out;
}

SampledFunction SampledFunction::dilate(double a, double p) const {
  if (!(a > 0)) raise(Errc::ConfigInvalid, "dilation factor must be positive");
  auto out = *this;
  out.grid_.a *= a;
  out.grid_.h *= a;
  check_grid(out.grid_);
  if (p > 0) {
    double s = std::pow(a, -1.0 / p);
    for (auto& z : out.v_) z *= s;
  }
  return out;
}

SampledFunction SampledFunction::modulate(double eta) const {
  auto out = *this;
  for (int i = 0; i < grid_.n; ++i) {
    double ph = kTwoPi * eta * grid_.x(i);
    out.v_[i] *= cplx(std::cos(ph), std::sin(ph));
  }
  return out;
}

SampledFunction SampledFunction::refine(int factor) const {
  if (factor <= 0 || (factor & (factor - 1)) != 0)
    raise(Errc::ConfigInvalid, "refine factor must be a power of two");
  if (factor == 1) return *this;
  const int n = grid_.n;
  std::vector<cplx> work = v_;
  fft(work, false);
  int N = n * factor;
  std::vector<cplx> big(N, cplx(0));
  for (int k = 0; k < n; ++k) {
    int m = (k <= n / 2) ? k : k - n;  // signed frequency index
    if (m == n / 2) continue;          // drop the unmatched Nyquist bin
    int idx = ((m % N) + N) % N;
    big[idx] = work[((m % n) + n) % n];
  }
  fft(big, true);
  FunctionGrid g{grid_.a, N, grid_.h / factor};
  std::vector<cplx> vals(N);
  for (int i = 0; i < N; ++i) vals[i] = big[i];  // inverse fft already scaled by 1/N; fix below
  // forward fft on n samples followed by inverse on N scales by n/N.
  double fix = double(N) / double(n);
  for (auto& z : vals) z *= fix;
  return SampledFunction(g, std::move(vals), rule_);
}

SampledFunction SampledFunction::extend(double new_a, int new_n) const {
  double off = (grid_.a - new_a) / grid_.h;
  long off_i = std::lround(off);
  if (std::abs(off - double(off_i)) > 1e-9)
    raise(Errc::ConfigInvalid, "extend offset is not an integer multiple of h");
  if (off_i < 0 || off_i + grid_.n > new_n) raise(Errc::ConfigInvalid, "extend window too small");
  FunctionGrid g{new_a, new_n, grid_.h};
  SampledFunction out(g, rule_);
  for (int i = 0; i < grid_.n; ++i) out.values()[off_i + i] = v_[i];
  return out;
}

void SampledFunction::save_binary(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(Errc::ConfigInvalid, "cannot open " + path);
  double a = grid_.a, h = grid_.h;
  std::int64_t n = grid_.n;
  f.write(reinterpret_cast<const char*>(&a), 8);
  f.write(reinterpret_cast<const char*>(&h), 8);
  f.write(reinterpret_cast<const char*>(&n), 8);
  for (const auto& z : v_) {
    double re = z.real(), im = z.imag();
    f.write(reinterpret_cast<const char*>(&re), 8);
    f.write(reinterpret_cast<const char*>(&im), 8);
  }
}

SampledFunction SampledFunction::load_binary(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(Errc::ConfigInvalid, "cannot open " + path);
  double a, h;
  std::int64_t n;
  f.read(reinterpret_cast<char*>(&a), 8);
  f.read(reinterpret_cast<char*>(&h), 8);
  f.read(reinterpret_cast<char*>(&n), 8);
  FunctionGrid g{a, int(n), h};
  std::vector<cplx> vals(n);
  for (auto& z : vals) {
    double re, im;
    f.read(reinterpret_cast<char*>(&re), 8);
    f.read(reinterpret_cast<char*>(&im), 8);
    z = cplx(re, im);
  }
  if (!f) raise(Errc::ConfigInvalid, "truncated file " + path);
  return SampledFunction(g, std::move(vals));
}

void SampledFunction::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) raise(Errc::ConfigInvalid, "cannot open " + path);
  f << "x,re,im\n";
  char buf[128];
  for (int i = 0; i < grid_.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", grid_.x(i), v_[i].real(), v_[i].imag());
    f << buf;
  }
}

cplx inner(const SampledFunction& f, const SampledFunction& g) {
  const auto& gf = f.grid();
  const auto& gg = g.grid();
  if (std::abs(gf.h - gg.h) > 1e-15 * gf.h)
    raise(Errc::ConfigInvalid, "inner product needs a common sample spacing");
  double off = (gg.a - gf.a) / gf.h;
  long off_i = std::lround(off);
  if (std::abs(off - double(off_i)) > 1e-9)
    raise(Errc::ConfigInvalid, "inner product windows are not aligned");
  long lo = std::max(0L, off_i);
  long hi = std::min(long(gf.n), off_i + gg.n);
  cplx s = 0;
  for (long i = lo; i < hi; ++i) s += f[int(i)] * std::conj(g[int(i - off_i)]);
  return gf.h * s;
}

SampledFunction pointwise(const SampledFunction& f, const SampledFunction& g) {
  if (!(f.grid() == g.grid())) raise(Errc::ConfigInvalid, "pointwise product needs a common grid");
  auto out = f;
  for (int i = 0; i < f.grid().n; ++i) out.values()[i] *= g[i];
  return out;
}

}  // namespace mitf
