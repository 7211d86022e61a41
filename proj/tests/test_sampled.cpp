#include "doctest.h"
#include "mitf/bump.hpp"
#include "mitf/sampled.hpp"

#include <cmath>
#include <filesystem>

using namespace mitf;

namespace {
const FunctionGrid kG{-8.0, 1 << 12, 16.0 / (1 << 12)};

SampledFunction gaussian(const FunctionGrid& g, double c, double s, double freq = 0.0) {
  return sample(g, [&](double x) -> cplx {
    double u = (x - c) / s;
    double ph = 2 * M_PI * freq * x;
    return std::exp(-u * u) * cplx(std::cos(ph), std::sin(ph));
  });
}
}  // namespace

TEST_CASE("spectrum round trip and Parseval") {
  auto f = gaussian(kG, 0.3, 0.7, 1.5);
  auto s = f.spectrum();
  auto back = SampledFunction::from_spectrum(s);
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err < 1e-12);
  double mass = 0;
  for (const auto& z : s.c) mass += std::norm(z);
  mass /= kG.length();
  CHECK(mass == doctest::Approx(f.norm2() * f.norm2()).epsilon(1e-12));
}

TEST_CASE("spectrum localizes a pure frequency") {
  // e^{2 pi i 2 x}: all mass in the xi = 2 bin.
  auto f = sample(kG, [](double x) { return cplx(std::cos(4 * M_PI * x), std::sin(4 * M_PI * x)); });
  auto s = f.spectrum();
  int slot = int(std::lround(2.0 * kG.length())) + kG.n / 2;
  CHECK(std::abs(s.c[slot]) == doctest::Approx(kG.length()).epsilon(1e-10));
  double rest = 0;
  for (int k = 0; k < kG.n; ++k)
    if (k != slot) rest = std::max(rest, std::abs(s.c[k]));
  CHECK(rest < 1e-9);
}

TEST_CASE("dilation preserves the L2 norm at p = 2") {
  auto f = gaussian(kG, 0.0, 0.5);
  auto d = f.dilate(4.0, 2.0);
  CHECK(d.norm2() == doctest::Approx(f.norm2()).epsilon(1e-14));
  CHECK(d.grid().h == doctest::Approx(4 * kG.h));
}

TEST_CASE("modulation shifts the spectrum") {
  auto f = gaussian(kG, 0.0, 0.5);
  double eta = 3.0;  // on the frequency lattice: eta * L integer
  auto m = f.modulate(eta);
  auto s0 = f.spectrum(), s1 = m.spectrum();
  int shift = int(std::lround(eta * kG.length()));
  double err = 0;
  for (int k = 0; k + shift < kG.n; ++k) err = std::max(err, std::abs(s1.c[k + shift] - s0.c[k]));
  CHECK(err < 1e-9);
}

TEST_CASE("translate and modulate commute up to the phase e^{2 pi i eta v}") {
  auto f = gaussian(kG, 0.0, 0.5);
  double v = 0.375, eta = 2.25;
  auto a = f.modulate(eta).translate(v);
  auto b = f.translate(v).modulate(eta);
  // tau_v M_eta f = e^{-2 pi i eta v} M_eta tau_v f
  cplx ph(std::cos(2 * M_PI * eta * v), -std::sin(2 * M_PI * eta * v));
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err = std::max(err, std::abs(a[i] - ph * b[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("inner product with shifted windows") {
  auto f = gaussian(kG, 0.0, 0.5);
  auto g = f.translate(kG.h * 64);
  cplx direct = 0;
  for (int i = 64; i < kG.n; ++i) direct += f[i] * std::conj(f[i - 64]);
  direct *= kG.h;
  CHECK(std::abs(inner(f, g) - direct) < 1e-12);
  CHECK(inner(f, f).real() == doctest::Approx(f.norm2() * f.norm2()));
  CHECK(std::abs(inner(f, f).imag()) < 1e-14);
}

TEST_CASE("refine interpolates band-limited data exactly") {
  auto f = gaussian(kG, 0.1, 0.8);
  auto r = f.refine(2);
  CHECK(r.grid().n == 2 * kG.n);
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err = std::max(err, std::abs(r[2 * i] - f[i]));
  CHECK(err < 1e-10);
}

TEST_CASE("binary round trip") {
  auto f = gaussian(kG, -0.4, 0.3, 2.0);
  auto path = std::filesystem::temp_directory_path() / "mitf_sampled_test.bin";
  f.save_binary(path.string());
  auto g = SampledFunction::load_binary(path.string());
  CHECK(g.grid() == f.grid());
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err = std::max(err, std::abs(g[i] - f[i]));
  CHECK(err == 0.0);
  std::filesystem::remove(path);
}

TEST_CASE("bump is L2 normalized and supported in its interval") {
  BumpProfile prof;
  auto b = bump(-0.5, 0.5, prof, kG);
  CHECK(b.norm2() == doctest::Approx(1.0).epsilon(1e-6));
  for (int i = 0; i < kG.n; ++i) {
    double x = kG.x(i);
    if (x < -0.5 || x > 0.5) CHECK(std::abs(b[i]) == 0.0);
  }
  // |phi(c(I))| <= C |I|^{-1/2}
  int ic = int((0.0 - kG.a) / kG.h);
  CHECK(std::abs(b[ic]) <= 3.0);
}

TEST_CASE("bump construction commutes with dilation") {
  BumpProfile prof;
  auto b1 = bump(-0.5, 0.5, prof, kG);
  auto b2 = bump(-1.0, 1.0, prof, FunctionGrid{2 * kG.a, kG.n, 2 * kG.h});
  auto d = b1.dilate(2.0, 2.0);
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err = std::max(err, std::abs(d[i] - b2[i]));
  CHECK(err < 1e-12);
}

TEST_CASE("bump rejects too coarse grids") {
  BumpProfile prof;
  CHECK_THROWS_AS((void)bump(0.0, 8 * kG.h, prof, kG), Error);
}

TEST_CASE("phi_flat matches (3.1)") {
  CHECK(phi_flat(0.0) == doctest::Approx(1.0));
  CHECK(phi_flat(0.99) == doctest::Approx(1.0));
  CHECK(phi_flat(-1.0) == doctest::Approx(1.0));
  CHECK(phi_flat(2.0) == doctest::Approx(0.0));
  CHECK(phi_flat(-2.3) == doctest::Approx(0.0));
  double v = phi_flat(1.5);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
}

TEST_CASE("mean-zero bump") {
  BumpProfile prof;
  auto b = bump_mean_zero(-1.0, 1.0, prof, kG);
  CHECK(std::abs(b.integral()) < 1e-12);
  CHECK(b.norm2() == doctest::Approx(1.0).epsilon(1e-10));
}
