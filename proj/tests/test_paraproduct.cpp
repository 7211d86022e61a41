#include "doctest.h"
#include "mitf/paraproduct.hpp"

#include <cmath>
#include <random>

#include "mitf/bump.hpp"

using namespace mitf;

namespace {

const FunctionGrid kG{-16.0, 1 << 12, 32.0 / (1 << 12)};  // h = 2^-7, nyquist 64
const std::array<double, 3> kBeta{-1.0, 1.0, 0.0};

std::shared_ptr<PsiKit> kit() {
  static auto k = std::make_shared<PsiKit>(kBeta, kG);
  return k;
}

SampledFunction bandlimited_symbol(double xi_lo, double xi_hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Spectrum s{kG, std::vector<cplx>(kG.n, cplx(0))};
  for (int k = 0; k < kG.n; ++k) {
    double xi = s.xi_of(k);
    double axi = std::abs(xi);
    if (axi > xi_lo && axi < xi_hi) {
      double env = std::exp(-2.0 / std::max(1e-12, (axi - xi_lo) * (xi_hi - axi)));
      s.c[k] = env * cplx(nd(rng), nd(rng));
    }
  }
  // Real symbol: make the spectrum Hermitian.
  for (int k = 0; k < kG.n; ++k) {
    int m = k - kG.n / 2;
    int kk = -m + kG.n / 2;
    if (kk < 0 || kk >= kG.n || kk < k) continue;
    cplx avg = 0.5 * (s.c[k] + std::conj(s.c[kk]));
    s.c[k] = avg;
    s.c[kk] = std::conj(avg);
  }
  auto f = SampledFunction::from_spectrum(s);
  // Spatial envelope keeps the translation lattice truncation harmless.
  for (int i = 0; i < kG.n; ++i) f.values()[i] *= phi_flat(kG.x(i) / 6.0);
  double scale = std::max(1e-12, f.norm2());
  for (auto& z : f.values()) z /= scale;
  return f;
}

SampledFunction wide_one() {
  return sample(kG, [](double) { return cplx(1.0, 0.0); });
}

}  // namespace

TEST_CASE("psi construction invariants") {
  auto k = kit();
  CHECK(k->mean_residual() < 1e-10);
  CHECK(k->psi_norm2() > 0);
  CHECK(k->band_leak() < 1e-8);
  CHECK(k->r0() == doctest::Approx(4.0));  // 8 - 2|b-a|/max(|a|,|b|) at (-1,1,0)
  // psi-hat vanishes near the origin.
  double inner_peak = 0, global_peak = 0;
  for (int m = 0; m < kG.n; ++m) {
    double xi = kG.xi(m - kG.n / 2);
    double v = std::abs(k->psi_hat(xi));
    global_peak = std::max(global_peak, v);
    if (std::abs(xi) <= k->r0() - 0.25) inner_peak = std::max(inner_peak, v);
  }
  CHECK(inner_peak < 1e-8 * global_peak);
  CHECK_THROWS_AS(PsiKit({1.0, 1.0, 0.0}, kG), Error);
}

TEST_CASE("inner factor matches the closed-form Fourier identity") {
  // g(x) = int phi1(x + a t) phi2(x + b t) dt has
  // g-hat(xi) = |b-a|^{-1} Phi(b xi/(b-a)) Phi(-a xi/(b-a)).
  auto k = kit();
  double a = kBeta[0] - kBeta[2], b = kBeta[1] - kBeta[2];
  SampledFunction g(kG);
  double t_max = 64.0, dt = 1.0 / 16.0;
  int nt = int(2 * t_max / dt);
  for (int i = 0; i < kG.n; ++i) {
    double x = kG.x(i);
    double acc = 0;
    for (int it = 0; it < nt; ++it) {
      double t = -t_max + (it + 0.5) * dt;
      acc += k->generator_at(0, x + a * t) * k->generator_at(1, x + b * t);
    }
    g.values()[i] = acc * dt;
  }
  Spectrum gs = g.spectrum();
  double err = 0, peak = 0;
  for (int m = 0; m < kG.n; ++m) {
    double xi = gs.xi_of(m);
    double expect = phi_flat(b * xi / (b - a)) * phi_flat(-a * xi / (b - a)) / std::abs(b - a);
    err = std::max(err, std::abs(gs.c[m] - expect));
    peak = std::max(peak, std::abs(expect));
  }
  CHECK(err < 1e-6 * peak);
}

TEST_CASE("the (7.1) factor has zero x-integral for each t") {
  auto k = kit();
  double a = kBeta[0] - kBeta[2], b = kBeta[1] - kBeta[2];
  for (double t : {-3.0, -0.5, 0.25, 1.0, 7.5}) {
    cplx acc = 0;
    for (int i = 0; i < kG.n; ++i) {
      double x = kG.x(i);
      acc += k->generator_at(0, x + a * t) * k->generator_at(1, x + b * t) *
             k->generator_at(2, x);
    }
    acc *= kG.h;
    CHECK(std::abs(acc) < 1e-8);
  }
}

TEST_CASE("calderon constant is xi0 invariant") {
  auto k = kit();
  CHECK(k->calderon_constant() > 0);
  CHECK(k->calderon_spread() < 1e-6);
}

TEST_CASE("calderon coefficients: zero symbol, carleson normalization, reconstruction") {
  auto k = kit();
  SampledFunction zero(kG);
  auto sym0 = calderon_coeffs(*k, zero, 3);
  CHECK(sym0.coef.empty());

  auto b = bandlimited_symbol(2.5, 5.0, 5);
  auto sym = calderon_coeffs(*k, b, 4);
  REQUIRE(!sym.coef.empty());
  // |c_{k,n}| 2^{-k/2} uniformly bounded (Carleson normalization).
  double bound = 0;
  for (const auto& e : sym.coef) bound = std::max(bound, std::abs(e.c) * std::pow(2.0, -e.k / 2));
  CHECK(bound < 50.0);
  // Reconstruction against mean-zero band-limited test bumps.
  auto test = bandlimited_symbol(1.0, 6.0, 7);
  cplx got = reconstruction_pairing(*k, sym, test);
  cplx expect = inner(b, test);
  CHECK(std::abs(got - expect) < 1e-3 * std::abs(expect));
}

TEST_CASE("line integral agrees with a dense (x, t) quadrature") {
  FormGeometry geom = FormGeometry::from_beta_int(-1, 1, 0);
  auto g1 = sample(kG, [](double x) { return cplx(std::exp(-(x - 0.3) * (x - 0.3)), 0); });
  auto g2 = sample(kG, [](double x) { return cplx(std::exp(-1.3 * x * x), 0); });
  auto g3 = sample(kG, [](double x) { return cplx(std::exp(-0.7 * (x + 0.4) * (x + 0.4)), 0); });
  cplx got = line_integral(geom, g1, g2, g3);
  double acc = 0;
  int nx = 4000, nt = 4000;
  for (int ix = 0; ix < nx; ++ix) {
    double x = -8.0 + 16.0 * (ix + 0.5) / nx;
    for (int it = 0; it < nt; ++it) {
      double t = -8.0 + 16.0 * (it + 0.5) / nt;
      acc += std::exp(-(x - t - 0.3) * (x - t - 0.3)) * std::exp(-1.3 * (x + t) * (x + t)) *
             std::exp(-0.7 * (x + 0.4) * (x + 0.4));
    }
  }
  acc *= (16.0 / nx) * (16.0 / nt);
  CHECK(std::abs(got.real() - acc) < 1e-5 * std::abs(acc));
  CHECK(std::abs(got.imag()) < 1e-10);
}

TEST_CASE("paraproduct cancellations and the T_3(1,1) = b reproduction") {
  auto k = kit();
  auto b = bandlimited_symbol(2.5, 5.0, 11);
  auto sym = calderon_coeffs(*k, b, 3);
  ParaproductForm form(k, sym);

  auto one = wide_one();
  BumpProfile prof;
  auto mz = bump_mean_zero(-2.0, 2.0, prof, kG);

  // Lambda(mean-zero, 1, 1) and Lambda(1, mean-zero, 1) vanish.
  double norms = mz.norm2() * std::sqrt(kG.length()) * std::sqrt(kG.length());
  auto v1 = form.evaluate(mz, one, one);
  CHECK(std::abs(v1.value) < 1e-6 * norms);
  auto v2 = form.evaluate(one, mz, one);
  CHECK(std::abs(v2.value) < 1e-6 * norms);

  // Lambda(1, 1, f3) = <b, f3-bar>-pairing for mean-zero f3.
  auto f3 = bandlimited_symbol(1.0, 6.0, 13);
  auto v3 = form.evaluate(one, one, f3);
  cplx expect = 0;
  for (int i = 0; i < kG.n; ++i) expect += b[i] * f3[i];
  expect *= kG.h;
  CHECK(std::abs(v3.value - expect) < 1e-3 * std::abs(expect));
}

TEST_CASE("paraproduct form has the gamma modulation symmetry") {
  auto k = kit();
  auto b = bandlimited_symbol(2.5, 5.0, 17);
  auto sym = calderon_coeffs(*k, b, 3);
  ParaproductForm form(k, sym);
  auto f1 = bandlimited_symbol(0.5, 2.0, 19);
  auto f2 = bandlimited_symbol(0.5, 2.5, 23);
  auto f3 = bandlimited_symbol(1.0, 3.0, 29);
  double step = modulation_lattice_step(form.geometry(), kG);
  CHECK(modulation_residual(form, f1, f2, f3, 5 * step) < 1e-6);
}

TEST_CASE("discretized kernel obeys the truncated Calderon-Zygmund size bound") {
  auto k = kit();
  auto b = bandlimited_symbol(2.5, 5.0, 31);
  double worst = 0;
  for (int kap : {2, 3, 4}) {
    auto sym = calderon_coeffs(*k, b, kap);
    // K~(x, t) = sum c_{k,n} prod_i phi_{i,k,n}(x + beta_i t) dk dn.
    std::mt19937_64 rng(100 + kap);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), ue(-kap, kap);
    for (int trial = 0; trial < 40; ++trial) {
      double x = ux(rng);
      double t = std::pow(2.0, ue(rng)) * (ux(rng) > 0 ? 1 : -1);
      cplx kv = 0;
      for (const auto& e : sym.coef) {
        double scale = std::pow(2.0, e.k);
        double amp = std::pow(scale, -1.5);  // 2^{-k/2} normalization, three factors
        double p = k->generator_at(0, (x + kBeta[0] * t) / scale - e.n) *
                   k->generator_at(1, (x + kBeta[1] * t) / scale - e.n) *
                   k->generator_at(2, (x + kBeta[2] * t) / scale - e.n);
        kv += e.c * amp * p;
      }
      kv *= sym.dk * sym.dn;
      double cap = std::min(std::ldexp(1.0, kap), 1.0 / std::abs(t));
      worst = std::max(worst, std::abs(kv) / cap);
    }
  }
  CHECK(worst < 20.0);
}

TEST_CASE("carleson ratio basics and the (7.6) counterexample growth") {
  // Single unit entry.
  std::vector<CarlesonEntry> single{{0.0, 0.0, cplx(1.0, 0.0)}};
  CHECK(carleson_ratio(single, {{0.0, 1.0}}) == doctest::Approx(1.0));
  CHECK(carleson_ratio({}, {{0.0, 1.0}}) == 0.0);

  auto cx = counterexample_coefficients(7);
  for (const auto& e : cx) CHECK(std::abs(e.c) <= std::sqrt(std::pow(2.0, e.k)) + 1e-12);
  double prev = 0;
  for (int oct = 1; oct <= 6; ++oct) {
    double r = carleson_ratio(cx, {{0.0, std::ldexp(1.0, oct)}});
    CHECK(r > prev);
    prev = r;
  }
  // Linear growth in the number of scales.
  double r3 = carleson_ratio(cx, {{0.0, 8.0}});
  double r6 = carleson_ratio(cx, {{0.0, 64.0}});
  CHECK(r6 > r3 + 1.5);
}
