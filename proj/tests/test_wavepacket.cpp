#include "doctest.h"
#include "mitf/wavepacket.hpp"

#include <cmath>
#include <random>

using namespace mitf;

namespace {
const FunctionGrid kG{-32.0, 1 << 14, 64.0 / (1 << 14)};  // nyquist 128

SampledFunction random_bandlimited(const FunctionGrid& g, double xi_lo, double xi_hi,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Spectrum s{g, std::vector<cplx>(g.n, cplx(0))};
  for (int k = 0; k < g.n; ++k) {
    double xi = s.xi_of(k);
    if (xi >= xi_lo && xi <= xi_hi) {
      double env = std::exp(-2.0 / std::max(1e-9, (xi - xi_lo) * (xi_hi - xi)));
      s.c[k] = env * cplx(nd(rng), nd(rng));
    }
  }
  auto f = SampledFunction::from_spectrum(s);
  double n2 = f.norm2();
  for (auto& z : f.values()) z /= n2;
  return f;
}
}  // namespace

TEST_CASE("wave packet invariants") {
  Iv I{-0.5, 0.5};
  Iv omega{3.0, 4.0};  // |I||omega| = 1
  BumpProfile prof;
  auto p = wave_packet(I, omega, prof, kG);
  CHECK(p.samples.norm2() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.out_of_band_mass < 1e-8);
  // Demodulated packet is real for a real profile.
  auto d = p.demodulated();
  double im = 0;
  for (int i = 0; i < kG.n; ++i) im = std::max(im, std::abs(d[i].imag()));
  CHECK(im < 1e-10);
}

TEST_CASE("packet spectra from the factory agree with direct construction") {
  WavePacketFactory fac(kG, BumpProfile{});
  Iv I{0.25, 1.25};
  Iv omega{2.0, 3.0};
  auto ps = fac.make(I, omega);
  auto f = ps.materialize();
  CHECK(f.norm2() == doctest::Approx(1.0).epsilon(1e-9));
  auto direct = wave_packet(I, omega, BumpProfile{}, kG);
  // Same tile, same construction: |<a,b>| = 1 up to phase conventions.
  CHECK(std::abs(inner(f, direct.samples)) == doctest::Approx(1.0).epsilon(1e-8));
  // inner_against matches the grid inner product.
  auto g = random_bandlimited(kG, 1.0, 4.0, 42);
  cplx via_band = ps.inner_against(g.spectrum());
  cplx via_grid = inner(g, f);
  CHECK(std::abs(via_band - via_grid) < 1e-10);
}

TEST_CASE("order-N bump pairings decay like (4.1) in the separation") {
  // Lemma 4.1 concerns order-N adapted bumps; chi-profile bumps carry the
  // chi^N tails exactly.
  BumpProfile chi;
  chi.id = "chi";
  chi.order = 10;
  auto base = bump(-0.5, 0.5, chi, kG);
  double prev = 1e300;
  std::vector<double> logv;
  for (int s = 1; s <= 6; ++s) {
    double d = std::pow(2.0, s);
    auto far = bump(d - 0.5, d + 0.5, chi, kG);
    // (4.1) pairing: integral of |phi_J| |c_I|.
    double v = 0;
    for (int i = 0; i < kG.n; ++i) v += std::abs(base[i]) * std::abs(far[i]);
    v *= kG.h;
    logv.push_back(std::log2(std::max(v, 1e-300)));
    CHECK(v < prev);
    prev = v;
  }
  double slope = (logv.back() - logv.front()) / 5.0;
  CHECK(slope <= -(10.0 - 1.0));
}

TEST_CASE("mean-zero pairings gain the (|I|/|J|)^{3/2} factor of (4.2)") {
  BumpProfile chi;
  chi.id = "chi";
  chi.order = 10;
  auto big = bump(-2.0, 2.0, chi, kG);  // |J| = 4
  // Offset placement: phi_J' does not vanish at the c_I center, so the
  // first-moment term of (4.2) is active.
  std::vector<double> vals;
  for (int s = 1; s <= 5; ++s) {
    double li = 4.0 * std::pow(2.0, -s);
    auto cz = bump_mean_zero(1.0 - 0.5 * li, 1.0 + 0.5 * li, chi, kG);
    vals.push_back(std::abs(inner(big, cz)));
  }
  // Fitted scale slope ~ 3/2 (within a modest tolerance), and the (4.2)
  // envelope C (|I|/|J|)^{3/2} holds with a stable constant.
  double slope = (std::log2(vals.front()) - std::log2(vals.back())) / double(vals.size() - 1);
  CHECK(slope >= 1.3);
  double cmax = 0;
  for (int s = 1; s <= 5; ++s) cmax = std::max(cmax, vals[s - 1] * std::pow(2.0, 1.5 * s));
  CHECK(cmax < 10.0);
}

TEST_CASE("shannon frame reconstructs f * phi_omega") {
  Iv omega{2.0, 4.0};  // delta = 1/32, h = 1/256 -> stride 8
  ShannonFrame frame(kG, omega);
  CHECK(frame.delta() == doctest::Approx(1.0 / 32.0));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto f = random_bandlimited(kG, -6.0, 6.0, seed);
    auto coef = frame.decompose(f);
    auto rec = frame.reconstruct(coef);
    auto oracle = frame.convolve_oracle(f);
    double err = 0, scale = 0;
    for (int i = 0; i < kG.n; ++i) {
      err += std::norm(rec[i] - oracle[i]);
      scale += std::norm(oracle[i]);
    }
    CHECK(std::sqrt(err / scale) < 1e-10);
  }
}

TEST_CASE("shannon frame is exact on band-limited input where the mask is flat") {
  // f-hat inside 3 omega, where phi_omega-hat == 1: reconstruction equals f.
  Iv omega{2.0, 4.0};
  ShannonFrame frame(kG, omega);
  auto f = random_bandlimited(kG, 2.2, 3.8, 7);
  auto rec = frame.reconstruct(frame.decompose(f));
  double err = 0;
  for (int i = 0; i < kG.n; ++i) err += std::norm(rec[i] - f[i]);
  CHECK(std::sqrt(err) < 1e-6);
}

TEST_CASE("shannon coefficients of zero are zero, and Parseval holds") {
  Iv omega{2.0, 4.0};
  ShannonFrame frame(kG, omega);
  SampledFunction zero(kG);
  auto c0 = frame.decompose(zero);
  for (const auto& z : c0.c) CHECK(std::abs(z) == 0.0);

  auto f = random_bandlimited(kG, -5.0, 5.0, 9);
  auto coef = frame.decompose(f);
  double mass = 0;
  for (const auto& z : coef.c) mass += std::norm(z);
  CHECK(mass == doctest::Approx(frame.parseval_oracle(f)).epsilon(1e-8));
}

TEST_CASE("shannon spatial step is exactly (16|omega|)^{-1}") {
  Iv omega{0.0, 8.0};
  ShannonFrame frame(kG, omega);
  CHECK(frame.delta() == 1.0 / (16.0 * 8.0));
  CHECK(frame.interval_of(1).lo - frame.interval_of(0).lo == doctest::Approx(frame.delta()));
}
