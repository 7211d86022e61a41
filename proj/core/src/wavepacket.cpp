#include "mitf/wavepacket.hpp"

#include <cmath>

#include "mitf/fft.hpp"

namespace mitf {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

cplx unit_phase(double ph) { return cplx(std::cos(ph), std::sin(ph)); }
}  // namespace

WavePacket wave_packet(const Iv& I, const Iv& omega, const BumpProfile& profile,
                       const FunctionGrid& g, const PacketOptions& opt) {
  if (I.len() * omega.len() < 1.0 / 16.0 - 1e-12)
    raise(Errc::ConfigInvalid, "tile area below the sampling ratio 1/16");
  double w = omega.len();
  double c = omega.center();
  if (std::abs(c) + 4 * w >= g.nyquist())
    raise(Errc::LeakExceeded, "8 omega does not fit under the Nyquist frequency");
  int flat_bins = 0;
  for (int m = -g.n / 2; m < g.n / 2; ++m)
    if (std::abs(g.xi(m)) <= 3 * w) ++flat_bins;
  if (flat_bins < opt.min_band_bins)
    raise(Errc::LeakExceeded, "band 6 omega resolves to fewer than " +
                                  std::to_string(opt.min_band_bins) + " bins");

  BumpProfile p2 = profile;
  p2.p = 2.0;
  SampledFunction b = bump(I.lo, I.hi, p2, g);
  Spectrum s = b.spectrum();
  for (int k = 0; k < g.n; ++k) s.c[k] *= mask_6_8(s.xi_of(k) / w);
  SampledFunction demod = SampledFunction::from_spectrum(s);
  double n2 = demod.norm2();
  if (!(n2 > 0)) raise(Errc::LeakExceeded, "masked packet vanished");
  for (auto& z : demod.values()) z /= n2;
  SampledFunction samples = demod.modulate(c);

  Spectrum chk = samples.spectrum();
  double in_band = 0, out_band = 0;
  Iv band8 = omega.dilate_center(8.0);
  for (int k = 0; k < g.n; ++k) {
    double m2 = std::norm(chk.c[k]);
    if (band8.contains(chk.xi_of(k)))
      in_band += m2;
    else
      out_band += m2;
  }
  double rel = out_band / (in_band + out_band);
  if (rel > opt.leak_tol)
    raise(Errc::LeakExceeded, "out-of-band mass " + std::to_string(rel));

  WavePacket pkt;
  pkt.time = I;
  pkt.freq = omega;
  pkt.samples = std::move(samples);
  pkt.freq_center = c;
  pkt.out_of_band_mass = rel;
  return pkt;
}

SampledFunction PacketSpectrum::materialize() const {
  Spectrum s{grid, std::vector<cplx>(grid.n, cplx(0))};
  for (size_t j = 0; j < coef.size(); ++j) s.c[k_lo + j] = coef[j];
  return SampledFunction::from_spectrum(s);
}

PacketSpectrum WavePacketFactory::make(const Iv& I, const Iv& omega) const {
  const double L = grid_.length();
  const double w = omega.len();
  const double cw = omega.center();
  double cw_slot = cw * L;
  if (std::abs(cw_slot - std::round(cw_slot)) > 1e-6)
    raise(Errc::ConfigInvalid, "frequency center off the spectral lattice");
  if (std::abs(cw) + 4 * w >= grid_.nyquist())
    raise(Errc::LeakExceeded, "8 omega does not fit under the Nyquist frequency");

  auto key = std::make_pair(I.len(), w);
  auto it = base_cache_.find(key);
  if (it == base_cache_.end()) {
    // Masked spectrum of the origin-centered bump at scale |I|, real and even.
    double c0 = grid_.a + 0.5 * L;
    BumpProfile p2 = profile_;
    p2.p = 2.0;
    SampledFunction b = bump(c0 - 0.5 * I.len(), c0 + 0.5 * I.len(), p2, grid_);
    Spectrum s = b.spectrum();
    std::vector<double> base(grid_.n);
    int flat_bins = 0;
    for (int k = 0; k < grid_.n; ++k) {
      double xi = s.xi_of(k);
      double mask = mask_6_8(xi / w);
      if (std::abs(xi) <= 3 * w) ++flat_bins;
      // Strip the center phase; the bump spectrum is then real even.
      base[k] = mask * (s.c[k] * unit_phase(kTwoPi * xi * c0)).real();
    }
    if (flat_bins < opt_.min_band_bins)
      raise(Errc::LeakExceeded, "band 6 omega resolves to too few bins");
    it = base_cache_.emplace(key, std::move(base)).first;
  }
  const auto& base = it->second;

  int half = grid_.n / 2;
  int k_lo = grid_.n, k_hi = -1;
  for (int k = 0; k < grid_.n; ++k) {
    double d = grid_.xi(k - half) - cw;
    if (std::abs(d) < 4 * w) {
      k_lo = std::min(k_lo, k);
      k_hi = std::max(k_hi, k);
    }
  }
  if (k_hi < k_lo) raise(Errc::LeakExceeded, "empty packet band");

  PacketSpectrum ps;
  ps.grid = grid_;
  ps.k_lo = k_lo;
  ps.coef.resize(k_hi - k_lo + 1);
  double cI = I.center();
  double mass = 0;
  for (int k = k_lo; k <= k_hi; ++k) {
    double d = grid_.xi(k - half) - cw;
    // Demodulated base translated to c(I), then modulated to c(omega).
    int src = int(std::lround(d * L)) + half;
    double amp = (src >= 0 && src < grid_.n) ? base[src] : 0.0;
    cplx v = amp * unit_phase(-kTwoPi * d * cI);
    ps.coef[k - k_lo] = v;
    mass += std::norm(v);
  }
  mass /= L;
  if (!(mass > 0)) raise(Errc::LeakExceeded, "masked packet vanished");
  double inv = 1.0 / std::sqrt(mass);
  for (auto& z : ps.coef) z *= inv;
  return ps;
}

ShannonFrame::ShannonFrame(const FunctionGrid& g, const Iv& omega) : grid_(g), omega_(omega) {
  double w = omega.len();
  delta_ = 1.0 / (16.0 * w);
  double ratio = delta_ / g.h;
  stride_ = int(std::lround(ratio));
  if (stride_ < 1 || std::abs(ratio - stride_) > 1e-9)
    raise(Errc::ResolutionTooCoarse, "(16|omega|)^-1 is not a multiple of the sample spacing");
  if (g.n % stride_ != 0) raise(Errc::ConfigInvalid, "lattice stride must divide n");
  count_ = g.n / stride_;
  if (std::abs(omega.center()) + 2.5 * w >= g.nyquist())
    raise(Errc::LeakExceeded, "5 omega does not fit under the Nyquist frequency");

  kmask_.resize(g.n);
  knorm2_ = 0;
  for (int k = 0; k < g.n; ++k) {
    double xi = g.xi(k - g.n / 2);
    kmask_[k] = mask_3_5((xi - omega.center()) / w);
    knorm2_ += kmask_[k] * kmask_[k];
  }
  knorm2_ /= g.length();  // ||k||_2^2 by Parseval
  if (!(knorm2_ > 0)) raise(Errc::LeakExceeded, "empty sampling band");
}

SampledFunction ShannonFrame::packet(int j) const {
  Spectrum s{grid_, std::vector<cplx>(grid_.n)};
  double xc = grid_.a + (j + 0.5) * delta_;
  double inv = 1.0 / std::sqrt(knorm2_);
  for (int k = 0; k < grid_.n; ++k) {
    double xi = grid_.xi(k - grid_.n / 2);
    s.c[k] = kmask_[k] * unit_phase(-kTwoPi * xi * xc) * inv;
  }
  return SampledFunction::from_spectrum(s);
}

ShannonFrame::Coefficients ShannonFrame::decompose(const SampledFunction& f,
                                                   double tail_tol) const {
  if (!(f.grid() == grid_)) raise(Errc::ConfigInvalid, "function grid mismatch");
  Spectrum F = f.spectrum();
  Spectrum T{grid_, std::vector<cplx>(grid_.n)};
  double inv = 1.0 / std::sqrt(knorm2_);
  for (int k = 0; k < grid_.n; ++k) {
    double xi = grid_.xi(k - grid_.n / 2);
    T.c[k] = F.c[k] * kmask_[k] * unit_phase(kTwoPi * xi * 0.5 * delta_);
  }
  SampledFunction u = SampledFunction::from_spectrum(T);
  Coefficients out;
  out.c.resize(count_);
  double peak = 0;
  for (int j = 0; j < count_; ++j) {
    out.c[j] = u[j * stride_] * inv;
    peak = std::max(peak, std::abs(out.c[j]));
  }
  int margin = std::max(1, count_ / 16);
  for (int j = 0; j < count_; ++j) {
    bool edge = j < margin || j >= count_ - margin;
    if (edge && std::abs(out.c[j]) > tail_tol * std::max(peak, 1e-300)) out.tail_warning = true;
  }
  return out;
}

SampledFunction ShannonFrame::reconstruct(const Coefficients& coef) const {
  std::vector<cplx> comb(grid_.n, cplx(0));
  for (int j = 0; j < count_; ++j) comb[size_t(j) * stride_] = coef.c[j];
  fft(comb, false);  // C[m'] = sum_j c_j e^{-2pi i (j s) m'/n}
  Spectrum s{grid_, std::vector<cplx>(grid_.n)};
  double amp = delta_ * std::sqrt(knorm2_);
  for (int k = 0; k < grid_.n; ++k) {
    int m = k - grid_.n / 2;
    int idx = ((m % grid_.n) + grid_.n) % grid_.n;
    double xi = grid_.xi(m);
    s.c[k] = amp * kmask_[k] * unit_phase(-kTwoPi * xi * (grid_.a + 0.5 * delta_)) * comb[idx];
  }
  return SampledFunction::from_spectrum(s);
}

SampledFunction ShannonFrame::convolve_oracle(const SampledFunction& f) const {
  Spectrum F = f.spectrum();
  for (int k = 0; k < grid_.n; ++k) F.c[k] *= kmask_[k] * kmask_[k];
  return SampledFunction::from_spectrum(F);
}

double ShannonFrame::parseval_oracle(const SampledFunction& f) const {
  Spectrum F = f.spectrum();
  double s = 0;
  for (int k = 0; k < grid_.n; ++k) s += kmask_[k] * kmask_[k] * std::norm(F.c[k]);
  return s / (delta_ * knorm2_ * grid_.length());
}

}  // namespace mitf
