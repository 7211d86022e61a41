#pragma once

#include <map>
#include <optional>

#include "mitf/bump.hpp"
#include "mitf/sampled.hpp"

namespace mitf {

// Plain floating interval for the quadrature layer.
struct Iv {
  double lo = 0, hi = 0;
  double len() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  Iv dilate_center(double c) const {
    double m = center(), half = 0.5 * c * len();
    return {m - half, m + half};
  }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wave packet attached to the tile I x omega. The demodulated packet
// M_{-c(omega)} phi is a band-limited bump adapted to I; phi-hat is supported
// in 8 omega on the sampling grid.
struct WavePacket {
  Iv time;   // I
  Iv freq;   // omega
  SampledFunction samples;
  double freq_center = 0;
  double out_of_band_mass = 0;  // relative spectral mass outside 8 omega

  SampledFunction demodulated() const { return samples.modulate(-freq_center); }
};

struct PacketOptions {
  double leak_tol = 1e-8;
  int min_band_bins = 8;
};

WavePacket wave_packet(const Iv& I, const Iv& omega, const BumpProfile& profile,
                       const FunctionGrid& g, const PacketOptions& opt = {});

// Sparse spectral form of a packet: only the 8-omega band is stored. Inner
// products against precomputed spectra cost O(band) each.
struct PacketSpectrum {
  FunctionGrid grid;
  int k_lo = 0;  // first stored spectral slot (0-based, i.e. m = k - n/2)
  std::vector<cplx> coef;

  cplx inner_against(const Spectrum& f) const {
    cplx s = 0;
    for (size_t j = 0; j < coef.size(); ++j) s += f.c[k_lo + j] * std::conj(coef[j]);
    return s / grid.length();
  }
  SampledFunction materialize() const;
};

// Builds packet spectra on one shared grid, caching the masked base spectrum
// per (|I|, |omega|) scale pair. Frequency centers must sit on the grid's
// frequency lattice.
class WavePacketFactory {
 public:
  WavePacketFactory(FunctionGrid g, BumpProfile profile, PacketOptions opt = {})
      : grid_(g), profile_(profile), opt_(opt) {}

  const FunctionGrid& grid() const { return grid_; }
  PacketSpectrum make(const Iv& I, const Iv& omega) const;

 private:
  FunctionGrid grid_;
  BumpProfile profile_;
  PacketOptions opt_;
  mutable std::map<std::pair<double, double>, std::vector<double>> base_cache_;
};

// Shannon sampling decomposition against the band omega: coefficients over
// the lattice of intervals of length (16|omega|)^{-1}, reconstruction equal to
// f * phi_omega with phi_omega-hat = mask_3_5((xi-c)/|omega|)^2.
class ShannonFrame {
 public:
  ShannonFrame(const FunctionGrid& g, const Iv& omega);

  double delta() const { return delta_; }
  int packet_count() const { return count_; }
  Iv interval_of(int j) const { return {grid_.a + j * delta_, grid_.a + (j + 1) * delta_}; }
  SampledFunction packet(int j) const;

  struct Coefficients {
    std::vector<cplx> c;
    bool tail_warning = false;
  };

  Coefficients decompose(const SampledFunction& f, double tail_tol = 1e-6) const;
  SampledFunction reconstruct(const Coefficients& coef) const;
  // Oracle-side convolution f * phi_omega by direct FFT multiplication.
  SampledFunction convolve_oracle(const SampledFunction& f) const;
  // Parseval mass (1/(Delta |k|^2 L)) sum |K|^2 |F|^2 that sum |c_j|^2 must match.
  double parseval_oracle(const SampledFunction& f) const;

 private:
  FunctionGrid grid_;
  Iv omega_;
  double delta_;
  int stride_;
  int count_;
  double knorm2_;                 // ||k||_2^2 of the unnormalized kernel
  std::vector<cplx> kernel_;      // analysis kernel centered at the j=0 slot
  std::vector<double> kmask_;     // kappa-hat on spectral slots
};

}  // namespace mitf
