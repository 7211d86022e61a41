#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mitf/whitney.hpp"

namespace mitf {

// Parameters of the multi-tile model. The rectangle area is pinned by the
// construction to A = 2^{10 + kappa + m} (lengths 2^7|omega_i|, 2^7 2^m |I_1|,
// sampling ratio 16); M rounds A^{2/(N-2)} up to a power of two so that
// separation predicates stay exact.
struct ModelParams {
  int kappa = 0;
  int m = 0;
  int order = 10;        // N
  double delta = 1.0;
  double delta_prime = 0.95;
  // Stage-1 elimination constant of the Peeling Lemma (10^{-2} in the paper;
  // the 10^{-2} margin makes stage 2 reachable only on very deep scale stacks,
  // so tests may relax it).
  double stage1_factor = 1e-2;
  WhitneyParams whitney{4, -10, 10, Grid::standard()};

  int log2_area() const { return 10 + kappa + m; }
  Rat area() const { return Rat::pow2(log2_area()); }
  int log2_sep() const {  // M = 2^ceil(2 log2(A) / (N-2))
    int num = 2 * log2_area();
    return (num + order - 3) / (order - 2);
  }
  Rat separation() const { return Rat::pow2(log2_sep()); }
  Rat c2() const { return whitney.c2(); }
  Rat c3() const { return whitney.c3(); }
};

struct TileIx {
  DyadicInterval time = DyadicInterval(Grid::standard(), 0, 0);   // I
  DyadicInterval freq = DyadicInterval(Grid::standard(), 0, 0);   // omega

  bool operator==(const TileIx& o) const { return time == o.time && freq == o.freq; }
  bool operator<(const TileIx& o) const {
    if (!(time == o.time)) return time < o.time;
    return freq < o.freq;
  }
};

struct MultiTile {
  std::array<TileIx, 3> p;
  int rect = -1;  // owning multi-rectangle
};

struct MultiRectangle {
  DyadicInterval time = DyadicInterval(Grid::standard(), 0, 0);  // I_R
  std::array<DyadicInterval, 3> freq = {DyadicInterval(Grid::standard(), 0, 0),
                                        DyadicInterval(Grid::standard(), 0, 0),
                                        DyadicInterval(Grid::standard(), 0, 0)};
  std::vector<int> tiles;
};

struct PhaseData {
  SingularGeometry geom;
  ModelParams params;
  std::vector<MultiTile> tiles;
  std::vector<MultiRectangle> rects;
};

// Options steering the phase-data construction (items (1)-(4)): the spatial
// window holding the I-triples and caps on the enumeration.
struct BuildOptions {
  RatIv spatial_window{Rat(-64), Rat(64)};
  std::size_t max_tiles = 20000;
  int max_triples_per_tube = 64;
};

// Items (1)-(4): multi-tiles and their multi-rectangles from Whitney tubes of
// the (5.10) orientation class with fixed eccentricity 2^{-kappa}.
PhaseData build_phase_data(const SingularGeometry& geom, const ModelParams& params,
                           const std::vector<LocatedTube>& tubes, const BuildOptions& opt = {});

struct RankViolation {
  int property = 0;  // 1..6
  int tile = -1;     // or rect for rectangle properties
  int slot = 0;      // the failing coordinate j or i
  std::string witness;
};

struct RankReport {
  std::size_t tiles_checked = 0;
  std::size_t rects_checked = 0;
  std::vector<RankViolation> violations;
  // Per property, the largest exclusion dilate that would still fail, as a
  // calibration aid (0 when the property held everywhere).
  bool ok() const { return violations.empty(); }
};

// The six rank properties, verified with exact interval arithmetic over the
// full gamma line (no sampling).
RankReport rank_check(const PhaseData& data);

// t-window {t : t g_a in iv}.
RatIv gamma_window(const Rat& d, const RatIv& iv);

// Randomized harvest of (5.10)-class tubes of eccentricity 2^{-kappa}: sample
// points off the bad set at plane distances matched to the class, locate, and
// deduplicate.
std::vector<LocatedTube> collect_class_tubes(const WhitneyDecomposition& wd, int kappa,
                                             const RatIv& t_range, int n_samples,
                                             std::uint64_t seed,
                                             std::size_t max_count = 256);

}  // namespace mitf
