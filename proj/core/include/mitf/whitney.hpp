#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mitf/grid.hpp"

namespace mitf {

// The bad set S = P_1 u P_2 u P_3 with P_j = span(e_j, gamma), described by
// the primitive integer direction of <gamma>. L_j below is the projection of
// <gamma> onto e_j^perp, a line through the origin in the remaining two
// coordinates (taken in increasing axis order).
struct SingularGeometry {
  std::array<std::int64_t, 3> gdir{1, 1, -2};

  static std::array<int, 2> plane_axes(int j) {
    switch (j) {
      case 0: return {1, 2};
      case 1: return {0, 2};
      default: return {0, 1};
    }
  }
  std::array<Rat, 2> line_dir(int j) const {
    auto ax = plane_axes(j);
    return {Rat(gdir[ax[0]]), Rat(gdir[ax[1]])};
  }
};

struct WhitneyParams {
  int log2_c1 = 10;     // C1 = 2^log2_c1 (even, so C2 = C1^{1/2} is exact)
  int min_scale = -10;  // smallest tube width 2^{min_scale}
  int max_scale = 10;   // top of the dyadic hierarchy
  Grid grid = Grid::standard();

  Rat c1() const { return Rat::pow2(log2_c1); }
  Rat c2() const { return Rat::pow2(log2_c1 / 2); }
  Rat c3() const { return Rat::pow2(2 * log2_c1); }
  Rat c1_third() const { return Rat(std::int64_t(1) << log2_c1, 3); }
  Rat min_width() const { return Rat::pow2(min_scale); }
};

// A member of Omega_j: a dyadic square in e_j^perp, infinitely long along e_j.
struct PlaneSquare {
  int axis = 0;  // j (0-based): the line direction
  DyadicInterval s1 = DyadicInterval(Grid::standard(), 0, 0);  // plane_axes(j)[0]
  DyadicInterval s2 = DyadicInterval(Grid::standard(), 0, 0);  // plane_axes(j)[1]
  bool fill = false;  // belongs to the width-2^{-k} filler family

  Tube as_tube() const;
  int scale() const { return s1.scale(); }
};

struct LocatedTube {
  Tube tube;
  std::array<PlaneSquare, 3> parents;
  bool has_fill = false;
};

// Does the line {t d} meet the closed 2-D box?
bool line_meets_box2(const std::array<Rat, 2>& d, const RatIv& b1, const RatIv& b2);
// Does the line {t g} meet the closed 3-D box (sides may be absent = line)?
bool line_meets_box3(const std::array<std::int64_t, 3>& g,
                     const std::array<std::optional<RatIv>, 3>& box);

class WhitneyDecomposition {
 public:
  WhitneyDecomposition(SingularGeometry geom, WhitneyParams params)
      : geom_(geom), params_(params) {}

  const SingularGeometry& geometry() const { return geom_; }
  const WhitneyParams& params() const { return params_; }

  // Separation predicate of the plane-j family: (C1/3)-dilate misses L_j.
  bool separated(int j, const DyadicInterval& a, const DyadicInterval& b) const;

  // Maximal separated dyadic square containing the point of e_j^perp, or
  // nullopt when none of width >= min_width exists (the point sits in the
  // unresolved slab around L_j).
  std::optional<PlaneSquare> square_at(int j, const Rat& x, const Rat& y) const;

  // Stopping-time location truncated at scale -k: points whose square would be
  // narrower than 2^{-k} get the scale-(-k) square marked as fill.
  PlaneSquare square_at_truncated(int j, const Rat& x, const Rat& y, int k) const;

  // The Whitney tube containing xi (off the bad set), or nullopt near S.
  std::optional<LocatedTube> tube_at(const std::array<Rat, 3>& xi) const;
  // Truncated-at-level-k location: always resolves, possibly with fill parents.
  LocatedTube tube_at_truncated(const std::array<Rat, 3>& xi, int k) const;

  // Omega_j within the window (squares meeting the window), enumerated.
  std::vector<PlaneSquare> whitney_plane(int j, const RatIv& w1, const RatIv& w2,
                                         std::size_t max_count = 2000000) const;

  // Tubes of Omega (triple intersections) meeting the window.
  std::vector<LocatedTube> combine(const std::array<RatIv, 3>& window,
                                   std::size_t max_count = 2000000) const;
  // Omega^{(k)} and the filler family tilde-Omega^{(k)} on the window.
  struct TruncateResult {
    std::vector<LocatedTube> kept;  // width >= 2^{-k}, no fill parent
    std::vector<LocatedTube> fill;  // at least one fill parent, width 2^{-k}
  };
  TruncateResult truncate_fill(const std::array<RatIv, 3>& window, int k,
                               std::size_t max_count = 2000000) const;

  // Number of eccentricity-1 tubes of tilde-Omega^{(k)} meeting the window.
  std::size_t count_fill_cubes(const std::array<RatIv, 3>& window, int k) const;

  // Invariants of a located tube: (C1/3) omega misses <gamma>, C3 omega meets it.
  bool check_gamma_separation(const LocatedTube& t) const;
  bool check_gamma_closeness(const LocatedTube& t) const;
  // Conditions (4.7)/(4.8) for the orientation class with the long side on
  // `axis`: the two frequency-box projections involving the long side avoid
  // the corresponding projected gamma lines.
  bool check_47_48(const LocatedTube& t) const;

 private:
  bool descend(int j, const Rat& x, const Rat& y, int stop_scale, PlaneSquare& out) const;

  SingularGeometry geom_;
  WhitneyParams params_;
};

// Smooth tensor partition of unity subordinate to a finite tube family:
// each hat-phi_omega is supported in 3 omega, equals b_omega / sum b, and the
// family sums to one wherever some member covers the point.
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(std::vector<LocatedTube> tubes) : tubes_(std::move(tubes)) {}

  std::size_t size() const { return tubes_.size(); }
  const LocatedTube& tube(std::size_t i) const { return tubes_[i]; }

  // Raw tensor bump of member i at xi (1 on omega, 0 outside 3 omega).
  double bump_value(std::size_t i, const std::array<double, 3>& xi) const;
  // Normalized phi-hat_omega(xi); raises CoverageGap when no member covers xi.
  double value(std::size_t i, const std::array<double, 3>& xi) const;
  double sum(const std::array<double, 3>& xi) const;

 private:
  std::vector<LocatedTube> tubes_;
};

}  // namespace mitf
