#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mitf/rational.hpp"

namespace mitf {

// Scale window for dyadic machinery; requests outside raise ScaleOutOfWindow.
struct ScaleWindow {
  int n_min = -20;
  int n_max = 20;

  void check(int n) const {
    if (n < n_min || n > n_max)
      raise(Errc::ScaleOutOfWindow, "scale " + std::to_string(n) + " outside [" +
                                        std::to_string(n_min) + "," + std::to_string(n_max) + "]");
  }
};

// One of the q generalized dyadic grids. Scale-n intervals are
// [2^n(m + s_n/q), 2^n(m + s_n/q + 1)) where s_n = 2^{-n} residue (mod q).
// residue 0 is the standard dyadic grid.
class Grid {
 public:
  explicit Grid(int q = 11, int residue = 0) : q_(q), residue_(residue) {
    if (q < 2 || residue < 0 || residue >= q)
      raise(Errc::ConfigInvalid, "grid q=" + std::to_string(q) + " residue=" + std::to_string(residue));
  }
  static Grid standard(int q = 11) { return Grid(q, 0); }

  int q() const { return q_; }
  int residue() const { return residue_; }
  bool is_standard() const { return residue_ == 0; }

  // Offset numerator s_n at scale n: left endpoints are 2^n (m + s_n/q).
  int offset(int scale) const {
    if (residue_ == 0) return 0;
    std::int64_t s = residue_;
    if (scale >= 0) {
      std::int64_t inv2 = (q_ + 1) / 2;  // 2*inv2 = 1 (mod q), q odd
      for (int i = 0; i < scale; ++i) s = (s * inv2) % q_;
    } else {
      for (int i = 0; i < -scale; ++i) s = (s * 2) % q_;
    }
    return int(s);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.q_ == b.q_ && a.residue_ == b.residue_;
  }

 private:
  int q_;
  int residue_;
};

// Half-open interval [2^scale (index + s/q), 2^scale (index + s/q + 1))
// in its grid. Endpoint arithmetic is exact.
class DyadicInterval {
 public:
  DyadicInterval(Grid grid, int scale, std::int64_t index)
      : grid_(grid), scale_(scale), index_(index) {}

  const Grid& grid() const { return grid_; }
  int scale() const { return scale_; }
  std::int64_t index() const { return index_; }

  Rat length() const { return Rat::pow2(scale_); }
  Rat left() const {
    return Rat::pow2(scale_) * (Rat(index_) + Rat(grid_.offset(scale_), grid_.q()));
  }
  Rat right() const { return left() + length(); }
  Rat center() const { return left() + length() * Rat(1, 2); }
  RatIv closure() const { return {left(), right()}; }

  bool contains_point(const Rat& x) const { return left() <= x && x < right(); }
  bool contains(const DyadicInterval& o) const { return left() <= o.left() && o.right() <= right(); }
  bool intersects(const DyadicInterval& o) const { return left() < o.right() && o.left() < right(); }

  DyadicInterval parent(const ScaleWindow& w = {}) const {
    w.check(scale_ + 1);
    int c = child_shift(grid_, scale_);
    std::int64_t t = index_ - c;
    std::int64_t m = (t >= 0) ? t / 2 : -((-t + 1) / 2);
    return DyadicInterval(grid_, scale_ + 1, m);
  }

  // b = 0 left half, 1 right half.
  DyadicInterval child(int b, const ScaleWindow& w = {}) const {
    w.check(scale_ - 1);
    int c = child_shift(grid_, scale_ - 1);
    return DyadicInterval(grid_, scale_ - 1, 2 * index_ + c + b);
  }

  // The grid interval at `scale` containing point x.
  static DyadicInterval at(const Grid& g, int scale, const Rat& x, const ScaleWindow& w = {}) {
    w.check(scale);
    Rat m = x / Rat::pow2(scale) - Rat(g.offset(scale), g.q());
    return DyadicInterval(g, scale, m.floor());
  }

  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
    return a.grid_ == b.grid_ && a.scale_ == b.scale_ && a.index_ == b.index_;
  }
  friend bool operator<(const DyadicInterval& a, const DyadicInterval& b) {
    if (a.scale_ != b.scale_) return a.scale_ < b.scale_;
    if (a.index_ != b.index_) return a.index_ < b.index_;
    return a.grid_.residue() < b.grid_.residue();
  }

  std::string str() const {
    return "[" + left().str() + "," + right().str() + ")@2^" + std::to_string(scale_);
  }

 private:
  // Children of a scale n+1 interval have indices 2m + c, 2m + c + 1 at scale n,
  // c = (2 s_{n+1} - s_n)/q.
  static int child_shift(const Grid& g, int child_scale) {
    int s_child = g.offset(child_scale);
    int s_par = g.offset(child_scale + 1);
    return (2 * s_par - s_child) / g.q();
  }

  Grid grid_;
  int scale_;
  std::int64_t index_;
};

// Dyadic box in R^3; a side may be the full line (sentinel nullopt).
struct Box3 {
  std::array<std::optional<DyadicInterval>, 3> side;

  bool finite() const { return side[0] && side[1] && side[2]; }
  int num_lines() const {
    int k = 0;
    for (const auto& s : side)
      if (!s) ++k;
    return k;
  }
};

// Dyadic tube: minimal side length attained by at least two sides; the
// maximal side may be all of R (Def 5.1). Orientation is the axis of the
// longest side, or nullopt for cubes.
struct Tube {
  Box3 box;

  static bool is_tube(const Box3& b);
  static Tube checked(const Box3& b);

  std::optional<int> orientation() const;
  // Width = common length of the two short sides.
  Rat width() const;
  // Length of the longest side; raises for line tubes.
  Rat length_finite() const;
  // width/length in (0,1]; raises for line tubes.
  Rat eccentricity() const;
};

// --- grid_core operations ---------------------------------------------------

// The cover of I in grid g: the grid interval of the unique power-of-two
// length in (q|I|, 2q|I|) containing I, if the grid has one.
DyadicInterval cover(const RatIv& interval, const Grid& g, const ScaleWindow& w = {});

// Grids of the q residues that do contain a cover for I (at least q-1 of them).
std::vector<Grid> grids_with_cover(const RatIv& interval, int q = 11, const ScaleWindow& w = {});

// Grid interval of length 2^scale containing iv, if the grid has one.
std::optional<DyadicInterval> aligned_container(const RatIv& iv, const Grid& g, int scale,
                                                const ScaleWindow& w = {});

std::optional<Tube> intersect_tubes(const Tube& a, const Tube& b);

// chi_I(x) = (1 + || (x_i - c_i)/|I_i| ||^2)^{-1/2}  (Def 2.5 weight).
double chi_weight(const std::vector<double>& x, const std::vector<std::pair<double, double>>& box);

}  // namespace mitf
