#include "mitf/grid.hpp"

#include <cmath>

namespace mitf {

bool Tube::is_tube(const Box3& b) {
  std::vector<Rat> lens;
  for (const auto& s : b.side)
    if (s) lens.push_back(s->length());
  // One side may be all of R; it then plays the role of the maximal side and
  // the two finite sides are the short ones.
  if (b.num_lines() > 0) return lens.size() == 2;
  Rat mn = lens[0];
  for (const auto& l : lens)
    if (l < mn) mn = l;
  int at_min = 0;
  for (const auto& l : lens)
    if (l == mn) ++at_min;
  return at_min >= 2;
}

Tube Tube::checked(const Box3& b) {
  if (!is_tube(b)) raise(Errc::Internal, "box is not a tube");
  return Tube{b};
}

std::optional<int> Tube::orientation() const {
  if (box.num_lines() > 0) {
    for (int i = 0; i < 3; ++i)
      if (!box.side[i]) return i;
  }
  Rat mx = box.side[0]->length();
  int arg = 0;
  for (int i = 1; i < 3; ++i)
    if (box.side[i]->length() > mx) {
      mx = box.side[i]->length();
      arg = i;
    }
  int at_max = 0;
  for (int i = 0; i < 3; ++i)
    if (box.side[i]->length() == mx) ++at_max;
  if (at_max == 3) return std::nullopt;  // cube
  return arg;
}

Rat Tube::width() const {
  std::optional<Rat> mn;
  for (const auto& s : box.side)
    if (s && (!mn || s->length() < *mn)) mn = s->length();
  return *mn;
}

Rat Tube::length_finite() const {
  if (box.num_lines() > 0) raise(Errc::Internal, "length of a line tube");
  Rat mx = box.side[0]->length();
  for (const auto& s : box.side)
    if (s->length() > mx) mx = s->length();
  return mx;
}

Rat Tube::eccentricity() const { return width() / length_finite(); }

DyadicInterval cover(const RatIv& interval, const Grid& g, const ScaleWindow& w) {
  Rat len = interval.length();
  if (!(Rat(0) < len)) raise(Errc::ConfigInvalid, "cover of an empty interval");
  Rat lo = len * Rat(g.q());
  Rat hi = len * Rat(2 * g.q());
  // Unique n with lo < 2^n < hi (fails only when q|I| is itself a power of two).
  int n = int(std::floor(std::log2(lo.value()))) + 1;
  for (int adj = -2; adj <= 2; ++adj) {
    int cand = n + adj;
    if (cand < w.n_min - 2 || cand > w.n_max + 2) continue;
    Rat p = Rat::pow2(cand);
    if (lo < p && p < hi) {
      auto c = aligned_container(interval, g, cand, w);
      if (c) return *c;
      raise(Errc::NoCover, "grid residue " + std::to_string(g.residue()) + " has no cover");
    }
  }
  raise(Errc::NoCover, "no admissible power of two in (q|I|, 2q|I|)");
}

std::vector<Grid> grids_with_cover(const RatIv& interval, int q, const ScaleWindow& w) {
  std::vector<Grid> out;
  for (int r = 0; r < q; ++r) {
    Grid g(q, r);
    try {
      cover(interval, g, w);
      out.push_back(g);
    } catch (const Error& e) {
      if (e.code() != Errc::NoCover) throw;
    }
  }
  return out;
}

std::optional<DyadicInterval> aligned_container(const RatIv& iv, const Grid& g, int scale,
                                                const ScaleWindow& w) {
  DyadicInterval cand = DyadicInterval::at(g, scale, iv.lo, w);
  if (cand.left() <= iv.lo && iv.hi <= cand.right()) return cand;
  return std::nullopt;
}

namespace {

// Intersection of two same-axis sides. Grid intervals are nested or disjoint;
// a partial overlap means the operands came from incompatible grids.
std::optional<std::optional<DyadicInterval>> intersect_side(
    const std::optional<DyadicInterval>& a, const std::optional<DyadicInterval>& b) {
  if (!a) return std::optional<std::optional<DyadicInterval>>(b);
  if (!b) return std::optional<std::optional<DyadicInterval>>(a);
  if (!a->intersects(*b)) return std::nullopt;  // empty intersection
  if (a->contains(*b)) return std::optional<std::optional<DyadicInterval>>(*b);
  if (b->contains(*a)) return std::optional<std::optional<DyadicInterval>>(*a);
  raise(Errc::Internal, "sides neither nested nor disjoint (incompatible grids)");
}

}  // namespace

std::optional<Tube> intersect_tubes(const Tube& a, const Tube& b) {
  Box3 out;
  for (int i = 0; i < 3; ++i) {
    auto s = intersect_side(a.box.side[i], b.box.side[i]);
    if (!s) return std::nullopt;
    out.side[i] = *s;
  }
  return Tube::checked(out);
}

double chi_weight(const std::vector<double>& x, const std::vector<std::pair<double, double>>& box) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double c = 0.5 * (box[i].first + box[i].second);
    double len = box[i].second - box[i].first;
    double t = (x[i] - c) / len;
    s += t * t;
  }
  return 1.0 / std::sqrt(1.0 + s);
}

}  // namespace mitf
