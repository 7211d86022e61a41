#include "mitf/whitney.hpp"

#include <algorithm>
#include <map>

#include "mitf/bump.hpp"

namespace mitf {

Tube PlaneSquare::as_tube() const {
  Box3 b;
  auto ax = SingularGeometry::plane_axes(axis);
  b.side[ax[0]] = s1;
  b.side[ax[1]] = s2;
  return Tube::checked(b);
}

namespace {

// t-window of {t : t*d in iv}; d != 0.
RatIv t_window(const Rat& d, const RatIv& iv) {
  Rat a = iv.lo / d, b = iv.hi / d;
  return a <= b ? RatIv{a, b} : RatIv{b, a};
}

}  // namespace

bool line_meets_box2(const std::array<Rat, 2>& d, const RatIv& b1, const RatIv& b2) {
  RatIv t1 = t_window(d[0], b1);
  RatIv t2 = t_window(d[1], b2);
  return t1.intersects(t2);
}

bool line_meets_box3(const std::array<std::int64_t, 3>& g,
                     const std::array<std::optional<RatIv>, 3>& box) {
  bool have = false;
  RatIv acc{Rat(0), Rat(0)};
  for (int i = 0; i < 3; ++i) {
    if (!box[i]) continue;
    RatIv t = t_window(Rat(g[i]), *box[i]);
    if (!have) {
      acc = t;
      have = true;
    } else {
      if (!acc.intersects(t)) return false;
      acc = RatIv{std::max(acc.lo, t.lo), std::min(acc.hi, t.hi)};
    }
  }
  return true;
}

bool WhitneyDecomposition::separated(int j, const DyadicInterval& a,
                                     const DyadicInterval& b) const {
  Rat c13 = params_.c1_third();
  return !line_meets_box2(geom_.line_dir(j), a.closure().dilate_center(c13),
                          b.closure().dilate_center(c13));
}

bool WhitneyDecomposition::descend(int j, const Rat& x, const Rat& y, int stop_scale,
                                   PlaneSquare& out) const {
  ScaleWindow sw{params_.min_scale - 1, params_.max_scale + 1};
  for (int s = params_.max_scale; s >= stop_scale; --s) {
    DyadicInterval a = DyadicInterval::at(params_.grid, s, x, sw);
    DyadicInterval b = DyadicInterval::at(params_.grid, s, y, sw);
    if (separated(j, a, b)) {
      out = PlaneSquare{j, a, b, false};
      return true;
    }
  }
  ScaleWindow sw2{params_.min_scale - 1, params_.max_scale + 1};
  out = PlaneSquare{j, DyadicInterval::at(params_.grid, stop_scale, x, sw2),
                    DyadicInterval::at(params_.grid, stop_scale, y, sw2), true};
  return false;
}

std::optional<PlaneSquare> WhitneyDecomposition::square_at(int j, const Rat& x,
                                                           const Rat& y) const {
  PlaneSquare sq;
  if (!descend(j, x, y, params_.min_scale, sq)) return std::nullopt;
  return sq;
}

PlaneSquare WhitneyDecomposition::square_at_truncated(int j, const Rat& x, const Rat& y,
                                                      int k) const {
  PlaneSquare sq;
  descend(j, x, y, -k, sq);
  return sq;
}

namespace {

LocatedTube assemble(const std::array<PlaneSquare, 3>& parents) {
  Box3 box;
  for (int i = 0; i < 3; ++i) {
    std::optional<DyadicInterval> side;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      auto ax = SingularGeometry::plane_axes(j);
      const DyadicInterval& comp = (ax[0] == i) ? parents[j].s1 : parents[j].s2;
      if (!side || comp.length() < side->length()) side = comp;
    }
    box.side[i] = side;
  }
  LocatedTube t;
  t.tube = Tube::checked(box);
  t.parents = parents;
  t.has_fill = parents[0].fill || parents[1].fill || parents[2].fill;
  return t;
}

}  // namespace

std::optional<LocatedTube> WhitneyDecomposition::tube_at(const std::array<Rat, 3>& xi) const {
  std::array<PlaneSquare, 3> parents;
  for (int j = 0; j < 3; ++j) {
    auto ax = SingularGeometry::plane_axes(j);
    auto sq = square_at(j, xi[ax[0]], xi[ax[1]]);
    if (!sq) return std::nullopt;
    parents[j] = *sq;
  }
  return assemble(parents);
}

LocatedTube WhitneyDecomposition::tube_at_truncated(const std::array<Rat, 3>& xi, int k) const {
  std::array<PlaneSquare, 3> parents;
  for (int j = 0; j < 3; ++j) {
    auto ax = SingularGeometry::plane_axes(j);
    parents[j] = square_at_truncated(j, xi[ax[0]], xi[ax[1]], k);
  }
  return assemble(parents);
}

std::vector<PlaneSquare> WhitneyDecomposition::whitney_plane(int j, const RatIv& w1,
                                                             const RatIv& w2,
                                                             std::size_t max_count) const {
  std::vector<PlaneSquare> out;
  std::size_t visited = 0;
  ScaleWindow sw{params_.min_scale - 1, params_.max_scale + 1};
  int top = params_.max_scale;

  struct Rec {
    const WhitneyDecomposition* self;
    int j;
    const RatIv *w1, *w2;
    std::vector<PlaneSquare>* out;
    std::size_t* visited;
    std::size_t cap;

    void visit(const DyadicInterval& a, const DyadicInterval& b) {
      if (!a.closure().intersects(*w1) || !b.closure().intersects(*w2)) return;
      if (++*visited > cap) raise(Errc::ConfigInvalid, "whitney enumeration exceeds the cap");
      if (self->separated(j, a, b)) {
        out->push_back(PlaneSquare{j, a, b, false});
        return;
      }
      if (a.scale() <= self->params_.min_scale) return;  // unresolved slab
      for (int ba = 0; ba < 2; ++ba)
        for (int bb = 0; bb < 2; ++bb) visit(a.child(ba), b.child(bb));
    }
  };

  Rec rec{this, j, &w1, &w2, &out, &visited, max_count};
  std::int64_t i1_lo = (w1.lo / Rat::pow2(top)).floor();
  std::int64_t i1_hi = (w1.hi / Rat::pow2(top)).floor();
  std::int64_t i2_lo = (w2.lo / Rat::pow2(top)).floor();
  std::int64_t i2_hi = (w2.hi / Rat::pow2(top)).floor();
  for (std::int64_t i1 = i1_lo - 1; i1 <= i1_hi + 1; ++i1)
    for (std::int64_t i2 = i2_lo - 1; i2 <= i2_hi + 1; ++i2)
      rec.visit(DyadicInterval(params_.grid, top, i1), DyadicInterval(params_.grid, top, i2));
  (void)sw;
  if (out.empty()) raise(Errc::WindowTooSmall, "no tube of admissible width fits the window");
  return out;
}

namespace {

struct TubeKey {
  std::array<int, 3> scale;
  std::array<std::int64_t, 3> index;
  bool operator<(const TubeKey& o) const {
    if (scale != o.scale) return scale < o.scale;
    return index < o.index;
  }
};

TubeKey key_of(const LocatedTube& t) {
  TubeKey k{};
  for (int i = 0; i < 3; ++i) {
    k.scale[i] = t.tube.box.side[i]->scale();
    k.index[i] = t.tube.box.side[i]->index();
  }
  return k;
}

}  // namespace

std::vector<LocatedTube> WhitneyDecomposition::combine(const std::array<RatIv, 3>& window,
                                                       std::size_t max_count) const {
  std::map<TubeKey, LocatedTube> found;
  std::size_t visited = 0;

  struct Rec {
    const WhitneyDecomposition* self;
    const std::array<RatIv, 3>* window;
    std::map<TubeKey, LocatedTube>* found;
    std::size_t* visited;
    std::size_t cap;
    int stop_scale;

    void visit(int s, std::array<std::int64_t, 3> idx) {
      ScaleWindow sw{self->params_.min_scale - 1, self->params_.max_scale + 1};
      std::array<DyadicInterval, 3> cell = {DyadicInterval(self->params_.grid, s, idx[0]),
                                            DyadicInterval(self->params_.grid, s, idx[1]),
                                            DyadicInterval(self->params_.grid, s, idx[2])};
      for (int i = 0; i < 3; ++i)
        if (!cell[i].closure().intersects((*window)[i])) return;
      if (++*visited > cap) raise(Errc::ConfigInvalid, "combine enumeration exceeds the cap");

      std::array<PlaneSquare, 3> parents;
      bool all_resolved = true;
      for (int j = 0; j < 3 && all_resolved; ++j) {
        auto ax = SingularGeometry::plane_axes(j);
        auto sq = self->square_at(j, cell[ax[0]].center(), cell[ax[1]].center());
        if (!sq || sq->scale() < s) {
          all_resolved = false;
        } else {
          parents[j] = *sq;
        }
      }
      if (all_resolved) {
        LocatedTube t = assemble(parents);
        found->emplace(key_of(t), t);
        return;
      }
      if (s <= stop_scale) return;
      for (int b = 0; b < 8; ++b) {
        std::array<std::int64_t, 3> ci;
        std::array<DyadicInterval, 3> ch = {cell[0].child(b & 1, sw), cell[1].child((b >> 1) & 1, sw),
                                            cell[2].child((b >> 2) & 1, sw)};
        for (int i = 0; i < 3; ++i) ci[i] = ch[i].index();
        visit(s - 1, ci);
      }
    }
  };

  Rec rec{this, &window, &found, &visited, max_count, params_.min_scale};
  int top = params_.max_scale;
  std::array<std::pair<std::int64_t, std::int64_t>, 3> rng;
  for (int i = 0; i < 3; ++i)
    rng[i] = {(window[i].lo / Rat::pow2(top)).floor() - 1,
              (window[i].hi / Rat::pow2(top)).floor() + 1};
  for (std::int64_t a = rng[0].first; a <= rng[0].second; ++a)
    for (std::int64_t b = rng[1].first; b <= rng[1].second; ++b)
      for (std::int64_t c = rng[2].first; c <= rng[2].second; ++c) rec.visit(top, {a, b, c});

  std::vector<LocatedTube> out;
  out.reserve(found.size());
  for (auto& kv : found) out.push_back(kv.second);
  return out;
}

WhitneyDecomposition::TruncateResult WhitneyDecomposition::truncate_fill(
    const std::array<RatIv, 3>& window, int k, std::size_t max_count) const {
  if (-k < params_.min_scale) raise(Errc::ConfigInvalid, "2^{-k} below the width floor");
  std::map<TubeKey, LocatedTube> found;
  std::size_t visited = 0;

  struct Rec {
    const WhitneyDecomposition* self;
    const std::array<RatIv, 3>* window;
    std::map<TubeKey, LocatedTube>* found;
    std::size_t* visited;
    std::size_t cap;
    int k;

    void visit(int s, std::array<std::int64_t, 3> idx) {
      ScaleWindow sw{self->params_.min_scale - 1, self->params_.max_scale + 1};
      std::array<DyadicInterval, 3> cell = {DyadicInterval(self->params_.grid, s, idx[0]),
                                            DyadicInterval(self->params_.grid, s, idx[1]),
                                            DyadicInterval(self->params_.grid, s, idx[2])};
      for (int i = 0; i < 3; ++i)
        if (!cell[i].closure().intersects((*window)[i])) return;
      if (++*visited > cap) raise(Errc::ConfigInvalid, "truncate enumeration exceeds the cap");

      std::array<PlaneSquare, 3> parents;
      bool all_resolved = true;
      for (int j = 0; j < 3 && all_resolved; ++j) {
        auto ax = SingularGeometry::plane_axes(j);
        PlaneSquare sq =
            self->square_at_truncated(j, cell[ax[0]].center(), cell[ax[1]].center(), k);
        if (sq.scale() < s) {
          all_resolved = false;
        } else {
          parents[j] = sq;
        }
      }
      if (all_resolved) {
        LocatedTube t = assemble(parents);
        found->emplace(key_of(t), t);
        return;
      }
      if (s <= -k) return;
      for (int b = 0; b < 8; ++b) {
        std::array<std::int64_t, 3> ci;
        std::array<DyadicInterval, 3> ch = {cell[0].child(b & 1, sw), cell[1].child((b >> 1) & 1, sw),
                                            cell[2].child((b >> 2) & 1, sw)};
        for (int i = 0; i < 3; ++i) ci[i] = ch[i].index();
        visit(s - 1, ci);
      }
    }
  };

  Rec rec{this, &window, &found, &visited, max_count, k};
  int top = params_.max_scale;
  std::array<std::pair<std::int64_t, std::int64_t>, 3> rng;
  for (int i = 0; i < 3; ++i)
    rng[i] = {(window[i].lo / Rat::pow2(top)).floor() - 1,
              (window[i].hi / Rat::pow2(top)).floor() + 1};
  for (std::int64_t a = rng[0].first; a <= rng[0].second; ++a)
    for (std::int64_t b = rng[1].first; b <= rng[1].second; ++b)
      for (std::int64_t c = rng[2].first; c <= rng[2].second; ++c) rec.visit(top, {a, b, c});

  TruncateResult out;
  for (auto& kv : found) {
    if (kv.second.has_fill)
      out.fill.push_back(kv.second);
    else
      out.kept.push_back(kv.second);
  }
  return out;
}

std::size_t WhitneyDecomposition::count_fill_cubes(const std::array<RatIv, 3>& window,
                                                   int k) const {
  // Counts the gamma-line core of the filler family: scale 2^{-k} cells whose
  // three plane projections are all non-separated at scale -k. These are the
  // eccentricity-one members produced by the filler construction.
  ScaleWindow sw{params_.min_scale - 1, params_.max_scale + 1};
  Rat c13 = params_.c1_third();
  Rat w = Rat::pow2(-k);
  auto idx_range = [&](const RatIv& iv) {
    return std::make_pair((iv.lo / w).floor() - 1, (iv.hi / w).floor() + 1);
  };
  auto [i0_lo, i0_hi] = idx_range(window[0]);

  auto cond2 = [&](std::int64_t i0, std::int64_t i1) {  // plane j=2, axes (0,1)
    DyadicInterval a(params_.grid, -k, i0), b(params_.grid, -k, i1);
    return line_meets_box2(geom_.line_dir(2), a.closure().dilate_center(c13),
                           b.closure().dilate_center(c13));
  };
  // For plane j with axes (u, 2): given the cell on axis u, the i2 range whose
  // (C1/3)-dilates meet L_j.
  auto i2_window = [&](int j, std::int64_t iu) -> std::optional<std::pair<std::int64_t, std::int64_t>> {
    auto d = geom_.line_dir(j);  // (g[u], g[2])
    DyadicInterval u(params_.grid, -k, iu);
    RatIv tu = t_window(d[0], u.closure().dilate_center(c13));
    // x2 range: d[1] * t over tu, then widen by the dilated half-width.
    RatIv x2 = RatIv{tu.lo * d[1], tu.hi * d[1]};
    if (x2.hi < x2.lo) std::swap(x2.lo, x2.hi);
    Rat halfw = w * c13 * Rat(1, 2);
    Rat lo = x2.lo - halfw - w, hi = x2.hi + halfw;
    return std::make_pair((lo / w).floor(), (hi / w).floor() + 1);
  };

  auto [j1a, j1b] = idx_range(window[1]);
  auto [j2a, j2b] = idx_range(window[2]);
  std::size_t count = 0;
  for (std::int64_t i0 = i0_lo; i0 <= i0_hi; ++i0) {
    auto w1 = i2_window(1, i0);  // plane j=1, axes (0,2): i2 range from i0
    if (!w1) continue;
    for (std::int64_t i1 = j1a; i1 <= j1b; ++i1) {
      if (!cond2(i0, i1)) continue;
      auto w0 = i2_window(0, i1);  // plane j=0, axes (1,2): i2 range from i1
      if (!w0) continue;
      std::int64_t lo = std::max({w0->first, w1->first, j2a});
      std::int64_t hi = std::min({w0->second, w1->second, j2b});
      for (std::int64_t i2 = lo; i2 <= hi; ++i2) {
        // Exact confirmation of both i2-dependent conditions.
        DyadicInterval c2(params_.grid, -k, i2);
        DyadicInterval a0(params_.grid, -k, i0), a1(params_.grid, -k, i1);
        bool f0 = line_meets_box2(geom_.line_dir(0), a1.closure().dilate_center(c13),
                                  c2.closure().dilate_center(c13));
        bool f1 = line_meets_box2(geom_.line_dir(1), a0.closure().dilate_center(c13),
                                  c2.closure().dilate_center(c13));
        if (f0 && f1) ++count;
      }
    }
  }
  (void)sw;
  return count;
}

bool WhitneyDecomposition::check_gamma_separation(const LocatedTube& t) const {
  std::array<std::optional<RatIv>, 3> box;
  for (int i = 0; i < 3; ++i)
    if (t.tube.box.side[i]) box[i] = t.tube.box.side[i]->closure().dilate_center(params_.c1_third());
  return !line_meets_box3(geom_.gdir, box);
}

bool WhitneyDecomposition::check_gamma_closeness(const LocatedTube& t) const {
  std::array<std::optional<RatIv>, 3> box;
  for (int i = 0; i < 3; ++i)
    if (t.tube.box.side[i]) box[i] = t.tube.box.side[i]->closure().dilate_center(params_.c3());
  return line_meets_box3(geom_.gdir, box);
}

bool WhitneyDecomposition::check_47_48(const LocatedTube& t) const {
  auto orient = t.tube.orientation();
  int a = orient ? *orient : 2;
  for (int u = 0; u < 3; ++u) {
    if (u == a) continue;
    int j = 3 - a - u;  // the remaining axis
    auto ax = SingularGeometry::plane_axes(j);
    const auto& bu = *t.tube.box.side[ax[0]];
    const auto& bv = *t.tube.box.side[ax[1]];
    if (line_meets_box2(geom_.line_dir(j), bu.closure(), bv.closure())) return false;
  }
  return true;
}

double PartitionOfUnity::bump_value(std::size_t i, const std::array<double, 3>& xi) const {
  double v = 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    const auto& side = tubes_[i].tube.box.side[ax];
    if (!side) continue;
    double c = side->center().value();
    double len = side->length().value();
    double u = (xi[ax] - c) / len;
    v *= smoothstep(2.0 - 2.0 * std::abs(u));
    if (v == 0) return 0;
  }
  return v;
}

double PartitionOfUnity::sum(const std::array<double, 3>& xi) const {
  double s = 0;
  for (std::size_t i = 0; i < tubes_.size(); ++i) s += bump_value(i, xi);
  return s;
}

double PartitionOfUnity::value(std::size_t i, const std::array<double, 3>& xi) const {
  double b = bump_value(i, xi);
  if (b == 0) return 0;
  double s = sum(xi);
  if (s <= 0) raise(Errc::CoverageGap, "no family member covers the point");
  return b / s;
}

}  // namespace mitf
