#include "mitf/tiles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <map>

namespace mitf {

RatIv gamma_window(const Rat& d, const RatIv& iv) {
  Rat a = iv.lo / d, b = iv.hi / d;
  return a <= b ? RatIv{a, b} : RatIv{b, a};
}

namespace {

// Container of target length 2^scale holding iv, in the first grid (standard
// first) that hosts all constraints of the batch. Returns nullopt per grid.
struct GridBatch {
  std::vector<std::pair<RatIv, int>> constraints;  // (interval, scale)

  std::optional<std::vector<DyadicInterval>> try_grid(const Grid& g, const ScaleWindow& sw) const {
    std::vector<DyadicInterval> out;
    out.reserve(constraints.size());
    for (const auto& c : constraints) {
      auto iv = aligned_container(c.first, g, c.second, sw);
      if (!iv) return std::nullopt;
      out.push_back(*iv);
    }
    return out;
  }
};

}  // namespace

PhaseData build_phase_data(const SingularGeometry& geom, const ModelParams& params,
                           const std::vector<LocatedTube>& tubes, const BuildOptions& opt) {
  PhaseData data;
  data.geom = geom;
  data.params = params;
  ScaleWindow sw{-40, 40};
  std::map<std::array<std::tuple<int, int, std::int64_t>, 4>, int> rect_index;

  for (const auto& tube : tubes) {
    auto orient = tube.tube.orientation();
    // The (5.10) orientation class; kappa = 0 members are cubes.
    if (params.kappa == 0 ? orient.has_value() : !(orient && *orient == 2)) continue;
    if (tube.tube.eccentricity() != Rat::pow2(-params.kappa)) continue;
    std::array<DyadicInterval, 3> w = {*tube.tube.box.side[0], *tube.tube.box.side[1],
                                       *tube.tube.box.side[2]};
    int sc_w1 = w[0].scale();
    int sc_w3 = w[2].scale();
    int sc_i = -4 - sc_w1;   // |I_1| = (16 |omega_1|)^{-1}
    int sc_i3 = -4 - sc_w3;  // |I_3| = (16 |omega_3|)^{-1}
    int sc_ir = 7 + params.m + sc_i;

    // Spatial triples: anchor I_2, sweep I_3 offsets in the (5.11) band, then
    // pick the I_1 position minimizing |sum gamma_i c(I_i)|.
    Rat len_i = Rat::pow2(sc_i);
    Grid std_grid = Grid::standard();
    std::int64_t lo2 = (opt.spatial_window.lo / len_i).floor();
    std::int64_t hi2 = (opt.spatial_window.hi / len_i).floor();
    std::int64_t span2 = std::max<std::int64_t>(1, hi2 - lo2);
    std::int64_t step2 = std::max<std::int64_t>(1, span2 / 8);
    int emitted_for_tube = 0;

    for (std::int64_t i2 = lo2; i2 <= hi2 && emitted_for_tube < opt.max_triples_per_tube;
         i2 += step2) {
      DyadicInterval I2(std_grid, sc_i, i2);
      // diam(I_1,I_2,I_3)/|I| in [2^{m-1}, 2^m]; sweep I_3 through the band.
      std::int64_t band = std::int64_t(1) << params.m;
      for (std::int64_t d3 : {-band, -(band * 3) / 4, (band * 3) / 4, band}) {
        Rat c3_target = I2.center() + Rat(d3) * len_i * Rat(3, 4);
        DyadicInterval I3 = DyadicInterval::at(std_grid, sc_i3, c3_target, sw);
        // I_1 minimizing |g . c| subject to (5.11)/(5.12).
        Rat c1_target = -(Rat(geom.gdir[1]) * I2.center() + Rat(geom.gdir[2]) * I3.center()) /
                        Rat(geom.gdir[0]);
        std::optional<DyadicInterval> best;
        Rat best_val;
        std::int64_t base = (c1_target / len_i).floor();
        for (std::int64_t di = -2 * band - 2; di <= 2 * band + 2; ++di) {
          DyadicInterval I1(std_grid, sc_i, base + di);
          Rat lo = std::min({I1.left(), I2.left(), I3.left()});
          Rat hi = std::max({I1.right(), I2.right(), I3.right()});
          Rat diam = hi - lo;
          if (diam < Rat::pow2(params.m - 1) * len_i || Rat::pow2(params.m) * len_i < diam)
            continue;
          Rat lo23 = std::min(I2.left(), I3.left());
          Rat hi23 = std::max(I2.right(), I3.right());
          if (hi23 - lo23 < Rat::pow2(params.m - 2) * len_i) continue;
          Rat val = (Rat(geom.gdir[0]) * I1.center() + Rat(geom.gdir[1]) * I2.center() +
                     Rat(geom.gdir[2]) * I3.center())
                        .abs();
          if (!best || val < best_val) {
            best = I1;
            best_val = val;
          }
        }
        if (!best) continue;
        DyadicInterval I1 = *best;

        // The nine intervals of items (1)-(4); the spatial I_{p_i} never
        // constrain the grid (they are located by a point).
        GridBatch batch;
        for (int i = 0; i < 3; ++i)
          batch.constraints.push_back({w[i].closure().dilate_center(Rat(8)), w[i].scale() + 7});
        Rat hull_lo = std::min({I1.left(), I2.left(), I3.left()});
        Rat hull_hi = std::max({I1.right(), I2.right(), I3.right()});
        batch.constraints.push_back({RatIv{hull_lo, hull_hi}, sc_ir});

        std::optional<std::vector<DyadicInterval>> got;
        Grid used = std_grid;
        for (int r = 0; r < 11 && !got; ++r) {
          Grid g(11, r);
          got = batch.try_grid(g, sw);
          if (got) used = g;
        }
        if (!got) raise(Errc::GridExhausted, "no grid hosts the interval batch");
        const auto& iv = *got;
        std::array<DyadicInterval, 3> omega_p = {iv[0], iv[1], iv[2]};
        // omega_{R_i}: the length 2^7|omega_3| grid ancestors of omega_{p_i};
        // omega_{R_3} = omega_{p_3}.
        std::array<DyadicInterval, 3> omega_r = {omega_p[0], omega_p[1], omega_p[2]};
        for (int i = 0; i < 2; ++i)
          for (int step = 0; step < params.kappa; ++step) omega_r[i] = omega_r[i].parent(sw);
        DyadicInterval I_R = iv[3];

        // Spatial tile intervals inside I_i with |I_p| |omega_p| = 1.
        std::array<DyadicInterval, 3> I_p = {
            DyadicInterval::at(used, -7 - sc_w1, I1.center(), sw),
            DyadicInterval::at(used, -7 - sc_w1, I2.center(), sw),
            DyadicInterval::at(used, -7 - sc_w3, I3.center(), sw)};
        const DyadicInterval* outer[3] = {&I1, &I2, &I3};
        for (int i = 0; i < 3; ++i)
          if (!outer[i]->contains(I_p[i])) raise(Errc::Internal, "I_p escapes I_i");

        std::array<std::tuple<int, int, std::int64_t>, 4> key{
            std::make_tuple(used.residue(), I_R.scale(), I_R.index()),
            std::make_tuple(used.residue(), omega_r[0].scale(), omega_r[0].index()),
            std::make_tuple(used.residue(), omega_r[1].scale(), omega_r[1].index()),
            std::make_tuple(used.residue(), omega_r[2].scale(), omega_r[2].index())};
        auto it = rect_index.find(key);
        if (it == rect_index.end()) {
          MultiRectangle R;
          R.time = I_R;
          R.freq = omega_r;
          it = rect_index.emplace(key, int(data.rects.size())).first;
          data.rects.push_back(R);
        }
        MultiTile tile;
        for (int i = 0; i < 3; ++i) tile.p[i] = TileIx{I_p[i], omega_p[i]};
        tile.rect = it->second;
        // Drop duplicates within the rectangle.
        bool dup = false;
        for (int ti : data.rects[it->second].tiles) {
          const auto& q = data.tiles[ti];
          if (q.p[0] == tile.p[0] && q.p[1] == tile.p[1] && q.p[2] == tile.p[2]) {
            dup = true;
            break;
          }
        }
        if (dup) continue;
        data.rects[it->second].tiles.push_back(int(data.tiles.size()));
        data.tiles.push_back(tile);
        ++emitted_for_tube;
        if (data.tiles.size() >= opt.max_tiles) return data;
      }
    }
  }
  return data;
}

std::vector<LocatedTube> collect_class_tubes(const WhitneyDecomposition& wd, int kappa,
                                             const RatIv& t_range, int n_samples,
                                             std::uint64_t seed, std::size_t max_count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto& g = wd.geometry().gdir;
  // Normals of P_3 and P_1 for gdir-based geometry.
  std::array<Rat, 3> n3 = {Rat(-g[1]), Rat(g[0]), Rat(0)};
  std::array<Rat, 3> n1 = {Rat(0), Rat(-g[2]), Rat(g[1])};
  std::map<std::array<std::pair<int, std::int64_t>, 3>, LocatedTube> found;
  Rat span = t_range.hi - t_range.lo;
  double c1 = wd.params().c1().value();

  for (int it = 0; it < n_samples && found.size() < max_count; ++it) {
    Rat t = t_range.lo + span * Rat(std::int64_t(u01(rng) * 4096), 4096);
    // Long-side distance scale; the offset stays almost tangent to P_3 so the
    // Omega_3 square is the small one (the (5.10) class).
    int e = int(std::floor(std::log2(std::max(1e-6, t_range.hi.value() * 0.2)))) -
            int(u01(rng) * 3);
    double dd = std::ldexp(1.0, e) * (0.4 + 0.6 * u01(rng)) * c1 / 1024.0;
    double av = dd * (u01(rng) < 0.5 ? 1 : -1);
    double bv;
    if (kappa == 0) {
      bv = av * (-0.6 + 1.5 * u01(rng));
    } else {
      double eps = dd * std::ldexp(1.0, -kappa) * (0.5 + 0.9 * u01(rng));
      bv = -av + eps * (u01(rng) < 0.5 ? 1 : -1);
    }
    Rat a(std::int64_t(av * 4096), 4096);
    Rat b(std::int64_t(bv * 4096), 4096);
    std::array<Rat, 3> xi;
    for (int i = 0; i < 3; ++i) xi[i] = t * Rat(g[i]) + a * n3[i] + b * n1[i];
    auto loc = wd.tube_at(xi);
    if (!loc) continue;
    auto orient = loc->tube.orientation();
    // kappa = 0 members are cubes and carry no orientation.
    if (kappa == 0 ? orient.has_value() : !(orient && *orient == 2)) continue;
    if (loc->tube.eccentricity() != Rat::pow2(-kappa)) continue;
    std::array<std::pair<int, std::int64_t>, 3> key;
    for (int i = 0; i < 3; ++i)
      key[i] = {loc->tube.box.side[i]->scale(), loc->tube.box.side[i]->index()};
    found.emplace(key, *loc);
  }
  std::vector<LocatedTube> out;
  for (auto& kv : found) out.push_back(kv.second);
  return out;
}

namespace {

std::string t_witness(const RatIv& w) { return "t in [" + w.lo.str() + ", " + w.hi.str() + "]"; }

struct LineChecks {
  const SingularGeometry& geom;
  Rat c2, c3, c3a;

  RatIv window(int coord, const RatIv& iv) const {
    return gamma_window(Rat(geom.gdir[coord]), iv);
  }
  // hypothesis window H mapped through coordinate `coord` must avoid the
  // exclusion dilate and stay inside the inclusion dilate.
  bool excluded(const RatIv& hyp, int coord, const DyadicInterval& iv, const Rat& dil) const {
    RatIv bad = window(coord, iv.closure().dilate_center(dil));
    return !hyp.intersects(bad);
  }
  bool included(const RatIv& hyp, int coord, const DyadicInterval& iv, const Rat& dil) const {
    RatIv good = window(coord, iv.closure().dilate_center(dil));
    return good.contains(hyp);
  }
};

}  // namespace

RankReport rank_check(const PhaseData& data) {
  RankReport rep;
  LineChecks lc{data.geom, data.params.c2(), data.params.c3(),
                data.params.c3() * data.params.area()};

  for (std::size_t ti = 0; ti < data.tiles.size(); ++ti) {
    const auto& p = data.tiles[ti];
    ++rep.tiles_checked;
    // (1) 3-overlapping implies j-lacunary (tile version).
    RatIv h3 = lc.window(2, p.p[2].freq.closure().dilate_center(Rat(2)));
    for (int j = 0; j < 2; ++j) {
      if (!lc.excluded(h3, j, p.p[j].freq, lc.c2))
        rep.violations.push_back({1, int(ti), j + 1, t_witness(h3)});
      if (!lc.included(h3, j, p.p[j].freq, lc.c3a))
        rep.violations.push_back({1, int(ti), -(j + 1), t_witness(h3)});
    }
    // (2) j-overlapping implies 3-lacunary; (3) j-overlapping implies i-lacunary.
    for (int j = 0; j < 2; ++j) {
      RatIv hj = lc.window(j, p.p[j].freq.closure().dilate_center(Rat(2)));
      if (!lc.excluded(hj, 2, p.p[2].freq, lc.c2))
        rep.violations.push_back({2, int(ti), j + 1, t_witness(hj)});
      if (!lc.included(hj, 2, p.p[2].freq, lc.c3))
        rep.violations.push_back({2, int(ti), -(j + 1), t_witness(hj)});
      int i = 1 - j;
      if (!lc.excluded(hj, i, p.p[i].freq, lc.c2))
        rep.violations.push_back({3, int(ti), j + 1, t_witness(hj)});
      if (!lc.included(hj, i, p.p[i].freq, lc.c3))
        rep.violations.push_back({3, int(ti), -(j + 1), t_witness(hj)});
    }
  }

  for (std::size_t ri = 0; ri < data.rects.size(); ++ri) {
    const auto& R = data.rects[ri];
    ++rep.rects_checked;
    // (4) 3-overlapping implies j-lacunary (rectangle version).
    RatIv h3 = lc.window(2, R.freq[2].closure().dilate_center(Rat(2)));
    for (int j = 0; j < 2; ++j) {
      if (!lc.excluded(h3, j, R.freq[j], lc.c2))
        rep.violations.push_back({4, int(ri), j + 1, t_witness(h3)});
      if (!lc.included(h3, j, R.freq[j], lc.c3))
        rep.violations.push_back({4, int(ri), -(j + 1), t_witness(h3)});
    }
    // (5) j-overlapping implies 3-lacunary (rectangle version).
    for (int j = 0; j < 2; ++j) {
      RatIv hj = lc.window(j, R.freq[j].closure().dilate_center(Rat(2)));
      if (!lc.excluded(hj, 2, R.freq[2], lc.c2))
        rep.violations.push_back({5, int(ri), j + 1, t_witness(hj)});
      if (!lc.included(hj, 2, R.freq[2], lc.c3))
        rep.violations.push_back({5, int(ri), -(j + 1), t_witness(hj)});
    }
    // (6) j-overlapping implies i-C3-overlapping for every i.
    for (int j = 0; j < 3; ++j) {
      RatIv hj = lc.window(j, R.freq[j].closure().dilate_center(Rat(2)));
      for (int i = 0; i < 3; ++i) {
        if (!lc.included(hj, i, R.freq[i], lc.c3))
          rep.violations.push_back({6, int(ri), 10 * (j + 1) + i + 1, t_witness(hj)});
      }
    }
  }
  return rep;
}

}  // namespace mitf
