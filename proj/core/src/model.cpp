#include "mitf/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mitf {

namespace {

Iv to_iv(const DyadicInterval& d) { return Iv{d.left().value(), d.right().value()}; }

}  // namespace

CoefTable compute_coefficients(const PhaseData& data, const WavePacketFactory& factory,
                               const SampledFunction& f1, const SampledFunction& f2,
                               const SampledFunction& f3) {
  CoefTable out;
  out.c.resize(data.tiles.size());
  std::array<Spectrum, 3> spec = {f1.spectrum(), f2.spectrum(), f3.spectrum()};
  std::map<TileIx, PacketSpectrum> cache;
  for (std::size_t ti = 0; ti < data.tiles.size(); ++ti) {
    for (int j = 0; j < 3; ++j) {
      const TileIx& tile = data.tiles[ti].p[j];
      auto it = cache.find(tile);
      if (it == cache.end())
        it = cache.emplace(tile, factory.make(to_iv(tile.time), to_iv(tile.freq))).first;
      out.c[ti][j] = it->second.inner_against(spec[j]);
    }
  }
  return out;
}

double model_sum(const PhaseData& data, const CoefTable& coefs) {
  return model_sum_subset(data, coefs, all_tiles(data));
}

double model_sum_subset(const PhaseData& data, const CoefTable& coefs, const TileSet& subset) {
  double a_factor = std::pow(data.params.area().value(), -data.params.delta_prime);
  double acc = 0;
  for (int ti : subset) {
    const auto& tile = data.tiles[ti];
    const auto& R = data.rects[tile.rect];
    double term = std::sqrt(tile.p[2].time.length().value()) / R.time.length().value();
    for (int j = 0; j < 3; ++j) term *= std::abs(coefs.c[ti][j]);
    acc += term;
  }
  return a_factor * acc;
}

double tree_estimate_rhs(const PhaseData& data, const CoefTable& coefs,
                         const std::vector<Tree>& forest) {
  TileSet tiles;
  double tops = 0;
  for (const auto& t : forest) {
    tops += t.top_time.length().value();
    for (int ti : t.tile_indices()) tiles.insert(ti);
  }
  double sizes = 0;
  for (int i = 0; i <= 3; ++i) {
    double prod = 1;
    for (int j = 1; j <= 3; ++j) {
      int ii = (i == 0 && j == 3) ? 3 : i;
      prod *= size_ji(data, coefs, tiles, j, ii);
    }
    sizes += prod;
  }
  return sizes * tops;
}

PhaseData synth_family(const ModelParams& params, const SynthOptions& opt, std::mt19937_64& rng) {
  PhaseData data;
  data.geom = SingularGeometry{};
  data.params = params;
  Grid g = Grid::standard();
  ScaleWindow sw{-40, 40};
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  for (int s = 0; s < opt.n_scales; ++s) {
    int sc_ir = opt.base_scale - s * opt.scale_step;
    // |I_R| = 2^{7+m} |I_1|, |I_p1| = |I_1|/8, |omega_p1| = 8 / |I_1|.
    int sc_i1 = sc_ir - 7 - params.m;
    int sc_ip = sc_i1 - 3;
    int sc_wp12 = -sc_ip;                 // |omega_p| = |I_p|^{-1}
    int sc_wp3 = sc_wp12 + params.kappa;  // omega_{p_3} wider by the eccentricity
    int sc_ip3 = -sc_wp3;

    for (int r = 0; r < opt.rects_per_scale; ++r) {
      Rat len_ir = Rat::pow2(sc_ir);
      double pos = (u01(rng) * 2.0 - 1.0) * opt.spread;
      Rat center = Rat(std::int64_t(std::lround(pos * 64)), 64) * len_ir;
      DyadicInterval I_R = DyadicInterval::at(g, sc_ir, center, sw);

      // Frequency boxes around the anchor line point, one dyadic wobble.
      std::array<DyadicInterval, 3> wr = {
          DyadicInterval::at(g, sc_wp3, opt.anchor_t * Rat(data.geom.gdir[0]), sw),
          DyadicInterval::at(g, sc_wp3, opt.anchor_t * Rat(data.geom.gdir[1]), sw),
          DyadicInterval::at(g, sc_wp3, opt.anchor_t * Rat(data.geom.gdir[2]), sw)};
      int wobble = int(u01(rng) * 3) - 1;
      for (int i = 0; i < 3; ++i)
        wr[i] = DyadicInterval(g, sc_wp3, wr[i].index() + wobble * (i == 2 ? 2 : 1));

      MultiRectangle R;
      R.time = I_R;
      R.freq = wr;
      int rect_idx = int(data.rects.size());

      for (int q = 0; q < opt.tiles_per_rect; ++q) {
        MultiTile tile;
        tile.rect = rect_idx;
        // Spatial positions inside I_R.
        std::int64_t span = std::int64_t(1) << (sc_ir - sc_ip);
        std::int64_t off = std::int64_t(u01(rng) * double(span - 8));
        std::int64_t span3 = std::int64_t(1) << (sc_ir - sc_ip3);
        std::int64_t off3 = std::int64_t(u01(rng) * double(span3 - 1));
        DyadicInterval base_p = DyadicInterval::at(g, sc_ip, I_R.left(), sw);
        DyadicInterval base_p3 = DyadicInterval::at(g, sc_ip3, I_R.left(), sw);
        // Frequency subtiles inside omega_{R_i} for i = 1, 2; omega_{p_3} = omega_{R_3}.
        std::int64_t fspan = std::int64_t(1) << params.kappa;
        for (int i = 0; i < 2; ++i) {
          DyadicInterval wbase = DyadicInterval::at(g, sc_wp12, wr[i].left(), sw);
          std::int64_t foff = std::int64_t(u01(rng) * double(fspan));
          tile.p[i] = TileIx{DyadicInterval(g, sc_ip, base_p.index() + off),
                             DyadicInterval(g, sc_wp12, wbase.index() + foff)};
        }
        tile.p[2] = TileIx{DyadicInterval(g, sc_ip3, base_p3.index() + off3), wr[2]};
        bool dup = false;
        for (int ti : R.tiles) {
          const auto& o = data.tiles[ti];
          if (o.p[0] == tile.p[0] && o.p[1] == tile.p[1] && o.p[2] == tile.p[2]) dup = true;
        }
        if (dup) continue;
        R.tiles.push_back(int(data.tiles.size()));
        data.tiles.push_back(tile);
      }
      data.rects.push_back(std::move(R));
    }
  }
  return data;
}

CoefTable random_coefficients(const PhaseData& data, std::mt19937_64& rng, double amp) {
  std::normal_distribution<double> nd(0.0, amp);
  CoefTable out;
  out.c.resize(data.tiles.size());
  // Coefficients attach to tiles, not slots independently: tiles sharing a
  // slot-j component must agree there.
  std::map<TileIx, cplx> memo;
  for (std::size_t ti = 0; ti < data.tiles.size(); ++ti) {
    for (int j = 0; j < 3; ++j) {
      const TileIx& slot = data.tiles[ti].p[j];
      auto it = memo.find(slot);
      if (it == memo.end()) it = memo.emplace(slot, cplx(nd(rng), nd(rng))).first;
      out.c[ti][j] = it->second;
    }
  }
  return out;
}

BesselSample bessel_sample(const PhaseData& data, const CoefTable& coefs, int j, double lambda,
                           double f_norm2) {
  BesselSample out;
  out.lambda = lambda;
  TileSet all = all_tiles(data);
  std::vector<int> qualifying;
  for (int ri = 0; ri < int(data.rects.size()); ++ri) {
    double mass = rect_mass(data, coefs, ri, all, j);
    if (mass >= lambda * lambda * data.rects[ri].time.length().value()) qualifying.push_back(ri);
  }
  std::sort(qualifying.begin(), qualifying.end(), [&](int a, int b) {
    Rat la = data.rects[a].time.length(), lb = data.rects[b].time.length();
    if (!(la == lb)) return lb < la;
    return data.rects[a].time.left() < data.rects[b].time.left();
  });
  std::vector<int> chosen;
  for (int ri : qualifying) {
    bool ok = true;
    for (int c : chosen) {
      bool time_meet = data.rects[ri].time.intersects(data.rects[c].time);
      bool freq_meet = data.rects[ri].freq[j - 1].intersects(data.rects[c].freq[j - 1]);
      if (time_meet && freq_meet) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(ri);
  }
  for (int ri : chosen) out.mass_sum += data.rects[ri].time.length().value();
  out.count = chosen.size();
  out.ratio = out.mass_sum * lambda * lambda / std::max(f_norm2 * f_norm2, 1e-300);
  return out;
}

double maximal_indicator(const SetE& e, double x) {
  std::vector<double> lefts{x}, rights{x};
  for (const auto& p : e.pieces) {
    lefts.push_back(p.lo);
    rights.push_back(p.hi);
  }
  auto measure_in = [&](double a, double b) {
    double s = 0;
    for (const auto& p : e.pieces) s += std::max(0.0, std::min(b, p.hi) - std::max(a, p.lo));
    return s;
  };
  double best = 0;
  for (double a : lefts) {
    if (a > x) continue;
    for (double b : rights) {
      if (b < x || b - a < 1e-12) continue;
      best = std::max(best, measure_in(a, b) / (b - a));
    }
  }
  return best;
}

SampledFunction x2_test_function(const SetE& e, const FunctionGrid& g, std::mt19937_64& rng) {
  double amp = 1.0 / std::sqrt(std::max(e.measure(), 1e-12));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SampledFunction f(g);
  // Random piecewise phases with a random lattice modulation per piece.
  for (const auto& p : e.pieces) {
    double ph0 = 2 * M_PI * u01(rng);
    double freq = std::floor(u01(rng) * 8.0) / g.length() * 64.0;
    int i0 = std::max(0, int(std::ceil((p.lo - g.a) / g.h)));
    int i1 = std::min(g.n - 1, int(std::floor((p.hi - g.a) / g.h)));
    for (int i = i0; i <= i1; ++i) {
      double ph = ph0 + 2 * M_PI * freq * g.x(i);
      f.values()[i] = amp * cplx(std::cos(ph), std::sin(ph));
    }
  }
  return f;
}

RestrictedTypeResult restricted_type(const PhaseData& data, const WavePacketFactory& factory,
                                     const std::array<SetE, 3>& sets,
                                     const std::array<double, 3>& alpha, int j0, int n_tests,
                                     std::uint64_t seed) {
  if (j0 < 1 || j0 > 3) raise(Errc::ConfigInvalid, "j0 must be 1, 2 or 3");
  double sum_alpha = alpha[0] + alpha[1] + alpha[2];
  if (std::abs(sum_alpha - 1.0) > 1e-12) raise(Errc::AlphaOutOfRegion, "alpha must sum to 1");
  for (int j = 0; j < 3; ++j) {
    if (j == j0 - 1) {
      if (!(alpha[j] > -0.5 - 1e-12 && alpha[j] > -data.params.delta - 1e-12 && alpha[j] < 0))
        raise(Errc::AlphaOutOfRegion, "alpha_{j0} must lie in (max(-delta,-1/2), 0)");
    } else if (!(alpha[j] > 0.5 && alpha[j] < 1.0)) {
      raise(Errc::AlphaOutOfRegion, "the other two exponents must lie in (1/2, 1)");
    }
  }

  RestrictedTypeResult out;
  out.area_rel = std::ldexp(1.0, data.params.kappa + data.params.m);
  const FunctionGrid& g = factory.grid();

  // Exceptional set Omega and the major subset E~_{j0}.
  const SetE& e0 = sets[j0 - 1];
  SetE major;
  double kept = 0;
  for (const auto& p : e0.pieces) {
    // Scan the piece on the grid and keep maximal sub-pieces off Omega.
    int i0 = std::max(0, int(std::ceil((p.lo - g.a) / g.h)));
    int i1 = std::min(g.n - 1, int(std::floor((p.hi - g.a) / g.h)));
    std::optional<double> start;
    for (int i = i0; i <= i1 + 1; ++i) {
      bool in_omega = false;
      if (i <= i1) {
        double x = g.x(i);
        for (int j = 0; j < 3; ++j) {
          if (maximal_indicator(sets[j], x) > 100.0 * sets[j].measure()) {
            in_omega = true;
            break;
          }
        }
      }
      bool inside = (i <= i1) && !in_omega;
      if (inside && !start) start = g.x(i);
      if (!inside && start) {
        major.pieces.push_back({*start, g.x(i)});
        kept += g.x(i) - *start;
        start.reset();
      }
    }
  }
  out.major_subset = major;
  out.major_fraction = kept / std::max(e0.measure(), 1e-300);

  double denom = 1;
  for (int j = 0; j < 3; ++j) denom *= std::pow(sets[j].measure(), alpha[j]);

  std::mt19937_64 rng(seed);
  double best = 0;
  CoefTable best_coefs;
  for (int trial = 0; trial < n_tests; ++trial) {
    std::array<SampledFunction, 3> f = {
        x2_test_function(j0 == 1 ? major : sets[0], g, rng),
        x2_test_function(j0 == 2 ? major : sets[1], g, rng),
        x2_test_function(j0 == 3 ? major : sets[2], g, rng)};
    CoefTable coefs = compute_coefficients(data, factory, f[0], f[1], f[2]);
    double v = model_sum(data, coefs) / denom;
    out.per_function.push_back(v);
    if (v >= best) {
      best = v;
      best_coefs = coefs;
    }
  }
  out.bound = best;

  // (6.33)-style level combination on the extremal tuple: sum over levels of
  // 2^{k_1+k_2+k_3} min_j sum |I_T|.
  if (!best_coefs.c.empty()) {
    std::array<std::vector<SizeLevel>, 3> levels;
    for (int j = 1; j <= 3; ++j) levels[j - 1] = decompose_by_size(data, best_coefs, j);
    double comb = 0;
    for (const auto& l1 : levels[0])
      for (const auto& l2 : levels[1])
        for (const auto& l3 : levels[2]) {
          double tops = std::min({l1.top_length_sum, l2.top_length_sum, l3.top_length_sum});
          if (tops <= 0) continue;
          comb += std::ldexp(1.0, l1.k + l2.k + l3.k) * tops;
        }
    out.level_combination = comb / denom;
  }
  return out;
}

}  // namespace mitf
