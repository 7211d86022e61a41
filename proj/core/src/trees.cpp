#include "mitf/trees.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mitf {

namespace {

RatIv two_window(const SingularGeometry& geom, int coord, const DyadicInterval& iv) {
  return gamma_window(Rat(geom.gdir[coord]), iv.closure().dilate_center(Rat(2)));
}

bool in_two(const SingularGeometry& geom, int coord, const DyadicInterval& iv, const Rat& t) {
  return two_window(geom, coord, iv).contains(t);
}

// Def 6.1 membership of a tile at line parameter t.
bool tile_qualifies(const PhaseData& data, TreeType type, int tile, const Rat& t) {
  const auto& p = data.tiles[tile];
  const auto& R = data.rects[p.rect];
  const auto& g = data.geom;
  switch (type) {
    case TreeType::T1: return in_two(g, 0, p.p[0].freq, t);
    case TreeType::T2: return in_two(g, 1, p.p[1].freq, t);
    case TreeType::T3: return in_two(g, 2, p.p[2].freq, t);
    case TreeType::T01:
      return in_two(g, 0, R.freq[0], t) && !in_two(g, 0, p.p[0].freq, t) &&
             !in_two(g, 1, p.p[1].freq, t);
    case TreeType::T02:
      return in_two(g, 1, R.freq[1], t) && !in_two(g, 0, p.p[0].freq, t) &&
             !in_two(g, 1, p.p[1].freq, t);
  }
  return false;
}

Tree build_maximal_tree(const PhaseData& data, const TileSet& available, TreeType type,
                        const DyadicInterval& top, const Rat& t,
                        const std::function<bool(int)>& extra = nullptr) {
  Tree tree;
  tree.type = type;
  tree.top_time = top;
  tree.top_t = t;
  std::map<int, std::vector<int>> by_rect;
  for (int ti : available) {
    const auto& p = data.tiles[ti];
    const auto& R = data.rects[p.rect];
    if (!top.contains(R.time)) continue;
    if (!tile_qualifies(data, type, ti, t)) continue;
    if (extra && !extra(ti)) continue;
    by_rect[p.rect].push_back(ti);
  }
  for (auto& kv : by_rect) tree.members.emplace_back(kv.first, std::move(kv.second));
  return tree;
}

std::array<TreeType, 5> kAllTypes = {TreeType::T1, TreeType::T2, TreeType::T3, TreeType::T01,
                                     TreeType::T02};

}  // namespace

TileSet all_tiles(const PhaseData& data) {
  TileSet s;
  for (int i = 0; i < int(data.tiles.size()); ++i) s.insert(i);
  return s;
}

TileSet saturation(const PhaseData& data, const DyadicInterval& top, const Rat& t,
                   const TileSet& available) {
  TileSet out;
  for (int ti : available) {
    const auto& R = data.rects[data.tiles[ti].rect];
    if (!top.contains(R.time)) continue;
    for (int i = 0; i < 3; ++i) {
      if (in_two(data.geom, i, R.freq[i], t)) {
        out.insert(ti);
        break;
      }
    }
  }
  return out;
}

std::vector<Tree> saturation_trees(const PhaseData& data, const DyadicInterval& top, const Rat& t,
                                   const TileSet& available) {
  TileSet sat = saturation(data, top, t, available);
  std::array<Tree, 5> trees;
  for (int k = 0; k < 5; ++k) {
    trees[k].type = kAllTypes[k];
    trees[k].top_time = top;
    trees[k].top_t = t;
  }
  std::array<std::map<int, std::vector<int>>, 5> groups;
  for (int ti : sat) {
    bool placed = false;
    for (int k = 0; k < 5 && !placed; ++k) {
      if (tile_qualifies(data, kAllTypes[k], ti, t)) {
        groups[k][data.tiles[ti].rect].push_back(ti);
        placed = true;
      }
    }
    if (!placed) raise(Errc::Internal, "saturation tile fits none of the five trees");
  }
  std::vector<Tree> out;
  for (int k = 0; k < 5; ++k) {
    if (groups[k].empty()) continue;
    for (auto& kv : groups[k]) trees[k].members.emplace_back(kv.first, std::move(kv.second));
    out.push_back(std::move(trees[k]));
  }
  return out;
}

double rect_mass(const PhaseData& data, const CoefTable& coefs, int rect, const TileSet& subset,
                 int j) {
  std::set<TileIx> seen;
  double mass = 0;
  for (int ti : data.rects[rect].tiles) {
    if (!subset.count(ti)) continue;
    const auto& slot = data.tiles[ti].p[j - 1];
    if (seen.insert(slot).second) mass += std::norm(coefs.c[ti][j - 1]);
  }
  return mass;
}

double tree_mass(const PhaseData& data, const CoefTable& coefs, const Tree& tree, int j) {
  double mass = 0;
  for (const auto& m : tree.members) {
    std::set<TileIx> seen;
    for (int ti : m.second) {
      const auto& slot = data.tiles[ti].p[j - 1];
      if (seen.insert(slot).second) mass += std::norm(coefs.c[ti][j - 1]);
    }
  }
  return mass;
}

std::vector<Rat> candidate_line_params(const PhaseData& data, const TileSet& subset) {
  std::vector<Rat> pts;
  std::set<int> rects;
  for (int ti : subset) {
    rects.insert(data.tiles[ti].rect);
    for (int i = 0; i < 3; ++i) {
      RatIv w = two_window(data.geom, i, data.tiles[ti].p[i].freq);
      pts.push_back(w.lo);
      pts.push_back(w.hi);
    }
  }
  for (int ri : rects) {
    for (int i = 0; i < 3; ++i) {
      RatIv w = two_window(data.geom, i, data.rects[ri].freq[i]);
      pts.push_back(w.lo);
      pts.push_back(w.hi);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Rat> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back(pts[i]);
    if (i + 1 < pts.size()) out.push_back((pts[i] + pts[i + 1]) * Rat(1, 2));
  }
  return out;
}

std::vector<DyadicInterval> candidate_tops(const PhaseData& data, const TileSet& subset,
                                           int extra_scales) {
  std::set<std::pair<int, std::int64_t>> seen;
  std::vector<DyadicInterval> out;
  std::set<int> rects;
  int max_scale = -1000;
  for (int ti : subset) rects.insert(data.tiles[ti].rect);
  for (int ri : rects) max_scale = std::max(max_scale, data.rects[ri].time.scale());
  ScaleWindow sw{-40, 40};
  for (int ri : rects) {
    DyadicInterval iv = data.rects[ri].time;
    for (int depth = 0; iv.scale() <= max_scale + extra_scales; ++depth) {
      if (seen.insert({iv.scale(), iv.index()}).second) out.push_back(iv);
      if (iv.scale() >= max_scale + extra_scales) break;
      iv = iv.parent(sw);
    }
  }
  return out;
}

double size_ji(const PhaseData& data, const CoefTable& coefs, const TileSet& subset, int j,
               int i) {
  if (j < 1 || j > 3) raise(Errc::UnsupportedPair, "j must be 1, 2 or 3");
  if (i == 0 && j == 3) i = 3;  // size_{3,0} := size_{3,3}
  if (i < 0 || i > 3) raise(Errc::UnsupportedPair, "i must be 0, 1, 2 or 3");
  if (subset.empty()) return 0.0;

  if (i == j) {
    // Tile size.
    double best = 0;
    std::set<int> rects;
    for (int ti : subset) rects.insert(data.tiles[ti].rect);
    for (int ri : rects) {
      double mass = rect_mass(data, coefs, ri, subset, j);
      best = std::max(best, mass / data.rects[ri].time.length().value());
    }
    return std::sqrt(best);
  }

  std::vector<TreeType> types;
  if (i == 0) {
    if (j == 3) raise(Errc::UnsupportedPair, "size_{3,0} aliases size_{3,3}");
    types = {TreeType::T01, TreeType::T02};
  } else {
    types = {i == 1 ? TreeType::T1 : (i == 2 ? TreeType::T2 : TreeType::T3)};
  }
  auto params = candidate_line_params(data, subset);
  auto tops = candidate_tops(data, subset);
  double best = 0;
  for (const auto& top : tops) {
    double len = top.length().value();
    for (const auto& t : params) {
      for (TreeType ty : types) {
        Tree tree = build_maximal_tree(data, subset, ty, top, t);
        if (tree.members.empty()) continue;
        best = std::max(best, tree_mass(data, coefs, tree, j) / len);
      }
    }
  }
  return std::sqrt(best);
}

std::vector<int> select_m_separated(const std::vector<std::pair<RatIv, RatIv>>& rects,
                                    const Rat& m_sep) {
  std::vector<int> order(rects.size());
  for (std::size_t i = 0; i < rects.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    Rat la = rects[a].first.length(), lb = rects[b].first.length();
    if (!(la == lb)) return lb < la;
    if (!(rects[a].first.lo == rects[b].first.lo)) return rects[a].first.lo < rects[b].first.lo;
    return rects[a].second.lo < rects[b].second.lo;
  });
  std::vector<int> chosen;
  for (int idx : order) {
    RatIv di = rects[idx].first.dilate_center(m_sep);
    bool ok = true;
    for (int c : chosen) {
      RatIv dc = rects[c].first.dilate_center(m_sep);
      if (di.intersects(dc) && rects[idx].second.intersects(rects[c].second)) {
        ok = false;
        break;
      }
    }
    if (ok) chosen.push_back(idx);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

PruneResult prune_tree(const PhaseData& data, const CoefTable& coefs, const Tree& tree, int j,
                       const Rat& m_sep, double lambda, double hyp_factor) {
  double top_len = tree.top_time.length().value();
  double total = 0;
  for (const auto& m : tree.members) {
    const auto& R = data.rects[m.first];
    TileSet sub(m.second.begin(), m.second.end());
    double s2 = rect_mass(data, coefs, m.first, sub, j);
    double cap = hyp_factor * hyp_factor / m_sep.value() * lambda * lambda *
                 R.time.length().value();
    if (s2 > cap * (1 + 1e-12))
      raise(Errc::HypothesisViolated, "(6.14) fails on a member rectangle");
    total += s2;
  }
  if (total < lambda * lambda * top_len / 4 - 1e-12 || total > lambda * lambda * top_len + 1e-12)
    raise(Errc::HypothesisViolated, "(6.15) fails for the tree");

  RatIv inner = tree.top_time.closure().dilate_center(Rat(9, 10));
  PruneResult out;
  out.pruned.type = tree.type;
  out.pruned.top_time = tree.top_time;
  out.pruned.top_t = tree.top_t;
  for (const auto& m : tree.members) {
    const auto& R = data.rects[m.first];
    if (R.time.right() <= inner.lo) continue;                       // T_1: left of (9/10) I_T
    if (inner.hi <= R.time.left()) continue;                        // T_2: right of it
    if (tree.top_time.length() < R.time.length() * Rat(100) * m_sep) continue;  // T_3
    out.pruned.members.push_back(m);
  }
  out.retained_mass = tree_mass(data, coefs, out.pruned, j);
  return out;
}

namespace {

struct Candidate {
  DyadicInterval top = DyadicInterval(Grid::standard(), 0, 0);
  Rat t;
  TreeType type = TreeType::T1;
  Tree tree;
  double mass = 0;
  Rat xi_j;
};

// Lexicographic tie-break: top scale descending, then left endpoint, then t.
bool tie_less(const Candidate& a, const Candidate& b) {
  if (a.top.scale() != b.top.scale()) return a.top.scale() > b.top.scale();
  if (!(a.top.left() == b.top.left())) return a.top.left() < b.top.left();
  return a.t < b.t;
}

}  // namespace

PeelResult peel(const PhaseData& data, const CoefTable& coefs, const TileSet& input, int j, int i,
                double lambda) {
  if (j < 1 || j > 3) raise(Errc::UnsupportedPair, "j must be 1, 2 or 3");
  if (i == 0 && j == 3) i = 3;
  PeelResult res;
  TileSet avail = input;
  const Rat m_sep = data.params.separation();
  const double m_val = m_sep.value();
  long guard = long(input.size()) + 8;
  auto tick = [&]() {
    if (--guard < 0) raise(Errc::NonTerminating, "peel iteration cap reached");
  };

  auto record_selection = [&](const Tree& tree) {
    res.selected.push_back(tree);
    res.top_length_sum += tree.top_time.length().value();
    auto companions = saturation_trees(data, tree.top_time, tree.top_t, avail);
    for (auto& c : companions) res.forest.push_back(c);
    TileSet sat = saturation(data, tree.top_time, tree.top_t, avail);
    for (int ti : sat) avail.erase(ti);
  };

  if (i == j) {
    // Tile-size peeling: singleton j-trees above lambda |I_R|^{1/2}.
    while (true) {
      tick();
      auto params = candidate_line_params(data, avail);
      std::optional<Candidate> best;
      std::set<int> rects;
      for (int ti : avail) rects.insert(data.tiles[ti].rect);
      TreeType ty = (j == 1) ? TreeType::T1 : (j == 2 ? TreeType::T2 : TreeType::T3);
      for (int ri : rects) {
        const auto& R = data.rects[ri];
        for (const auto& t : params) {
          Tree tree = build_maximal_tree(data, avail, ty, R.time, t);
          // Restrict to tiles of this rectangle (singleton tree).
          Tree singl;
          singl.type = ty;
          singl.top_time = R.time;
          singl.top_t = t;
          for (auto& m : tree.members)
            if (m.first == ri) singl.members.push_back(m);
          if (singl.members.empty()) continue;
          double mass = tree_mass(data, coefs, singl, j);
          if (mass < lambda * lambda * R.time.length().value()) continue;
          Candidate cand{R.time, t, ty, singl, mass, t * Rat(data.geom.gdir[j - 1])};
          if (!best || cand.top.length() > best->top.length() ||
              (cand.top.length() == best->top.length() && tie_less(cand, *best)))
            best = cand;
        }
      }
      if (!best) break;
      record_selection(best->tree);
      ++res.sweeps;
    }
    res.residual = avail;
    res.residual_size = size_ji(data, coefs, avail, j, i);
    return res;
  }

  std::vector<TreeType> types;
  if (i == 0)
    types = {TreeType::T01, TreeType::T02};
  else
    types = {i == 1 ? TreeType::T1 : (i == 2 ? TreeType::T2 : TreeType::T3)};

  // Stage 1: eliminate rectangles with a large single-rectangle size.
  double stage1_thresh = data.params.stage1_factor / std::sqrt(m_val) * lambda;
  while (true) {
    tick();
    auto params = candidate_line_params(data, avail);
    std::set<int> rects;
    for (int ti : avail) rects.insert(data.tiles[ti].rect);
    std::optional<Candidate> best;
    for (int ri : rects) {
      const auto& R = data.rects[ri];
      double cap = stage1_thresh * stage1_thresh * R.time.length().value();
      for (const auto& t : params) {
        for (TreeType ty : types) {
          Tree tree = build_maximal_tree(data, avail, ty, R.time, t);
          Tree singl;
          singl.type = ty;
          singl.top_time = R.time;
          singl.top_t = t;
          for (auto& m : tree.members)
            if (m.first == ri) singl.members.push_back(m);
          if (singl.members.empty()) continue;
          double mass = tree_mass(data, coefs, singl, j);
          if (mass <= cap) continue;
          Candidate cand{R.time, t, ty, singl, mass, t * Rat(data.geom.gdir[j - 1])};
          if (!best || cand.top.length() > best->top.length() ||
              (cand.top.length() == best->top.length() && tie_less(cand, *best)))
            best = cand;
        }
      }
    }
    if (!best) break;
    record_selection(best->tree);
    ++res.sweeps;
  }

  // Stage 2: two one-sided sweeps with extremal xi_T^j.
  for (int sweep = 0; sweep < 2; ++sweep) {
    bool upper = (sweep == 0);  // xi^j below every omega_{p_j}, xi^j maximal
    while (true) {
      tick();
      auto params = candidate_line_params(data, avail);
      auto tops = candidate_tops(data, avail);
      Rat gj(data.geom.gdir[j - 1]);
      std::optional<Candidate> best;
      for (const auto& top : tops) {
        double len = top.length().value();
        for (const auto& t : params) {
          Rat xi = t * gj;
          for (TreeType ty : types) {
            auto one_sided = [&](int ti) {
              const auto& w = data.tiles[ti].p[j - 1].freq;
              return upper ? (xi < w.left()) : (w.right() < xi);
            };
            Tree tree = build_maximal_tree(data, avail, ty, top, t, one_sided);
            if (tree.members.empty()) continue;
            double mass = tree_mass(data, coefs, tree, j);
            if (mass < lambda * lambda * len / 8) continue;
            Candidate cand{top, t, ty, tree, mass, xi};
            bool better = false;
            if (!best) {
              better = true;
            } else if (!(cand.xi_j == best->xi_j)) {
              better = upper ? (best->xi_j < cand.xi_j) : (cand.xi_j < best->xi_j);
            } else {
              better = tie_less(cand, *best);
            }
            if (better) best = cand;
          }
        }
      }
      if (!best) break;
      record_selection(best->tree);
      ++res.sweeps;
    }
  }

  res.residual = avail;
  res.residual_size = size_ji(data, coefs, avail, j, i);
  return res;
}

bool strongly_disjoint(const PhaseData& data, const std::vector<Tree>& forest, int j) {
  for (std::size_t a = 0; a < forest.size(); ++a) {
    for (std::size_t b = 0; b < forest.size(); ++b) {
      if (a == b) continue;
      // (1) disjoint rectangle sets.
      std::set<int> ra;
      for (const auto& m : forest[a].members) ra.insert(m.first);
      for (const auto& m : forest[b].members)
        if (ra.count(m.first)) return false;
      // (2) omega_{p_j} strictly inside omega_{p'_j} forces I_{R'} off I_T.
      for (const auto& ma : forest[a].members) {
        for (int ta : ma.second) {
          const auto& wa = data.tiles[ta].p[j - 1].freq;
          for (const auto& mb : forest[b].members) {
            const auto& Rb = data.rects[mb.first];
            for (int tb : mb.second) {
              const auto& wb = data.tiles[tb].p[j - 1].freq;
              bool strict = wb.contains(wa) && !(wb == wa);
              if (strict && forest[a].top_time.intersects(Rb.time)) return false;
            }
          }
        }
      }
    }
  }
  return true;
}

std::vector<SizeLevel> decompose_by_size(const PhaseData& data, const CoefTable& coefs, int j) {
  std::vector<int> ilist = {1, 2, 3};
  if (j != 3) ilist.push_back(0);
  TileSet avail = all_tiles(data);
  double top = 0;
  for (int i : ilist) top = std::max(top, size_ji(data, coefs, avail, j, i));
  std::vector<SizeLevel> out;
  if (top == 0 || avail.empty()) return out;
  int k = int(std::ceil(std::log2(top)));
  int floor_k = k - 48;
  while (!avail.empty() && k >= floor_k) {
    SizeLevel lvl;
    lvl.k = k;
    double lambda = std::ldexp(1.0, k);
    for (int i : ilist) {
      PeelResult pr = peel(data, coefs, avail, j, i, lambda);
      for (auto& t : pr.forest) lvl.forest.push_back(t);
      for (auto& t : pr.selected) lvl.top_length_sum += t.top_time.length().value();
      TileSet removed;
      for (int ti : avail)
        if (!pr.residual.count(ti)) removed.insert(ti);
      for (int ti : removed) lvl.tiles.insert(ti);
      avail = pr.residual;
    }
    double after = 0;
    for (int i : ilist) after = std::max(after, size_ji(data, coefs, avail, j, i));
    lvl.max_size_after = after;
    out.push_back(std::move(lvl));
    --k;
    if (after == 0) {
      if (!avail.empty()) {
        // Zero-coefficient remainder carries no mass; close it out.
        SizeLevel tail;
        tail.k = k;
        tail.tiles = avail;
        out.push_back(std::move(tail));
        avail.clear();
      }
      break;
    }
  }
  if (!avail.empty()) raise(Errc::NonTerminating, "size decomposition did not exhaust the tiles");
  return out;
}

}  // namespace mitf
