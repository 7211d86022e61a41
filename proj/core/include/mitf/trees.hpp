#pragma once

#include <complex>
#include <optional>
#include <set>

#include "mitf/sampled.hpp"
#include "mitf/tiles.hpp"

namespace mitf {

enum class TreeType { T1, T2, T3, T01, T02 };

inline const char* tree_type_name(TreeType t) {
  switch (t) {
    case TreeType::T1: return "1";
    case TreeType::T2: return "2";
    case TreeType::T3: return "3";
    case TreeType::T01: return "0^1";
    case TreeType::T02: return "0^2";
  }
  return "?";
}

struct Tree {
  TreeType type = TreeType::T1;
  DyadicInterval top_time = DyadicInterval(Grid::standard(), 0, 0);
  Rat top_t;  // line parameter: the top frequency point is t * gdir
  // (rect index, tile indices), I_R subset I_T plus the Def 6.1 conditions.
  std::vector<std::pair<int, std::vector<int>>> members;

  std::vector<int> tile_indices() const {
    std::vector<int> out;
    for (const auto& m : members) out.insert(out.end(), m.second.begin(), m.second.end());
    return out;
  }
};

// Packet coefficients <f_j, phi_{p_j}> per tile and slot (slots 0-based).
struct CoefTable {
  std::vector<std::array<cplx, 3>> c;
};

using TileSet = std::set<int>;

TileSet all_tiles(const PhaseData& data);

// --- saturation (6.1) --------------------------------------------------------

// S(I, t gdir): all tiles of rectangles R with I_R subset I and t g_i in
// 2 omega_{R_i} for some i.
TileSet saturation(const PhaseData& data, const DyadicInterval& top, const Rat& t,
                   const TileSet& available);

// The same set organized as the five maximal trees with top (I, t gdir);
// tiles are assigned to the first qualifying type, so the trees partition it.
std::vector<Tree> saturation_trees(const PhaseData& data, const DyadicInterval& top, const Rat& t,
                                   const TileSet& available);

// --- sizes (Defs 6.5 / 6.6) --------------------------------------------------

// size_{j,i} over the subset; j, i are 1-based with i = 0 for the 0-trees and
// size_{3,0} aliased to size_{3,3}. Computed as an exact supremum over the
// finite candidate-top lattice.
double size_ji(const PhaseData& data, const CoefTable& coefs, const TileSet& subset, int j, int i);

// Mass sum_{R in T} sum_{distinct p_j} |<f_j, phi_{p_j}>|^2 of one tree.
double tree_mass(const PhaseData& data, const CoefTable& coefs, const Tree& tree, int j);

// S^j_{R,p*(R)}(f) for one rectangle (distinct slot-j tiles).
double rect_mass(const PhaseData& data, const CoefTable& coefs, int rect, const TileSet& subset,
                 int j);

// Candidate line parameters: endpoints and cell midpoints of all 2 omega
// windows lifted to <gamma>.
std::vector<Rat> candidate_line_params(const PhaseData& data, const TileSet& subset);
// Candidate tops: dyadic ancestors of the member I_R (bounded scale stretch).
std::vector<DyadicInterval> candidate_tops(const PhaseData& data, const TileSet& subset,
                                           int extra_scales = 6);

// --- separation / pruning -----------------------------------------------------

// Greedy selection (Lemma 6.8): subfamily of pairwise disjoint rectangles that
// is M-separated with mass loss at most 3M. Rectangles are (I, omega) pairs.
std::vector<int> select_m_separated(const std::vector<std::pair<RatIv, RatIv>>& rects,
                                    const Rat& m_sep);

struct PruneResult {
  Tree pruned;
  double retained_mass = 0;
};

// Lemma 6.12: removes the edge and large-scale classes; the result is
// M-separated (M I_R inside I_T) and keeps >= lambda^2 |I_T| / 20 of mass.
PruneResult prune_tree(const PhaseData& data, const CoefTable& coefs, const Tree& tree, int j,
                       const Rat& m_sep, double lambda, double hyp_factor = 1e-2);

// --- peeling (Lemma 6.15) ------------------------------------------------------

struct PeelResult {
  std::vector<Tree> forest;      // selected trees plus their saturation companions
  std::vector<Tree> selected;    // the mass-bearing selections only
  TileSet residual;
  double residual_size = 0;      // size-oracle verification of the <= lambda/2 claim
  double top_length_sum = 0;     // sum |I_T| over `selected`
  int sweeps = 0;
};

PeelResult peel(const PhaseData& data, const CoefTable& coefs, const TileSet& input, int j, int i,
                double lambda);

// Def 6.9 over a family of trees (checked exhaustively).
bool strongly_disjoint(const PhaseData& data, const std::vector<Tree>& forest, int j);

// --- level decomposition (Section 6.5) ----------------------------------------

struct SizeLevel {
  int k = 0;                  // size scale 2^k
  std::vector<Tree> forest;   // trees extracted at this level
  TileSet tiles;              // union of their tiles
  double top_length_sum = 0;
  double max_size_after = 0;
};

std::vector<SizeLevel> decompose_by_size(const PhaseData& data, const CoefTable& coefs, int j);

}  // namespace mitf
