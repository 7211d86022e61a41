#pragma once

#include <cstdint>
#include <random>

#include "mitf/trees.hpp"
#include "mitf/wavepacket.hpp"

namespace mitf {

// Packet coefficients <f_j, phi_{p_j}> for every tile of the family, computed
// spectrally on the factory grid.
CoefTable compute_coefficients(const PhaseData& data, const WavePacketFactory& factory,
                               const SampledFunction& f1, const SampledFunction& f2,
                               const SampledFunction& f3);

// The (5.15) model sum A^{-delta'} sum_R sum_{p in p(R)} |I_R|^{-1}
// |I_{p_3}|^{1/2} prod_i |<f_i, phi_{p_i}>|.
double model_sum(const PhaseData& data, const CoefTable& coefs);
double model_sum_subset(const PhaseData& data, const CoefTable& coefs, const TileSet& subset);

// Right side of the tree estimate (6.2) for a forest partition.
double tree_estimate_rhs(const PhaseData& data, const CoefTable& coefs,
                         const std::vector<Tree>& forest);

// --- synthetic families --------------------------------------------------------

struct SynthOptions {
  int n_scales = 3;
  int scale_step = 2;          // |I_R| ratio between consecutive scales (log2)
  int rects_per_scale = 6;
  int tiles_per_rect = 3;
  int base_scale = 0;          // log2 |I_R| of the largest rectangles
  Rat anchor_t = Rat(21, 2);   // line parameter the frequency stacks accumulate at
  double spread = 12.0;        // spatial spread of rectangle positions (units of |I_R|)
};

// Multi-rectangle family with the structural invariants of Section 5
// (omega_{R_3} = omega_{p_3}, |I_p||omega_p| = 1, frequency boxes stacked
// lacunarily around the anchor line point) for exercising the Section 6
// combinatorics on several scales.
PhaseData synth_family(const ModelParams& params, const SynthOptions& opt, std::mt19937_64& rng);

// Synthetic coefficient tables (for combinatorial tests that need no packets).
CoefTable random_coefficients(const PhaseData& data, std::mt19937_64& rng, double amp = 1.0);

// --- restricted type (Def 5.4 / Thm 5.5 / Section 6.5) --------------------------

struct SetE {
  std::vector<Iv> pieces;  // disjoint, sorted
  double measure() const {
    double s = 0;
    for (const auto& p : pieces) s += p.len();
    return s;
  }
};

// Exact Hardy-Littlewood maximal function of the indicator at x (the
// maximizing interval endpoints sit on piece boundaries).
double maximal_indicator(const SetE& e, double x);

// X_2(E) test field: |f| <= |E|^{-1/2} 1_E, randomized phases/modulations.
SampledFunction x2_test_function(const SetE& e, const FunctionGrid& g, std::mt19937_64& rng);

// Bessel counting experiment (Lemma 6.10): greedy family of rectangles with
// pairwise disjoint j-rectangles and S^j_R(f) >= lambda |I_R|^{1/2}.
struct BesselSample {
  double lambda = 0;
  double mass_sum = 0;      // sum |I_R| over the selected family
  double ratio = 0;         // mass_sum lambda^2 / ||f||_2^2
  std::size_t count = 0;
};

BesselSample bessel_sample(const PhaseData& data, const CoefTable& coefs, int j, double lambda,
                           double f_norm2);

struct RestrictedTypeResult {
  SetE major_subset;
  double major_fraction = 0;    // |E~|/|E_{j0}|
  double bound = 0;             // max |Lambda| / prod |E_j|^{alpha_j}
  double area_rel = 1;          // 2^{kappa+m}
  std::vector<double> per_function;   // one value per test function tuple
  double level_combination = 0;       // (6.33)-style summation over levels
};

RestrictedTypeResult restricted_type(const PhaseData& data, const WavePacketFactory& factory,
                                     const std::array<SetE, 3>& sets,
                                     const std::array<double, 3>& alpha, int j0, int n_tests,
                                     std::uint64_t seed);

}  // namespace mitf
