#pragma once

#include <functional>
#include <string>

#include "mitf/sampled.hpp"

namespace mitf {

// The canonical compactly supported profile exp(-1/(1-x^2)) on (-1,1) and the
// smooth step A built from its antiderivative (A=0 left of -1, A=1 right of 1).
double bump0(double x);
double smoothstep(double x);

// Phi of (3.1): 1 on |x|<=1, 0 on |x|>=2.
double phi_flat(double x);
// Frequency mask, 1 on |u|<=3, 0 on |u|>=4 (packet band limits 6w -> 8w).
double mask_6_8(double u);
// Frequency mask, 1 on |u|<=3/2, 0 on |u|>=5/2 (sampling kernels, 3w -> 5w).
double mask_3_5(double u);

struct BumpProfile {
  std::string id = "canonical";
  int order = 10;      // adaptation order N
  double p = 2.0;      // L^p normalization; p <= 0 means L^inf
};

// L^p-normalized bump adapted to and supported in [lo, hi), sampled on g.
// Raises ResolutionTooCoarse when the interval has fewer than 16 samples.
SampledFunction bump(double lo, double hi, const BumpProfile& profile, const FunctionGrid& g);

// Same bump with a vanishing integral: the profile is multiplied by a smooth
// odd factor and renormalized. Used where Lemma 4.1's (4.2) route needs a
// mean-zero partner.
SampledFunction bump_mean_zero(double lo, double hi, const BumpProfile& profile,
                               const FunctionGrid& g);

SampledFunction sample(const FunctionGrid& g, const std::function<cplx(double)>& f);

}  // namespace mitf
