#include "mitf/bump.hpp"

#include <cmath>
#include <vector>

namespace mitf {

double bump0(double x) {
  double t = 1.0 - x * x;
  if (t <= 0) return 0.0;
  return std::exp(-1.0 / t);
}

namespace {

// Cumulative trapezoid table of bump0 on [-1, 1]; trapezoid is superconvergent
// here since all derivatives vanish at the endpoints.
struct StepTable {
  static constexpr int kN = 1 << 17;
  std::vector<double> cum;
  double total;

  StepTable() : cum(kN + 1, 0.0) {
    double h = 2.0 / kN;
    double prev = bump0(-1.0);
    for (int i = 1; i <= kN; ++i) {
      double cur = bump0(-1.0 + i * h);
      cum[i] = cum[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
    total = cum[kN];
  }

  // Catmull-Rom interpolation keeps the interpolation error near 1e-17 so
  // spectral masks do not inject a noise floor into packet tails.
  double eval(double x) const {
    if (x <= -1.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double t = (x + 1.0) / 2.0 * kN;
    int i = int(t);
    if (i < 1) i = 1;
    if (i > kN - 3) i = kN - 3;
    double u = t - i;
    double p0 = cum[i - 1], p1 = cum[i], p2 = cum[i + 1], p3 = cum[i + 2];
    double v = p1 + 0.5 * u * (p2 - p0 + u * (2 * p0 - 5 * p1 + 4 * p2 - p3 +
                                               u * (3 * (p1 - p2) + p3 - p0)));
    return v / total;
  }
};

const StepTable& step_table() {
  static StepTable t;
  return t;
}

double profile_norm_const(double p) {
  // c_p with || c_p bump0(2u) ||_p = 1 over u in (-1/2, 1/2).
  if (p <= 0) return std::exp(1.0);  // sup bump0 = e^{-1}
  static constexpr int kN = 1 << 14;
  double h = 1.0 / kN;
  double s = 0;
  for (int i = 0; i < kN; ++i) {
    double u = -0.5 + (i + 0.5) * h;
    s += std::pow(bump0(2 * u), p);
  }
  return std::pow(s * h, -1.0 / p);
}

double cached_norm_const(double p) {
  static const double c1 = profile_norm_const(1.0);
  static const double c2 = profile_norm_const(2.0);
  if (p == 1.0) return c1;
  if (p == 2.0) return c2;
  return profile_norm_const(p);
}

}  // namespace

double smoothstep(double x) { return step_table().eval(x); }

double phi_flat(double x) { return smoothstep(3.0 - 2.0 * std::abs(x)); }

double mask_6_8(double u) { return smoothstep(7.0 - 2.0 * std::abs(u)); }

double mask_3_5(double u) { return smoothstep(4.0 - 2.0 * std::abs(u)); }

namespace {

// Profile shape at unit scale on u in (-1/2, 1/2) (chi has algebraic tails).
double profile_shape(const BumpProfile& p, double u) {
  if (p.id == "chi") return std::pow(1.0 + 4.0 * u * u, -0.5 * p.order);
  return bump0(2 * u);
}

double shape_norm_const(const BumpProfile& prof) {
  if (prof.id != "chi") return cached_norm_const(prof.p);
  // Quadrature over the slow tails.
  if (prof.p <= 0) return 1.0;
  static constexpr int kN = 1 << 16;
  double h = 512.0 / kN;
  double s = 0;
  for (int i = 0; i < kN; ++i) {
    double u = -256.0 + (i + 0.5) * h;
    s += std::pow(profile_shape(prof, u), prof.p);
  }
  return std::pow(s * h, -1.0 / prof.p);
}

}  // namespace

SampledFunction bump(double lo, double hi, const BumpProfile& profile, const FunctionGrid& g) {
  double len = hi - lo;
  if (!(len > 0)) raise(Errc::ConfigInvalid, "empty bump interval");
  if (len / g.h < 16) raise(Errc::ResolutionTooCoarse, "fewer than 16 samples per |I|");
  double c = 0.5 * (lo + hi);
  double amp = (profile.p > 0 ? std::pow(len, -1.0 / profile.p) : 1.0) * shape_norm_const(profile);
  return sample(g, [&](double x) -> cplx {
    double u = (x - c) / len;
    return amp * profile_shape(profile, u);
  });
}

SampledFunction bump_mean_zero(double lo, double hi, const BumpProfile& profile,
                               const FunctionGrid& g) {
  double len = hi - lo;
  if (!(len > 0)) raise(Errc::ConfigInvalid, "empty bump interval");
  if (len / g.h < 16) raise(Errc::ResolutionTooCoarse, "fewer than 16 samples per |I|");
  double c = 0.5 * (lo + hi);
  auto f = sample(g, [&](double x) -> cplx {
    double u = (x - c) / len;
    return u * profile_shape(profile, u);
  });
  if (profile.p <= 0) {
    double mx = 0;
    for (const auto& z : f.values()) mx = std::max(mx, std::abs(z));
    for (auto& z : f.values()) z /= mx;
    return f;
  }
  double s = 0;
  for (const auto& z : f.values()) s += std::pow(std::abs(z), profile.p);
  double np = std::pow(s * g.h, 1.0 / profile.p);
  for (auto& z : f.values()) z /= np;
  return f;
}

SampledFunction sample(const FunctionGrid& g, const std::function<cplx(double)>& f) {
  SampledFunction out(g);
  for (int i = 0; i < g.n; ++i) out.values()[i] = f(g.x(i));
  return out;
}

}  // namespace mitf
