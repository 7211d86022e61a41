#include "mitf/paraproduct.hpp"

#include <algorithm>
#include <cmath>

#include "mitf/bump.hpp"

namespace mitf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

cplx unit_phase(double ph) { return cplx(std::cos(ph), std::sin(ph)); }

// Cubic interpolation over regularly indexed samples.
cplx cubic(const std::vector<cplx>& v, double pos) {
  int n = int(v.size());
  int i = int(std::floor(pos));
  if (i < 1 || i > n - 3) {
    if (pos < 0 || pos > n - 1) return cplx(0);
    int j = std::clamp(int(std::lround(pos)), 0, n - 1);
    return v[j];
  }
  double u = pos - i;
  cplx p0 = v[i - 1], p1 = v[i], p2 = v[i + 1], p3 = v[i + 2];
  return p1 + 0.5 * u * (p2 - p0 + u * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                        u * (3.0 * (p1 - p2) + p3 - p0)));
}

}  // namespace

PsiKit::PsiKit(const std::array<double, 3>& beta, const FunctionGrid& grid)
    : grid_(grid), beta_(beta) {
  double a = beta[0] - beta[2], b = beta[1] - beta[2];
  if (std::abs(a - b) < 1e-12) raise(Errc::DegenerateBeta, "beta_1 = beta_2");
  if (grid.nyquist() < 16.0) raise(Errc::ResolutionTooCoarse, "need Nyquist above 16");

  // Generators from their spectra, kept also on a 4x refined grid so cubic
  // interpolation stays near 1e-9.
  for (int i = 0; i < 3; ++i) {
    Spectrum s{grid, std::vector<cplx>(grid.n)};
    for (int k = 0; k < grid.n; ++k) {
      double xi = s.xi_of(k);
      s.c[k] = (i < 2) ? phi_flat(xi) : (phi_flat(xi - 10.0) + phi_flat(xi + 10.0));
    }
    phi_[i] = SampledFunction::from_spectrum(s);
    phi_fine_[i] = phi_[i].refine(4);
  }

  // psi by quadrature in t.
  double t_max = 64.0, dt = 1.0 / 16.0;
  int nt = int(2 * t_max / dt);
  psi_ = SampledFunction(grid);
  for (int i = 0; i < grid.n; ++i) {
    double x = grid.x(i);
    if (std::abs(phi_[2][i].real()) < 1e-16 && std::abs(phi_[2][i].imag()) < 1e-16) continue;
    double acc = 0;
    for (int it = 0; it < nt; ++it) {
      double t = -t_max + (it + 0.5) * dt;
      acc += generator_at(0, x + a * t) * generator_at(1, x + b * t);
    }
    psi_.values()[i] = acc * dt * phi_[2][i].real();
  }

  psi_norm2_ = psi_.norm2();
  if (!(psi_norm2_ > 0)) raise(Errc::Internal, "psi vanished");
  mean_residual_ = std::abs(psi_.integral()) / std::max(psi_.norm1(), 1e-300);

  // Zero-padded spectrum: a 4x finer frequency lattice keeps the cubic
  // interpolation of psi-hat near 1e-8.
  hat_pad_ = 4;
  SampledFunction padded = psi_.extend(grid.a - 1.5 * grid.length(), hat_pad_ * grid.n);
  Spectrum ps = padded.spectrum();
  psi_hat_ = ps.c;

  // Support algebra: the inner factor is band-limited by 2|b-a|/max(|a|,|b|).
  bandw_ = 2.0 * std::abs(b - a) / std::max(std::abs(a), std::abs(b));
  r0_ = 8.0 - bandw_;
  double inside = 0, outside = 0, peak = 0;
  for (int k = 0; k < grid.n; ++k) {
    double xi = ps.xi_of(k);
    double m2 = std::norm(ps.c[k]);
    peak = std::max(peak, m2);
    bool in_band = std::abs(xi) >= 8.0 - bandw_ - 1e-9 && std::abs(xi) <= 12.0 + bandw_ + 1e-9;
    (in_band ? inside : outside) += m2;
  }
  band_leak_ = outside / std::max(inside + outside, 1e-300);

  // Calderon constant, with the xi0-invariance spread.
  auto c_at = [&](double xi0) {
    double du = 1.0 / 512.0;
    double acc = 0;
    for (double u = -8.0; u <= 8.0; u += du) {
      double xi = xi0 * std::exp(u);
      if (std::abs(xi) >= grid.nyquist()) continue;
      double pos = xi * grid.length() + grid.n / 2;
      acc += std::norm(cubic(psi_hat_, pos)) * du;
    }
    return acc;
  };
  double c10 = c_at(10.0);
  if (!(c10 > 0)) raise(Errc::Internal, "Calderon integral vanished");
  calderon_c_ = 1.0 / c10;
  double spread = 0;
  for (double xi0 : {9.0, 11.0, -10.0}) spread = std::max(spread, std::abs(c_at(xi0) - c10) / c10);
  calderon_spread_ = spread;
}

cplx PsiKit::psi_hat(double xi) const {
  double pos = xi * grid_.length() * hat_pad_ + (grid_.n * hat_pad_) / 2;
  return cubic(psi_hat_, pos);
}

double PsiKit::generator_at(int i, double x) const {
  const auto& f = phi_fine_[i];
  double pos = (x - f.grid().a) / f.grid().h;
  return cubic(f.values(), pos).real();
}

ParaproductSymbol calderon_coeffs(const PsiKit& kit, const SampledFunction& b, int kappa,
                                  double dk, double dn) {
  if (!(b.grid() == kit.grid())) raise(Errc::ConfigInvalid, "symbol grid mismatch");
  const auto& g = kit.grid();
  ParaproductSymbol sym;
  sym.b = b;
  sym.kappa = kappa;
  sym.dk = dk;
  sym.dn = dn;
  Spectrum B = b.spectrum();
  double cc = kit.calderon_constant();

  std::vector<CarlesonEntry> raw;
  double peak = 0;
  for (double k = -kappa; k <= kappa + 1e-12; k += dk) {
    double scale = std::ldexp(1.0, 0) * std::pow(2.0, k);
    // v_m = B_m 2^{k/2} conj(psi-hat(2^k xi_m)); coefficient(n) is its inverse
    // transform at x = 2^k n.
    Spectrum V{g, std::vector<cplx>(g.n, cplx(0))};
    bool any = false;
    for (int m = 0; m < g.n; ++m) {
      double xi = V.xi_of(m);
      cplx ph = kit.psi_hat(scale * xi);
      if (ph == cplx(0)) continue;
      V.c[m] = B.c[m] * std::sqrt(scale) * std::conj(ph);
      any = any || (V.c[m] != cplx(0));
    }
    if (!any) continue;
    SampledFunction u = SampledFunction::from_spectrum(V);
    double n_lo = g.a / scale, n_hi = g.b() / scale;
    for (double n = std::ceil(n_lo / dn) * dn; n <= n_hi; n += dn) {
      double x = scale * n;
      double pos = (x - g.a) / g.h;
      cplx val = cubic(u.values(), pos);
      if (val == cplx(0)) continue;
      raw.push_back({k, n, cc * val});
      peak = std::max(peak, std::abs(cc * val));
    }
  }
  for (const auto& e : raw)
    if (std::abs(e.c) > sym.coef_floor * peak) sym.coef.push_back(e);
  return sym;
}

cplx reconstruction_pairing(const PsiKit& kit, const ParaproductSymbol& sym,
                            const SampledFunction& test) {
  const auto& g = kit.grid();
  Spectrum acc{g, std::vector<cplx>(g.n, cplx(0))};
  // Group entries by k and accumulate sum_n c_{k,n} psi_{k,n} spectrally.
  std::map<double, std::vector<const CarlesonEntry*>> by_k;
  for (const auto& e : sym.coef) by_k[e.k].push_back(&e);
  for (const auto& kv : by_k) {
    double scale = std::pow(2.0, kv.first);
    for (int m = 0; m < g.n; ++m) {
      double xi = acc.xi_of(m);
      cplx ph = kit.psi_hat(scale * xi);
      if (ph == cplx(0)) continue;
      cplx comb = 0;
      for (const auto* e : kv.second) comb += e->c * unit_phase(-kTwoPi * xi * scale * e->n);
      acc.c[m] += std::sqrt(scale) * ph * comb;
    }
  }
  for (auto& z : acc.c) z *= sym.dk * sym.dn;
  // <reconstruction, test> by Parseval.
  Spectrum T = test.spectrum();
  cplx s = 0;
  for (int m = 0; m < g.n; ++m) s += acc.c[m] * std::conj(T.c[m]);
  return s / g.length();
}

cplx line_integral(const FormGeometry& geom, const SampledFunction& h1, const SampledFunction& h2,
                   const SampledFunction& h3, double* tail_estimate) {
  // Operands are zero-padded so the frequency lattice is 4x finer than the
  // base window; the cubic interpolation error drops below 1e-7.
  const FunctionGrid& base = h1.grid();
  double pad_a = base.a - 1.5 * base.length();
  int pad_n = 4 * base.n;
  Spectrum H[3] = {h1.extend(pad_a, pad_n).spectrum(), h2.extend(pad_a, pad_n).spectrum(),
                   h3.extend(pad_a, pad_n).spectrum()};
  FunctionGrid g{pad_a, pad_n, base.h};
  double gmax = 0;
  for (int i = 0; i < 3; ++i) gmax = std::max(gmax, std::abs(double(geom.gdir[i])));
  // s-range where every lifted band can be nonzero.
  double nyq = g.nyquist();
  double s_cap = nyq / gmax;
  double ds = 1.0 / (6.0 * g.length() * gmax);
  cplx acc = 0;
  double peak = 0, edge = 0;
  int steps = int(2 * s_cap / ds);
  for (int q = 0; q < steps; ++q) {
    double s = -s_cap + (q + 0.5) * ds;
    cplx prod = 1;
    bool zero = false;
    for (int i = 0; i < 3 && !zero; ++i) {
      double xi = s * double(geom.gdir[i]);
      double pos = xi * g.length() + g.n / 2;
      cplx v = cubic(H[i].c, pos);
      if (v == cplx(0)) zero = true;
      prod *= v;
    }
    if (zero) continue;
    acc += prod * ds;
    double mag = std::abs(prod);
    peak = std::max(peak, mag);
    if (q < 8 || q > steps - 9) edge = std::max(edge, mag);
  }
  if (tail_estimate) *tail_estimate = (peak > 0) ? edge / peak : 0.0;
  return acc;
}

ParaproductForm::ParaproductForm(std::shared_ptr<PsiKit> kit, ParaproductSymbol sym,
                                 double tail_tol)
    : TrilinearForm(FormGeometry::from_beta_int(std::llround(kit->beta()[0]),
                                                std::llround(kit->beta()[1]),
                                                std::llround(kit->beta()[2])),
                    1.0, 1.0),
      kit_(std::move(kit)), sym_(std::move(sym)), tail_tol_(tail_tol) {}

FormEvalResult ParaproductForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                         const SampledFunction& f3) const {
  const auto& g = kit_->grid();
  if (!(f1.grid() == g) || !(f2.grid() == g) || !(f3.grid() == g))
    raise(Errc::ConfigInvalid, "paraproduct operands must live on the kit grid");
  cplx acc = 0;
  double worst_tail = 0;
  const SampledFunction* fs[3] = {&f1, &f2, &f3};
  for (const auto& e : sym_.coef) {
    double scale = std::pow(2.0, e.k);
    double amp = 1.0 / std::sqrt(scale);
    SampledFunction h[3] = {SampledFunction(g), SampledFunction(g), SampledFunction(g)};
    for (int i = 0; i < 3; ++i) {
      for (int q = 0; q < g.n; ++q) {
        double x = g.x(q);
        double w = kit_->generator_at(i, x / scale - e.n);
        if (w != 0.0) h[i].values()[q] = (*fs[i])[q] * (amp * w);
      }
    }
    double tail = 0;
    cplx j = line_integral(geom_, h[0], h[1], h[2], &tail);
    worst_tail = std::max(worst_tail, tail);
    acc += e.c * j;
  }
  if (worst_tail > tail_tol_)
    raise(Errc::TailTooLarge, "line-integral truncation tail " + std::to_string(worst_tail));
  return {acc * sym_.dk * sym_.dn, worst_tail};
}

double carleson_ratio(const std::vector<CarlesonEntry>& coef, const std::vector<Iv>& windows,
                      double dk, double dn) {
  double best = 0;
  for (const auto& w : windows) {
    double s = 0;
    for (const auto& e : coef) {
      double len = std::pow(2.0, e.k);
      double lo = len * e.n, hi = len * (e.n + 1);
      if (lo >= w.lo - 1e-12 && hi <= w.hi + 1e-12) s += std::norm(e.c) * dk * dn;
    }
    best = std::max(best, s / w.len());
  }
  return best;
}

std::vector<CarlesonEntry> counterexample_coefficients(int scales) {
  if (scales < 2) raise(Errc::ConfigInvalid, "need at least two scales");
  std::vector<CarlesonEntry> out;
  for (int s = 0; s < scales; ++s) {
    double len = std::ldexp(1.0, s);
    std::int64_t count = std::int64_t(1) << (scales - s);
    for (std::int64_t n = 0; n < count; ++n)
      out.push_back({double(s), double(n), cplx(std::sqrt(len), 0.0)});
  }
  return out;
}

CounterexampleForm::CounterexampleForm(std::shared_ptr<PsiKit> kit,
                                       std::vector<CarlesonEntry> coef)
    : TrilinearForm(FormGeometry::from_beta_int(std::llround(kit->beta()[0]),
                                                std::llround(kit->beta()[1]),
                                                std::llround(kit->beta()[2])),
                    1.0, 1.0),
      kit_(std::move(kit)), coef_(std::move(coef)) {}

FormEvalResult CounterexampleForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                            const SampledFunction& f3) const {
  ParaproductSymbol sym;
  sym.coef = coef_;
  sym.dk = 1.0;
  sym.dn = 1.0;
  ParaproductForm form(kit_, sym, 1.0);
  return form.evaluate(f1, f2, f3);
}

}  // namespace mitf
