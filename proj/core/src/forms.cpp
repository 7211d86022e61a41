#include "mitf/forms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mitf/bump.hpp"

namespace mitf {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

cplx unit_phase(double ph) { return cplx(std::cos(ph), std::sin(ph)); }

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGLx[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                            0.9602898564975363};
constexpr double kGLw[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                            0.1012285362903763};

struct Band {
  int lo = 0, hi = -1;  // inclusive slot range with non-negligible mass
};

Band band_of(const Spectrum& s, double rel_tol = 3e-14) {
  double mx = 0;
  for (const auto& z : s.c) mx = std::max(mx, std::abs(z));
  Band b;
  if (mx == 0) return b;
  double thr = rel_tol * mx;
  int n = int(s.c.size());
  b.lo = 0;
  while (b.lo < n && std::abs(s.c[b.lo]) <= thr) ++b.lo;
  b.hi = n - 1;
  while (b.hi >= 0 && std::abs(s.c[b.hi]) <= thr) --b.hi;
  return b;
}

struct Support {
  double lo = 0, hi = 0;
  bool empty = true;
  double len() const { return hi - lo; }
};

Support support_of(const SampledFunction& f, double rel_tol = 1e-14) {
  double mx = 0;
  for (const auto& z : f.values()) mx = std::max(mx, std::abs(z));
  Support s;
  if (mx == 0) return s;
  double thr = rel_tol * mx;
  int n = f.grid().n;
  int i0 = 0, i1 = n - 1;
  while (i0 < n && std::abs(f[i0]) <= thr) ++i0;
  while (i1 >= 0 && std::abs(f[i1]) <= thr) --i1;
  s.empty = false;
  s.lo = f.grid().x(i0);
  s.hi = f.grid().x(i1) + f.grid().h;
  return s;
}

void require_common_grid(const SampledFunction& a, const SampledFunction& b) {
  if (!(a.grid() == b.grid())) raise(Errc::ConfigInvalid, "functions must share one grid");
}

// Shift f by v in space: (tau_v f) on the same window, exact for the periodic
// trigonometric interpolant.
std::vector<cplx> spectral_shift(const Spectrum& F, double v) {
  const int n = F.grid.n;
  Spectrum s{F.grid, std::vector<cplx>(n)};
  for (int k = 0; k < n; ++k) s.c[k] = F.c[k] * unit_phase(-kTwoPi * F.xi_of(k) * v);
  return SampledFunction::from_spectrum(s).values();
}

double band_ximax(const Spectrum& F) {
  Band b = band_of(F);
  if (b.hi < b.lo) return 0.0;
  int n = F.grid.n;
  return std::max(std::abs(F.grid.xi(b.lo - n / 2)), std::abs(F.grid.xi(b.hi - n / 2)));
}

// u -> f(u + c t) via spectral shift, zeroed outside the true shifted support
// so the periodic wrap cannot leak back into the window.
struct ShiftedSlot {
  Spectrum F;
  Support sup;
  double c = 0;

  std::vector<cplx> at(double t) const {
    auto vals = spectral_shift(F, -c * t);
    const auto& g = F.grid;
    double lo = sup.lo - c * t, hi = sup.hi - c * t;
    int i0 = std::max(0, int(std::ceil((lo - g.a) / g.h)) - 1);
    int i1 = std::min(g.n - 1, int(std::floor((hi - g.a) / g.h)) + 1);
    for (int i = 0; i < std::min(i0, g.n); ++i) vals[i] = 0;
    for (int i = std::max(i1 + 1, 0); i < g.n; ++i) vals[i] = 0;
    return vals;
  }
};

struct ShellSum {
  cplx value{0, 0};
  double error = 0;
};

// Symmetric dyadic shells with principal-value pairing and Richardson
// extrapolation of the inner cutoff (geometric tail fit on the innermost
// increments). Each shell is split into panels sized to the integrand's
// oscillation rate.
ShellSum shell_integrate(const std::function<cplx(double)>& x_integral_at_t, double t_max,
                         const ShellOptions& opt, bool pv_needed, double osc_freq = 0.0) {
  int l_hi = int(std::ceil(std::log2(std::max(t_max, 1e-12))));
  l_hi = std::min(l_hi, opt.outer_levels);
  int l_lo = -opt.inner_levels;
  ShellSum out;
  std::vector<cplx> inner_inc;
  double scale = 0;
  for (int l = l_hi - 1; l >= l_lo; --l) {
    double a = std::pow(2.0, l), b = std::pow(2.0, l + 1);
    int panels = opt.min_panels;
    if (osc_freq > 0)
      panels = std::max(panels, std::min(opt.max_panels, int(std::ceil((b - a) * osc_freq))));
    cplx inc = 0;
    for (int pan = 0; pan < panels; ++pan) {
      double pa = a + (b - a) * pan / panels, pb = a + (b - a) * (pan + 1) / panels;
      double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (int q = 0; q < 4; ++q) {
        for (int sgn_node = -1; sgn_node <= 1; sgn_node += 2) {
          double t = mid + sgn_node * half * kGLx[q];
          double w = half * kGLw[q];
          inc += w * (x_integral_at_t(t) + x_integral_at_t(-t));
        }
      }
    }
    out.value += inc;
    scale = std::max(scale, std::abs(out.value));
    if (l < l_lo + 4) inner_inc.push_back(inc);
  }
  if (inner_inc.size() >= 2) {
    cplx prev = inner_inc[inner_inc.size() - 2];
    cplx last = inner_inc.back();
    double floor_ = 1e-14 * std::max(scale, 1e-300);
    if (std::abs(last) > floor_) {
      if (pv_needed && std::abs(last) > opt.cauchy_tol * std::max(scale, 1e-300) &&
          std::abs(last) > std::abs(prev))
        raise(Errc::PVNonconvergent, "inner shell increments do not decay");
      cplx rho = (std::abs(prev) > 0) ? last / prev : cplx(0);
      if (std::abs(rho) < 0.9) {
        cplx tail = last * rho / (1.0 - rho);
        out.value += tail;
        out.error = 0.5 * std::abs(tail) + 1e-15 * scale;
      } else {
        out.error = std::abs(last);
      }
    }
  }
  return out;
}

}  // namespace

FormGeometry FormGeometry::from_beta_int(std::int64_t b1, std::int64_t b2, std::int64_t b3) {
  if (b1 == b2 || b2 == b3 || b1 == b3) raise(Errc::DegenerateBeta, "beta entries must be distinct");
  std::int64_t g1 = b2 - b3, g2 = b3 - b1, g3 = b1 - b2;
  std::int64_t g = std::gcd(std::gcd(std::abs(g1), std::abs(g2)), std::abs(g3));
  g1 /= g;
  g2 /= g;
  g3 /= g;
  if (g1 < 0 || (g1 == 0 && g2 < 0)) {
    g1 = -g1;
    g2 = -g2;
    g3 = -g3;
  }
  FormGeometry geo;
  geo.beta = {double(b1), double(b2), double(b3)};
  geo.gdir = {g1, g2, g3};
  return geo;
}

std::array<double, 3> FormGeometry::gamma_unit() const {
  double n = std::sqrt(double(gdir[0] * gdir[0] + gdir[1] * gdir[1] + gdir[2] * gdir[2]));
  return {gdir[0] / n, gdir[1] / n, gdir[2] / n};
}

// --- MultiplierForm ----------------------------------------------------------

MultiplierForm::MultiplierForm(FormGeometry g, std::function<cplx(double)> m, double delta,
                               double c_k, std::function<cplx(double)> kernel_t, std::string name)
    : TrilinearForm(g, delta, c_k), m_(std::move(m)), kernel_t_(std::move(kernel_t)),
      name_(std::move(name)) {}

std::shared_ptr<MultiplierForm> MultiplierForm::bht() {
  auto m = [](double u) -> cplx { return u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0); };
  // sign(u) = K^ with K(t) = i/(pi t).
  auto ker = [](double t) -> cplx { return cplx(0.0, 1.0 / (kPi * t)); };
  return std::make_shared<MultiplierForm>(FormGeometry::from_beta_int(-1, 1, 0), m, 1.0,
                                          1.0 / kPi, ker, "bht");
}

FormEvalResult MultiplierForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                        const SampledFunction& f3) const {
  require_common_grid(f1, f2);
  require_common_grid(f1, f3);
  const auto& g = f1.grid();
  const double L = g.length();
  Spectrum F1 = f1.spectrum(), F2 = f2.spectrum(), F3 = f3.spectrum();
  Band b1 = band_of(F1), b2 = band_of(F2), b3 = band_of(F3);
  cplx acc = 0;
  const int n = g.n;
  for (int k1 = b1.lo; k1 <= b1.hi; ++k1) {
    if (F1.c[k1] == cplx(0)) continue;
    int m1 = k1 - n / 2;
    for (int k2 = b2.lo; k2 <= b2.hi; ++k2) {
      int m2 = k2 - n / 2;
      int m3 = -m1 - m2;
      int k3 = m3 + n / 2;
      if (k3 < b3.lo || k3 > b3.hi) continue;
      cplx w = m_((m1 - m2) / L);
      if (w == cplx(0)) continue;
      acc += w * F1.c[k1] * F2.c[k2] * F3.c[k3];
    }
  }
  return {acc / (L * L), 0.0};
}

std::function<cplx(double, double)> MultiplierForm::kernel_complex() const {
  if (!kernel_t_) return nullptr;
  auto k = kernel_t_;
  return [k](double, double t) { return k(t); };
}

// --- SymbolForm --------------------------------------------------------------

SymbolForm::SymbolForm(FormGeometry g, std::function<cplx(double, double)> sigma, double delta,
                       double c_k, std::function<double(double, double)> kernel_xt,
                       std::string name)
    : TrilinearForm(g, delta, c_k), sigma_(std::move(sigma)), kernel_xt_(std::move(kernel_xt)),
      name_(std::move(name)) {}

SampledFunction SymbolForm::apply_t3(const SampledFunction& f1, const SampledFunction& f2) const {
  require_common_grid(f1, f2);
  const auto& g = f1.grid();
  const int n = g.n;
  const double L = g.length();
  Spectrum F1 = f1.spectrum(), F2 = f2.spectrum();
  Band b1 = band_of(F1), b2 = band_of(F2);
  SampledFunction out(g);
  if (b1.hi < b1.lo || b2.hi < b2.lo) return out;
  // Aliasing check: sum frequencies must stay below Nyquist.
  int s_min = (b1.lo - n / 2) + (b2.lo - n / 2);
  int s_max = (b1.hi - n / 2) + (b2.hi - n / 2);
  if (s_min < -n / 2 || s_max >= n / 2)
    raise(Errc::AliasingError, "combined bandwidth exceeds the grid Nyquist");

  std::vector<cplx> acc(n, cplx(0));
  for (int d = (b1.lo - b2.hi); d <= (b1.hi - b2.lo); ++d) {
    Spectrum S{g, std::vector<cplx>(n, cplx(0))};
    bool nonzero = false;
    for (int k1 = std::max(b1.lo, b2.lo + d); k1 <= std::min(b1.hi, b2.hi + d); ++k1) {
      int k2 = k1 - d;
      cplx p = F1.c[k1] * F2.c[k2];
      if (p == cplx(0)) continue;
      int s_slot = (k1 - n / 2) + (k2 - n / 2) + n / 2;
      S.c[s_slot] += p / L;
      nonzero = true;
    }
    if (!nonzero) continue;
    SampledFunction hd = SampledFunction::from_spectrum(S);
    double u = d / L;
    for (int i = 0; i < n; ++i) acc[i] += sigma_(g.x(i), u) * hd[i];
  }
  out.values() = std::move(acc);
  return out;
}

FormEvalResult SymbolForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                    const SampledFunction& f3) const {
  require_common_grid(f1, f3);
  SampledFunction t = apply_t3(f1, f2);
  cplx s = 0;
  for (int i = 0; i < t.grid().n; ++i) s += t[i] * f3[i];
  return {t.grid().h * s, 0.0};
}

// --- KernelForm --------------------------------------------------------------

KernelForm::KernelForm(FormGeometry g, std::function<double(double, double)> k, double delta,
                       double c_k, ShellOptions opt, std::string name)
    : TrilinearForm(g, delta, c_k), k_(std::move(k)), opt_(opt), name_(std::move(name)) {}

FormEvalResult KernelForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                    const SampledFunction& f3) const {
  require_common_grid(f1, f2);
  require_common_grid(f1, f3);
  const SampledFunction* fs[3] = {&f1, &f2, &f3};
  Support sup[3];
  for (int i = 0; i < 3; ++i) {
    sup[i] = support_of(*fs[i]);
    if (sup[i].empty) return {cplx(0), 0.0};
  }
  int piv = 0;
  for (int i = 1; i < 3; ++i)
    if (sup[i].len() < sup[piv].len()) piv = i;

  const auto& g = f1.grid();
  const double bp = geom_.beta[piv];
  double t_max = 0;
  bool overlap3 = true;
  {
    double lo = std::max({sup[0].lo, sup[1].lo, sup[2].lo});
    double hi = std::min({sup[0].hi, sup[1].hi, sup[2].hi});
    overlap3 = lo < hi;
  }
  ShiftedSlot slot[3];
  double osc = 0;
  double t_min_reach = 1e300;
  for (int i = 0; i < 3; ++i) {
    if (i == piv) continue;
    slot[i].F = fs[i]->spectrum();
    slot[i].sup = sup[i];
    slot[i].c = geom_.beta[i] - bp;
    double reach = (sup[i].len() + sup[piv].len() + std::abs((sup[i].lo + sup[i].hi) / 2 -
                                                             (sup[piv].lo + sup[piv].hi) / 2));
    t_min_reach = std::min(t_min_reach, reach / std::abs(slot[i].c));
    osc += std::abs(slot[i].c) * band_ximax(slot[i].F);
  }
  // Beyond the smallest reach one factor is identically zero.
  t_max = t_min_reach;

  int i0 = int((sup[piv].lo - g.a) / g.h);
  int i1 = std::min(g.n - 1, int((sup[piv].hi - g.a) / g.h) + 1);
  auto kern = k_;
  auto x_int = [&](double t) -> cplx {
    for (int i = 0; i < 3; ++i) {
      if (i == piv) continue;
      double lo = slot[i].sup.lo - slot[i].c * t, hi = slot[i].sup.hi - slot[i].c * t;
      if (hi <= sup[piv].lo || lo >= sup[piv].hi) return cplx(0);
    }
    std::vector<cplx> sh[3];
    for (int i = 0; i < 3; ++i)
      if (i != piv) sh[i] = slot[i].at(t);
    cplx s = 0;
    for (int idx = std::max(0, i0); idx <= i1; ++idx) {
      double u = g.x(idx);
      cplx prod = (*fs[piv])[idx];
      for (int i = 0; i < 3; ++i)
        if (i != piv) prod *= sh[i][idx];
      if (prod != cplx(0)) s += prod * kern(u - bp * t, t);
    }
    return g.h * s;
  };

  ShellSum sum = shell_integrate(x_int, t_max, opt_, overlap3 && opt_.principal_value, osc);
  return {sum.value, sum.error};
}

FormEvalResult CoifmanMeyerForm::evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                          const SampledFunction& f3) const {
  require_common_grid(f1, f2);
  require_common_grid(f1, f3);
  const auto& g = f1.grid();
  const int n = g.n;
  const double L = g.length();
  Spectrum F1 = f1.spectrum(), F2 = f2.spectrum();
  Band b1 = band_of(F1), b2 = band_of(F2);
  cplx acc = 0;
  for (const auto& term : terms_) {
    auto af3 = f3;
    for (int i = 0; i < n; ++i) af3.values()[i] *= term.a(g.x(i));
    Spectrum G = af3.spectrum();
    for (int k1 = b1.lo; k1 <= b1.hi; ++k1) {
      if (F1.c[k1] == cplx(0)) continue;
      double xi = g.xi(k1 - n / 2);
      for (int k2 = b2.lo; k2 <= b2.hi; ++k2) {
        if (F2.c[k2] == cplx(0)) continue;
        int k3 = -(k1 - n / 2) - (k2 - n / 2) + n / 2;
        if (k3 < 0 || k3 >= n) continue;
        double eta = g.xi(k2 - n / 2);
        acc += term.m(xi, eta) * F1.c[k1] * F2.c[k2] * G.c[k3];
      }
    }
  }
  return {acc / (L * L), 0.0};
}

// --- operations --------------------------------------------------------------

SampledFunction eval_bht(const SampledFunction& f1, const SampledFunction& f2,
                         const std::function<cplx(double)>& m_in) {
  require_common_grid(f1, f2);
  auto m = m_in ? m_in : [](double u) -> cplx { return u > 0 ? 1.0 : (u < 0 ? -1.0 : 0.0); };
  const auto& g = f1.grid();
  const int n = g.n;
  const double L = g.length();
  Spectrum F1 = f1.spectrum(), F2 = f2.spectrum();
  Band b1 = band_of(F1), b2 = band_of(F2);
  Spectrum S{g, std::vector<cplx>(n, cplx(0))};
  if (b1.hi >= b1.lo && b2.hi >= b2.lo) {
    int s_min = (b1.lo - n / 2) + (b2.lo - n / 2);
    int s_max = (b1.hi - n / 2) + (b2.hi - n / 2);
    if (s_min < -n / 2 || s_max >= n / 2)
      raise(Errc::AliasingError, "combined bandwidth exceeds the grid Nyquist");
    for (int k1 = b1.lo; k1 <= b1.hi; ++k1) {
      if (F1.c[k1] == cplx(0)) continue;
      for (int k2 = b2.lo; k2 <= b2.hi; ++k2) {
        cplx p = F1.c[k1] * F2.c[k2];
        if (p == cplx(0)) continue;
        int m1 = k1 - n / 2, m2 = k2 - n / 2;
        S.c[m1 + m2 + n / 2] += m((m1 - m2) / L) * p / L;
      }
    }
  }
  return SampledFunction::from_spectrum(S);
}

double modulation_residual(const TrilinearForm& form, const SampledFunction& f1,
                           const SampledFunction& f2, const SampledFunction& f3, double xi) {
  auto gu = form.geometry().gamma_unit();
  cplx base = form.evaluate(f1, f2, f3).value;
  cplx mod = form.evaluate(f1.modulate(gu[0] * xi), f2.modulate(gu[1] * xi),
                           f3.modulate(gu[2] * xi))
                 .value;
  double floor_ = 1e-300;
  return std::abs(mod - base) / std::max(std::abs(base), floor_);
}

double restricted_ratio(const TrilinearForm& form, const Iv& I, const SampledFunction& phi,
                        const SampledFunction& psi, const SampledFunction& f, int slot) {
  double nf = f.norm2();
  if (!(nf > 0)) raise(Errc::ZeroTestFunction, "restricted ratio with f = 0");
  const SampledFunction* a[3];
  if (slot == 1) {
    a[0] = &f;
    a[1] = &phi;
    a[2] = &psi;
  } else if (slot == 2) {
    a[0] = &phi;
    a[1] = &f;
    a[2] = &psi;
  } else if (slot == 3) {
    a[0] = &phi;
    a[1] = &psi;
    a[2] = &f;
  } else {
    raise(Errc::ConfigInvalid, "slot must be 1, 2 or 3");
  }
  cplx v = form.evaluate(*a[0], *a[1], *a[2]).value;
  return std::abs(v) * std::sqrt(I.len()) / nf;
}

double weak_boundedness_ratio(const TrilinearForm& form, const TensorSum3& phi, const Iv& I) {
  cplx v = 0;
  for (const auto& term : phi.terms) v += form.evaluate(term[0], term[1], term[2]).value;
  return std::abs(v) * std::sqrt(I.len());
}

TOneResult t_one(const TrilinearForm& form, int j, const SampledFunction& f, int k,
                 const ShellOptions& opt) {
  if (j < 1 || j > 3) raise(Errc::ConfigInvalid, "slot j must be 1, 2 or 3");
  double n1 = f.norm1();
  if (!(n1 > 0)) raise(Errc::ZeroTestFunction, "t_one with f = 0");
  if (std::abs(f.integral()) > 1e-10 * n1) raise(Errc::MeanNotZero, "f must have mean zero");
  Support sup = support_of(f);
  double radius = std::max(std::abs(sup.lo), std::abs(sup.hi));
  int k0 = int(std::ceil(std::log2(std::max(radius, 1e-9))));
  if (k <= k0 + 2) raise(Errc::ScaleTooSmall, "need k > k0 + 2");

  auto kc = form.kernel_complex();
  std::function<cplx(double, double)> kern;
  if (kc) {
    kern = kc;
  } else if (auto kr = form.kernel()) {
    kern = [kr](double x, double t) -> cplx { return kr(x, t); };
  } else {
    raise(Errc::ConfigInvalid, "form has no kernel representation");
  }

  const auto& geom = form.geometry();
  double bj = geom.beta[j - 1];
  double ci[3];
  for (int i = 0; i < 3; ++i) ci[i] = geom.beta[i] - bj;
  double dil = std::pow(2.0, k);
  const auto& g = f.grid();
  int i0 = std::max(0, int((sup.lo - g.a) / g.h));
  int i1 = std::min(g.n - 1, int((sup.hi - g.a) / g.h) + 1);

  auto x_int = [&](double t) -> cplx {
    cplx s = 0;
    for (int idx = i0; idx <= i1; ++idx) {
      double u = g.x(idx);
      cplx prod = f[idx];
      if (prod == cplx(0)) continue;
      for (int i = 0; i < 3; ++i) {
        if (i == j - 1) continue;
        prod *= phi_flat((u + ci[i] * t) / dil);
      }
      if (prod != cplx(0)) s += prod * kern(u - bj * t, t);
    }
    return g.h * s;
  };

  ShellOptions so = opt;
  so.outer_levels = k + 4;
  ShellSum sum = shell_integrate(x_int, std::pow(2.0, k + 3), so, true);
  TOneResult out;
  out.value = sum.value;
  out.k0 = k0;
  out.envelope = form.kernel_constant() * std::pow(2.0, -form.delta() * (k - k0)) * n1;
  return out;
}

FormEvalResult eval_lambda_j(const TrilinearForm& form, int j, const SampledFunction& g1,
                             const SampledFunction& g2, const ShellOptions& opt) {
  if (j < 1 || j > 3) raise(Errc::ConfigInvalid, "slot j must be 1, 2 or 3");
  require_common_grid(g1, g2);
  auto kc = form.kernel_complex();
  std::function<cplx(double, double)> kern;
  if (kc) {
    kern = kc;
  } else if (auto kr = form.kernel()) {
    kern = [kr](double x, double t) -> cplx { return kr(x, t); };
  } else {
    raise(Errc::ConfigInvalid, "form has no kernel representation");
  }
  int slots[2];
  int w = 0;
  for (int i = 0; i < 3; ++i)
    if (i != j - 1) slots[w++] = i;

  const SampledFunction* fs[2] = {&g1, &g2};
  Support sup[2] = {support_of(g1), support_of(g2)};
  if (sup[0].empty || sup[1].empty) return {cplx(0), 0.0};
  int piv = sup[0].len() <= sup[1].len() ? 0 : 1;
  int oth = 1 - piv;
  const auto& geom = form.geometry();
  double bp = geom.beta[slots[piv]];
  double c = geom.beta[slots[oth]] - bp;
  double reach = sup[0].len() + sup[1].len() +
                 std::abs((sup[0].lo + sup[0].hi) / 2 - (sup[1].lo + sup[1].hi) / 2);
  double t_max = reach / std::abs(c);
  bool overlap = std::max(sup[0].lo, sup[1].lo) < std::min(sup[0].hi, sup[1].hi);

  const auto& g = g1.grid();
  ShiftedSlot slot;
  slot.F = fs[oth]->spectrum();
  slot.sup = sup[oth];
  slot.c = c;
  double osc = std::abs(c) * band_ximax(slot.F);
  int i0 = std::max(0, int((sup[piv].lo - g.a) / g.h));
  int i1 = std::min(g.n - 1, int((sup[piv].hi - g.a) / g.h) + 1);
  auto x_int = [&](double t) -> cplx {
    double lo = slot.sup.lo - slot.c * t, hi = slot.sup.hi - slot.c * t;
    if (hi <= sup[piv].lo || lo >= sup[piv].hi) return cplx(0);
    auto sh = slot.at(t);
    cplx s = 0;
    for (int idx = i0; idx <= i1; ++idx) {
      cplx prod = (*fs[piv])[idx] * sh[idx];
      if (prod != cplx(0)) s += prod * kern(g.x(idx) - bp * t, t);
    }
    return g.h * s;
  };
  ShellSum sum = shell_integrate(x_int, t_max, opt, overlap && opt.principal_value, osc);
  return {sum.value, sum.error};
}

double modulation_lattice_step(const FormGeometry& geom, const FunctionGrid& g) {
  double n = std::sqrt(double(geom.gdir[0] * geom.gdir[0] + geom.gdir[1] * geom.gdir[1] +
                              geom.gdir[2] * geom.gdir[2]));
  return n / g.length();
}

double bmo_estimate(const SampledFunction& g, const std::vector<Iv>& windows) {
  double worst = 0;
  const auto& gr = g.grid();
  for (const auto& w : windows) {
    int i0 = std::max(0, int(std::ceil((w.lo - gr.a) / gr.h)));
    int i1 = std::min(gr.n - 1, int(std::floor((w.hi - gr.a) / gr.h)));
    if (i1 <= i0) continue;
    cplx avg = 0;
    for (int i = i0; i <= i1; ++i) avg += g[i];
    avg /= double(i1 - i0 + 1);
    double osc = 0;
    for (int i = i0; i <= i1; ++i) osc += std::abs(g[i] - avg);
    osc /= double(i1 - i0 + 1);
    worst = std::max(worst, osc);
  }
  return worst;
}

std::shared_ptr<SymbolForm> make_symbol_kernel(const std::function<double(double)>& a,
                                               const std::function<double(double)>& a_prime,
                                               double c_k) {
  (void)a_prime;
  auto sigma = [a](double x, double u) -> cplx { return a(x) / (1.0 + u * u); };
  auto kern = [a](double x, double t) -> double { return a(x) * kPi * std::exp(-kTwoPi * std::abs(t)); };
  if (c_k <= 0) {
    double sup_a = 0;
    for (int i = 0; i <= 256; ++i) sup_a = std::max(sup_a, std::abs(a(-16.0 + i * 0.125)));
    c_k = 2.0 * kPi * kPi * std::max(1.0, sup_a);
  }
  auto form = std::make_shared<SymbolForm>(FormGeometry::from_beta_int(-1, 1, 0), sigma, 1.0, c_k,
                                           kern, "s10_symbol");
  auto rep = kernel_spot_check(form->kernel(), form->delta(), form->kernel_constant(), 7);
  if (!rep.ok) raise(Errc::SymbolBoundsViolated, rep.witness);
  return form;
}

SpotCheckReport kernel_spot_check(const std::function<double(double, double)>& k, double delta,
                                  double c_k, std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-8.0, 8.0);
  std::uniform_real_distribution<double> ue(-6.0, 6.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SpotCheckReport rep;
  for (int s = 0; s < samples; ++s) {
    double x = ux(rng);
    double t = std::pow(2.0, ue(rng)) * (u01(rng) < 0.5 ? -1 : 1);
    double r1 = std::abs(k(x, t)) * std::abs(t) / c_k;
    rep.worst_ratio = std::max(rep.worst_ratio, r1);
    if (r1 > 1.0 + 1e-9) {
      ++rep.violations;
      if (rep.ok) rep.witness = "size bound violated at x=" + std::to_string(x) + " t=" + std::to_string(t);
      rep.ok = false;
    }
    // Hoelder bound on ||(x,t)-(x',t')|| <= |t|/2.
    double theta = kTwoPi * u01(rng);
    double rad = 0.5 * std::abs(t) * std::max(1e-3, u01(rng));
    double dx = rad * std::cos(theta), dt = rad * std::sin(theta);
    double lhs = std::abs(k(x, t) - k(x + dx, t + dt));
    double rhs = c_k * std::pow(rad, delta) * std::pow(std::abs(t), -1.0 - delta);
    double r2 = lhs / rhs;
    rep.worst_ratio = std::max(rep.worst_ratio, r2);
    if (r2 > 1.0 + 1e-9) {
      ++rep.violations;
      if (rep.ok)
        rep.witness = "regularity bound violated at x=" + std::to_string(x) + " t=" + std::to_string(t);
      rep.ok = false;
    }
  }
  return rep;
}

SpotCheckReport multiplier_spot_check(const std::function<cplx(double)>& m, int order, double c,
                                      std::uint64_t seed, int samples) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ue(-6.0, 6.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SpotCheckReport rep;
  for (int s = 0; s < samples; ++s) {
    double u = std::pow(2.0, ue(rng)) * (u01(rng) < 0.5 ? -1 : 1);
    cplx val = m(u);
    double fd = std::abs(u) * 1e-4;
    for (int nd = 0; nd <= order; ++nd) {
      double bound = c * std::pow(std::abs(u), -double(nd));
      double est;
      if (nd == 0) {
        est = std::abs(val);
      } else if (nd == 1) {
        est = std::abs(m(u + fd) - m(u - fd)) / (2 * fd);
      } else {
        est = std::abs(m(u + fd) - 2.0 * val + m(u - fd)) / (fd * fd);
        if (nd > 2) break;  // finite differences stop being meaningful
      }
      double r = est / bound;
      rep.worst_ratio = std::max(rep.worst_ratio, r);
      if (r > 1.0 + 1e-6) {
        ++rep.violations;
        if (rep.ok) rep.witness = "derivative bound n=" + std::to_string(nd) + " at u=" + std::to_string(u);
        rep.ok = false;
      }
    }
  }
  return rep;
}

}  // namespace mitf
