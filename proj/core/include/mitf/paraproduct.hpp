#pragma once

#include <map>

#include "mitf/forms.hpp"

namespace mitf {

// Generators and the integrated wave function of the Section 7 paraproduct:
// phi1-hat = phi2-hat = Phi, phi3-hat = tau_10 Phi + tau_{-10} Phi,
// psi(x) = int phi1(x + (b1-b3) t) phi2(x + (b2-b3) t) phi3(x) dt.
class PsiKit {
 public:
  PsiKit(const std::array<double, 3>& beta, const FunctionGrid& grid);

  const FunctionGrid& grid() const { return grid_; }
  const std::array<double, 3>& beta() const { return beta_; }
  const SampledFunction& psi() const { return psi_; }
  const SampledFunction& generator(int i) const { return phi_[i]; }

  double mean_residual() const { return mean_residual_; }
  double psi_norm2() const { return psi_norm2_; }
  // Radius of the guaranteed psi-hat vanishing neighborhood of the origin.
  double r0() const { return r0_; }
  // Relative psi-hat mass outside +-[8 - w, 12 + w].
  double band_leak() const { return band_leak_; }
  double band_halfwidth() const { return bandw_; }
  // Calderon reproducing constant c = (int_0^inf |psi-hat(t xi0)|^2 dt/t)^{-1}.
  double calderon_constant() const { return calderon_c_; }
  double calderon_spread() const { return calderon_spread_; }

  // Spectrum value psi-hat(xi) (cubic interpolation between bins).
  cplx psi_hat(double xi) const;
  // Generator phi_i evaluated at an arbitrary point (cubic interpolation).
  double generator_at(int i, double x) const;

 private:
  FunctionGrid grid_;
  std::array<double, 3> beta_;
  std::array<SampledFunction, 3> phi_;
  std::array<SampledFunction, 3> phi_fine_;
  SampledFunction psi_;
  std::vector<cplx> psi_hat_;  // zero-padded spectrum samples
  int hat_pad_ = 4;
  double mean_residual_ = 0, psi_norm2_ = 0, r0_ = 0, band_leak_ = 0, bandw_ = 0;
  double calderon_c_ = 0, calderon_spread_ = 0;
};

// Coefficient on the (k, n) lattice; the dyadic index interval is
// I_{k,n} = [2^k n, 2^k (n+1)).
struct CarlesonEntry {
  double k = 0;
  double n = 0;
  cplx c{0, 0};
};

struct ParaproductSymbol {
  SampledFunction b;
  int kappa = 4;           // |k| <= kappa
  double dk = 0.125;       // k lattice step
  double dn = 1.0 / 32.0;  // n lattice step
  std::vector<CarlesonEntry> coef;
  double coef_floor = 3e-6;  // entries below floor * max dropped
};

// c_{k,n} = c <b, psi_{k,n}> over the configured lattice.
ParaproductSymbol calderon_coeffs(const PsiKit& kit, const SampledFunction& b, int kappa,
                                  double dk = 0.125, double dn = 1.0 / 32.0);

// Pairing of the reconstruction c sum c_{k,n} psi_{k,n} (lattice measure
// weights included) against a test function.
cplx reconstruction_pairing(const PsiKit& kit, const ParaproductSymbol& sym,
                            const SampledFunction& test);

// The modulation invariant paraproduct Lambda_kappa evaluated through the
// line-integral model: Lambda = sum c_{k,n} dk dn J(f_i phi_{i,k,n}).
class ParaproductForm : public TrilinearForm {
 public:
  ParaproductForm(std::shared_ptr<PsiKit> kit, ParaproductSymbol sym, double tail_tol = 1e-4);

  std::string name() const override { return "paraproduct"; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;

  const ParaproductSymbol& symbol() const { return sym_; }

 private:
  std::shared_ptr<PsiKit> kit_;
  ParaproductSymbol sym_;
  double tail_tol_;
};

// The elementary kernel-one trilinear integral J(h1, h2, h3) =
// int prod h_i(x + beta_i t) dx dt = int prod h_i-hat(s g_i) ds.
cplx line_integral(const FormGeometry& geom, const SampledFunction& h1, const SampledFunction& h2,
                   const SampledFunction& h3, double* tail_estimate = nullptr);

// Carleson ratio sup_J (1/|J|) sum_{I_{k,n} subset J} |c_{k,n}|^2 over
// integer-lattice entries (measure weights dk dn applied for refined lattices).
double carleson_ratio(const std::vector<CarlesonEntry>& coef, const std::vector<Iv>& windows,
                      double dk = 1.0, double dn = 1.0);

// The (7.6) family: |c_I| = |I|^{1/2} on every dyadic I with 1 <= |I| <= 2^scales
// inside [0, 2^scales); phases aligned (all ones). Carleson ratio grows like
// the number of scales.
std::vector<CarlesonEntry> counterexample_coefficients(int scales);

// Counterexample form Lambda(f1,f2,f3) = sum_I c_I J(f_i phi_{i,I}).
class CounterexampleForm : public TrilinearForm {
 public:
  CounterexampleForm(std::shared_ptr<PsiKit> kit, std::vector<CarlesonEntry> coef);
  std::string name() const override { return "carleson_counterexample"; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;

 private:
  std::shared_ptr<PsiKit> kit_;
  std::vector<CarlesonEntry> coef_;
};

}  // namespace mitf
