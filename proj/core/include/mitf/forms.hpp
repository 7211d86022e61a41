#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>

#include "mitf/sampled.hpp"
#include "mitf/wavepacket.hpp"

namespace mitf {

// beta with pairwise distinct entries; gdir is the primitive integer vector
// spanning <gamma> (gamma = gdir/|gdir|, perpendicular to (1,1,1) and beta).
struct FormGeometry {
  std::array<double, 3> beta{-1.0, 1.0, 0.0};
  std::array<std::int64_t, 3> gdir{1, 1, -2};

  static FormGeometry from_beta_int(std::int64_t b1, std::int64_t b2, std::int64_t b3);
  std::array<double, 3> gamma_unit() const;
};

struct FormEvalResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;
};

struct ShellOptions {
  int inner_levels = 12;   // smallest shell 2^{-inner_levels}
  int outer_levels = 12;   // largest shell 2^{outer_levels} (clipped by supports)
  int nodes_per_panel = 8;
  int min_panels = 8;      // sub-panels per shell; grows with the oscillation rate
  int max_panels = 256;
  double cauchy_tol = 1e-7;
  bool principal_value = true;
};

class TrilinearForm {
 public:
  virtual ~TrilinearForm() = default;

  const FormGeometry& geometry() const { return geom_; }
  double delta() const { return delta_; }
  double kernel_constant() const { return c_k_; }
  virtual std::string name() const = 0;
  virtual FormEvalResult evaluate(const SampledFunction& f1, const SampledFunction& f2,
                                  const SampledFunction& f3) const = 0;
  // Kernel callback K(x, t) when a kernel representation is available.
  virtual std::function<double(double, double)> kernel() const { return nullptr; }
  virtual std::function<cplx(double, double)> kernel_complex() const { return nullptr; }

 protected:
  TrilinearForm(FormGeometry g, double delta, double c_k) : geom_(g), delta_(delta), c_k_(c_k) {}
  FormGeometry geom_;
  double delta_;
  double c_k_;
};

// x-independent multiplier form: Lambda = sum_{xi1+xi2+xi3=0} m(xi1 - xi2)
// f1^ f2^ f3^. m = sign is the bilinear Hilbert transform triple.
class MultiplierForm : public TrilinearForm {
 public:
  MultiplierForm(FormGeometry g, std::function<cplx(double)> m, double delta, double c_k,
                 std::function<cplx(double)> kernel_t = nullptr, std::string name = "multiplier");
  static std::shared_ptr<MultiplierForm> bht();

  std::string name() const override { return name_; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;
  std::function<cplx(double, double)> kernel_complex() const override;
  const std::function<cplx(double)>& multiplier() const { return m_; }

 private:
  std::function<cplx(double)> m_;
  std::function<cplx(double)> kernel_t_;
  std::string name_;
};

// x-dependent symbol form: Lambda = int T3(f1,f2) f3, with
// T3(f1,f2)(x) = int sigma(x, xi-eta) f1^(xi) f2^(eta) e^{2pi i x(xi+eta)}.
class SymbolForm : public TrilinearForm {
 public:
  SymbolForm(FormGeometry g, std::function<cplx(double, double)> sigma, double delta, double c_k,
             std::function<double(double, double)> kernel_xt = nullptr,
             std::string name = "symbol");

  std::string name() const override { return name_; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;
  std::function<double(double, double)> kernel() const override { return kernel_xt_; }
  SampledFunction apply_t3(const SampledFunction& f1, const SampledFunction& f2) const;

 private:
  std::function<cplx(double, double)> sigma_;
  std::function<double(double, double)> kernel_xt_;
  std::string name_;
};

// Kernel-quadrature form: symmetric dyadic shells in t with principal value.
class KernelForm : public TrilinearForm {
 public:
  KernelForm(FormGeometry g, std::function<double(double, double)> k, double delta, double c_k,
             ShellOptions opt = {}, std::string name = "kernel");

  std::string name() const override { return name_; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;
  std::function<double(double, double)> kernel() const override { return k_; }
  const ShellOptions& shell_options() const { return opt_; }

 private:
  std::function<double(double, double)> k_;
  ShellOptions opt_;
  std::string name_;
};

// Rank-list pseudodifferential form sum_r a_r(x) m_r(xi, eta): the general
// Coifman-Meyer shape, with no built-in modulation symmetry.
class CoifmanMeyerForm : public TrilinearForm {
 public:
  struct Term {
    std::function<double(double)> a;
    std::function<cplx(double, double)> m;
  };
  CoifmanMeyerForm(FormGeometry g, std::vector<Term> terms, double delta, double c_k)
      : TrilinearForm(g, delta, c_k), terms_(std::move(terms)) {}

  std::string name() const override { return "coifman_meyer"; }
  FormEvalResult evaluate(const SampledFunction&, const SampledFunction&,
                          const SampledFunction&) const override;

 private:
  std::vector<Term> terms_;
};

// --- operations --------------------------------------------------------------

// T(f1,f2) via the multiplier m(xi - eta) on a common grid.
SampledFunction eval_bht(const SampledFunction& f1, const SampledFunction& f2,
                         const std::function<cplx(double)>& m = nullptr);

// |Lambda(M f) - Lambda(f)| / max(|Lambda(f)|, floor) for modulations along gamma.
double modulation_residual(const TrilinearForm& form, const SampledFunction& f1,
                           const SampledFunction& f2, const SampledFunction& f3, double xi);

// |Lambda(arranged)| |I|^{1/2} / ||f||_2 with f placed in `slot` (1-based).
double restricted_ratio(const TrilinearForm& form, const Iv& I, const SampledFunction& phi,
                        const SampledFunction& psi, const SampledFunction& f, int slot);

// Rank-limited stand-in for a function on R^3: a short sum of tensor products.
struct TensorSum3 {
  std::vector<std::array<SampledFunction, 3>> terms;
};

double weak_boundedness_ratio(const TrilinearForm& form, const TensorSum3& phi, const Iv& I);

struct TOneResult {
  cplx value;
  double envelope;  // C_K 2^{-delta (k - k0)} ||f||_1
  int k0;
};

// Lambda(D_{2^k}(Phi (x) Phi) (x) f) with f in slot j, plus the (3.5) envelope.
TOneResult t_one(const TrilinearForm& form, int j, const SampledFunction& f, int k,
                 const ShellOptions& opt = {});

// Bilinear restriction Lambda_j (slot j carries 1): kernel-path quadrature.
FormEvalResult eval_lambda_j(const TrilinearForm& form, int j, const SampledFunction& g1,
                             const SampledFunction& g2, const ShellOptions& opt = {});

double bmo_estimate(const SampledFunction& g, const std::vector<Iv>& windows);

// Smallest xi > 0 whose gamma-modulations land on the grid's frequency
// lattice, keeping the discrete periodic model exactly modulation covariant.
double modulation_lattice_step(const FormGeometry& geom, const FunctionGrid& g);

// S^0_{1,0}-type symbol sigma(x,u) = a(x)/(1+u^2); passes (2.1)/(2.2) with
// delta = 1 and has modulation symmetry along (1,1,-2)/sqrt(6).
std::shared_ptr<SymbolForm> make_symbol_kernel(const std::function<double(double)>& a,
                                               const std::function<double(double)>& a_prime,
                                               double c_k = 0.0);

struct SpotCheckReport {
  bool ok = true;
  int violations = 0;
  double worst_ratio = 0.0;
  std::string witness;
};

SpotCheckReport kernel_spot_check(const std::function<double(double, double)>& k, double delta,
                                  double c_k, std::uint64_t seed, int samples = 200);
SpotCheckReport multiplier_spot_check(const std::function<cplx(double)>& m, int order, double c,
                                      std::uint64_t seed, int samples = 200);

}  // namespace mitf
