#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "qsc/semigroup.hpp"
#include "qsc/stepfun.hpp"

namespace qsc {

// Finite combination sum_i u_i (x) pv(f_i) of exponential vectors with
// matching coefficient dimension; duplicate step functions are allowed.
struct CoherentTerm {
  CVector u;
  StepFunction f;
};

class CoherentSpanElement {
 public:
  explicit CoherentSpanElement(std::vector<CoherentTerm> terms);

  int hilbert_dim() const { return hilbert_dim_; }
  int noise_dim() const { return noise_dim_; }
  int size() const { return static_cast<int>(terms_.size()); }
  const std::vector<CoherentTerm>& terms() const { return terms_; }

 private:
  int hilbert_dim_;
  int noise_dim_;
  std::vector<CoherentTerm> terms_;
};

// <xi, eta> over the horizon [0, t): double sum of <u_i, v_j> weighted by
// the exponential of -chi_path(f_i, g_j, t).
Complex span_pairing(const CoherentSpanElement& xi,
                     const CoherentSpanElement& eta, double t);

// ||xi||^2 over the horizon.
double span_norm_sq(const CoherentSpanElement& xi, double t);

// Kernel of an associated family on step-function pairs, evaluated through
// the semigroup decomposition over the merged jump partition.  Component
// evolutions are memoised by (pair, duration); the cache is safe to share
// across threads.
class CocycleKernel {
 public:
  explicit CocycleKernel(AssociatedFamily family);

  const AssociatedFamily& family() const { return family_; }
  const OperatorSpace& space() const { return family_.space(); }

  // k^{f,g}_t(a).  f and g must take values in the noise list on [0, t)
  // (DomainError "ValueNotInT") and a must lie in the space.
  CMatrix eval(const StepFunction& f, const StepFunction& g, double t,
               const CMatrix& a) const;

  // Coordinate matrix of k^{f,g}_t as a map on the space.
  CMatrix eval_coord(const StepFunction& f, const StepFunction& g,
                     double t) const;

  // Coordinate matrix composed over an explicit partition of [0, t); the
  // partition must contain every jump of f and g below t for the result to
  // agree with eval_coord.
  CMatrix eval_coord_on_partition(const StepFunction& f, const StepFunction& g,
                                  double t,
                                  const std::vector<double>& cuts) const;

 private:
  CMatrix component_coord(int i, int j, double dt) const;

  AssociatedFamily family_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, int, std::uint64_t>, CMatrix> cache_;
};

// Norm difference between evaluation over the minimal partition and over a
// refinement containing all jumps.
double partition_invariance_defect(const CocycleKernel& kernel,
                                   const StepFunction& f,
                                   const StepFunction& g, double t,
                                   const CMatrix& a,
                                   const std::vector<double>& refinement);

// || k_{r+t} (a) - k_r ( k-shifted_t (a) ) || for the shifted pair.
double cocycle_identity_defect(const CocycleKernel& kernel,
                               const StepFunction& f, const StepFunction& g,
                               double r, double t, const CMatrix& a);

// Scalar matrix with entries <u_i, k^{f_i, f_j}_t(A_ij) u_j> for A in
// Mat_N(V) given as blocks of size m.
CMatrix form_matrix(const CocycleKernel& kernel,
                    const std::vector<CoherentTerm>& xi, double t,
                    const CMatrix& a_big);

// PSD matrix [<u_i, u_j> exp(-chi_path(f_i, f_j, t))]; its entry total is
// the squared norm of the span element.
CMatrix span_norm_form(const std::vector<CoherentTerm>& xi, double t);

// Sampled verdicts over random coherent spans (up to n_max terms, up to
// three jumps each) and the time grid.  Spans whose exponential Gram matrix
// is ill-conditioned beyond 1e12 are skipped rather than judged.
Verdict kernel_positivity(const CocycleKernel& kernel, int n_max,
                          const std::vector<double>& t_grid, int trials,
                          Rng& rng, double tol = 1e-7);
Verdict kernel_contractivity(const CocycleKernel& kernel, int n_max,
                             const std::vector<double>& t_grid, int trials,
                             Rng& rng, double tol = 1e-7);
Verdict kernel_unitality(const CocycleKernel& kernel, int n_max,
                         const std::vector<double>& t_grid, int trials,
                         Rng& rng, double tol = 1e-7);

// Weyl operator W(c 1_{[0,t)}) applied termwise: (u, f) becomes
// (e^{-i Im<c 1_{[0,t)}, f>} u, f + c 1_{[0,t)}).
CoherentSpanElement weyl_apply(const CVector& c, double t,
                               const CoherentSpanElement& xi);

// Norm difference between the compression of I (x) lambda (x) I through the
// Weyl column of x over [0, t) - computed on coherent spans - and the Schur
// product of the exponential Grammian with lambda.
double weyl_gram_identity_defect(const std::vector<CVector>& xs,
                                 const CMatrix& lambda, double t);

enum class KernelSide { Left, Right };

// Ordered product of operator-family components over the merged partition:
// the first segment's factor sits leftmost for Left and rightmost for Right.
CMatrix operator_kernel(const OperatorFamily& family, const StepFunction& f,
                        const StepFunction& g, double t, KernelSide side);

// Random T-valued step function with at most max_jumps jumps below horizon.
StepFunction sample_step(const NoisePoints& points, double horizon,
                         int max_jumps, Rng& rng);

}  // namespace qsc
