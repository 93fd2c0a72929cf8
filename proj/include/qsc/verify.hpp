#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qsc/kernel.hpp"
#include "qsc/semigroup.hpp"

namespace qsc {

// Sampling budget shared by every verifier.  Identical specs (seed
// included) give bitwise-identical reports.
struct SampleSpec {
  int n_max = 4;
  std::vector<double> t_grid = {0.0, 0.25, 0.5, 1.0, 2.0};
  int trials = 200;
  std::uint64_t seed = 0;
};

enum class Conclusion { Pass, Fail, Inconclusive };

const char* conclusion_name(Conclusion c);

// One labelled sub-result.  A check whose sampler never produced a usable
// draw is marked inconclusive; its verdict is then vacuous.
struct Check {
  std::string label;
  Verdict verdict;
  bool inconclusive = false;
};

// A verifier outcome: fail when any check fails conclusively, inconclusive
// when everything passed but some check had no usable samples.  Passes are
// sampled certificates, never proofs; failures carry concrete witnesses.
struct Report {
  std::string verifier;
  Conclusion conclusion = Conclusion::Pass;
  std::vector<Check> checks;
  SampleSpec spec;
};

// Stable JSON form {verifier, conclusion, checks:[{label, passed,
// worst_violation, witness}], spec}.
std::string report_to_json(const Report& report);

// Positivity of Schur tuples, domination by the exponential Grammian, and
// diagonal unitality, with the cross-check that unitality forces the
// domination to be an equality.  Requires an operator system.
Report verify_prop_PP(const AssociatedFamily& fam, const SampleSpec& spec);

// Hypothesis checks (tuple positivity, Grammian domination) followed by a
// constructive conclusion: the kernel is completely positive, contractive,
// satisfies the shift cocycle identity, and is unital exactly when the
// domination is an equality.  Requires an operator system.
Report verify_theorem_Q(const AssociatedFamily& fam, const SampleSpec& spec);

// Characterization of global semigroups on Mat_T(V): complete positivity,
// contractivity, the matrix-unit normalisation P_t(E_xy (x) I) =
// e^{-t chi(x,y)} E_xy (x) I, the all-ones compression, Schur action, and
// the fixed-projection route to unitality.
Report verify_theorem_R(const Generator& global, const NoisePoints& points,
                        const SampleSpec& spec);

// Separable-noise criterion: Schur action, complete positivity, and the
// domination P_t(|zeta><zeta| (x) I) <= (gram (.) |zeta><zeta|) (x) I for an
// entrywise nonzero zeta, then the same domination for sampled positive
// weight matrices.
Report verify_global_rank_one(const Generator& global,
                              const NoisePoints& points, const CVector& zeta,
                              const SampleSpec& spec);

// Interval preservation on an identity-free, adjoint-closed, nondegenerate
// coefficient space: sampled elements of [0, lambda (x) I] inside Mat_n(C)
// stay inside [0, (lambda (.) gram) (x) I], and the unitised extension of a
// component is completely positive on samples.
Report verify_cstar_interval(const AssociatedFamily& fam,
                             const SampleSpec& spec);

// Complete contractivity criterion on a general operator space: the kneaded
// norm bound, positivity of the corresponding tilde-family Schur tuples,
// and their per-trial agreement.
Report verify_theorem_S(const AssociatedFamily& fam, const SampleSpec& spec);

// Positive contraction criterion for operator families: commutativity of
// all components plus the operator interval 0 <= [Theta^{x_i,x_j}_t] <=
// gram (x) I.
Report verify_theorem_W(const OperatorFamily& fam, const SampleSpec& spec);

// Left-contractivity criterion for operator families acting on columns.
Report verify_left_contraction(const OperatorFamily& fam,
                               const SampleSpec& spec);

enum class ScanProperty {
  Injective,
  Isometric,
  Coisometric,
  Unital,
  CompletelyIsometric,
};

const char* scan_property_name(ScanProperty prop);

// Evaluates the property at every positive grid time on sampled data and
// asserts the all-or-nothing pattern.  Kernels support Unital, Injective,
// and CompletelyIsometric.
Report dichotomy_scan(const CocycleKernel& kernel, ScanProperty prop,
                      const SampleSpec& spec);

// Same scan for the unitary Weyl cocycle with amplitude c on coherent
// spans; supports Isometric, Coisometric, and Injective.
Report dichotomy_scan_weyl(const CVector& c, const NoisePoints& points,
                           ScanProperty prop, const SampleSpec& spec);

}  // namespace qsc
