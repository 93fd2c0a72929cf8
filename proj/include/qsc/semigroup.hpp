#pragma once

#include <vector>

#include "qsc/opspace.hpp"

namespace qsc {

// Generator of a one-parameter semigroup of maps on an operator space,
// stored on basis coordinates.
struct Generator {
  OperatorSpace space;
  CMatrix coord;
};

// e^{tL} as a map; t must be nonnegative.
SuperMap evolve(const Generator& gen, double t);

// Validated list of noise values: finitely many distinct vectors in C^d with
// the zero vector at index 0.
class NoisePoints {
 public:
  explicit NoisePoints(std::vector<CVector> points);

  int d() const { return d_; }
  int size() const { return static_cast<int>(points_.size()); }
  const CVector& operator[](int i) const { return points_[i]; }
  const std::vector<CVector>& all() const { return points_; }

  // Index of the value within the tie tolerance; DomainError("ValueNotInT")
  // when absent.
  int index_of(const CVector& x) const;

 private:
  int d_;
  std::vector<CVector> points_;
};

// Two-parameter family {P^{x,y}} of semigroups on one operator space,
// indexed by pairs from a noise value list; component (0,0) is the
// expectation semigroup.
class AssociatedFamily {
 public:
  // gens[i][j] is the generator coordinate matrix of component (i, j).
  AssociatedFamily(OperatorSpace space, NoisePoints points,
                   std::vector<std::vector<CMatrix>> gens);

  const OperatorSpace& space() const { return space_; }
  const NoisePoints& points() const { return points_; }
  int d() const { return points_.d(); }

  const CMatrix& gen_coord(int i, int j) const;
  Generator generator(int i, int j) const;
  // P^{x_i, x_j}_t.
  SuperMap component(int i, int j, double t) const;

 private:
  OperatorSpace space_;
  NoisePoints points_;
  std::vector<std::vector<CMatrix>> gens_;
};

// Family of operator semigroups on C^m indexed the same way; components are
// plain matrices Theta^{x,y}_t = expm(t gen).
class OperatorFamily {
 public:
  OperatorFamily(int hilbert_dim, NoisePoints points,
                 std::vector<std::vector<CMatrix>> gens);

  int hilbert_dim() const { return hilbert_dim_; }
  const NoisePoints& points() const { return points_; }

  const CMatrix& gen(int i, int j) const;
  CMatrix component(int i, int j, double t) const;

 private:
  int hilbert_dim_;
  NoisePoints points_;
  std::vector<std::vector<CMatrix>> gens_;
};

// Map on Mat_n(V) acting as P^{x_i, x_j}_t on block (i, j); xs are indices
// into the value list (DomainError("IndexNotInT") out of range).
SuperMap schur_tuple(const AssociatedFamily& fam, const std::vector<int>& xs,
                     double t);

// Same construction for an arbitrary labelling gamma: I -> T; gamma = id on
// T gives the family's global semigroup.
SuperMap global_semigroup(const AssociatedFamily& fam,
                          const std::vector<int>& gamma, double t);

// Generator of the global semigroup on Mat_I(V): the direct sum of the
// component generators in block-major order.
Generator global_generator(const AssociatedFamily& fam,
                           const std::vector<int>& gamma);

// Family on tilde_system(V): component (x, y) scales the corner identities
// by e^{-t chi(x,y)}, applies P^{x,y}_t upstairs and (P^{y,x}_t)-dagger
// downstairs.
AssociatedFamily tilde_family(const AssociatedFamily& fam);

// P^{x,y}_t = e^{-t chi(x,y)} id.
AssociatedFamily trivial_family(const OperatorSpace& v,
                                const NoisePoints& points);

// P^{x,y}_t = e^{-t chi(x,y)} S_t for a unital CP semigroup generator s.
// On full-algebra spaces S_t is Choi-checked for complete positivity and
// unitality at sample times; DomainError("NotUnitalCP") on failure.
AssociatedFamily product_family(const Generator& s, const NoisePoints& points);

// Multiplies every component by e^{-ct}; negative c builds deliberate
// violators.
AssociatedFamily contraction_scaled(const AssociatedFamily& fam, double c);

// The non-Schur-action generator c(Phi - id) on Mat_2 viewed as Mat_T(C)
// with T = {0, 1}; Phi swaps the diagonal entries and kills the rest.
// Closed forms (exact in t): exp(tc Psi) fixes the diagonal of the all-ones
// matrix, decays its off-diagonal by e^{-ct}, and sends p_0 to the diagonal
// ((1 + e^{-2ct})/2, (1 - e^{-2ct})/2).
struct CounterexampleFamily {
  Generator generator;
  NoisePoints points;
  double scale;
};
CounterexampleFamily counterexample_family(double scale = 0.5);

// Scalar operator family of the Weyl cocycle with amplitude c: rates
// lambda(x, y) = -i Im<c, y> - chi(x, c + y).
OperatorFamily weyl_scalar_family(const CVector& c, const NoisePoints& points);

}  // namespace qsc
