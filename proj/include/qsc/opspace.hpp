#pragma once

#include <string>
#include <vector>

#include "qsc/linalg.hpp"
#include "qsc/numeric.hpp"

namespace qsc {

// Concrete operator space: a linearly independent span of m_out x m_in
// matrices.  Immutable after construction; the structural flags are computed
// from the basis, never asserted by callers.
class OperatorSpace {
 public:
  // Throws DomainError("DependentBasis") when the basis is linearly
  // dependent beyond the pseudo-inverse cutoff, ShapeError on mixed shapes
  // or an empty basis.
  explicit OperatorSpace(std::vector<CMatrix> basis,
                         const Tolerances& tol = {});

  static OperatorSpace full_algebra(int m);
  static OperatorSpace scalar();                    // C as 1x1 matrices
  static OperatorSpace ket_space(int m);            // columns B(C; C^m)
  // n x n block matrices over v, basis ordered block-major: (row, col, b).
  static OperatorSpace mat_space(const OperatorSpace& v, int n);

  int m_out() const { return m_out_; }
  int m_in() const { return m_in_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<CMatrix>& basis() const { return basis_; }

  bool is_adjoint_closed() const { return is_adjoint_closed_; }
  bool is_system() const { return is_system_; }
  bool is_full_algebra() const { return is_full_algebra_; }

  // Least-squares coordinates of m in the basis (minimum-norm solution).
  CVector coords(const CMatrix& m) const;
  // Frobenius distance between m and its projection onto the span.
  double residual(const CMatrix& m) const;
  // residual <= tol.eq_tol * (1 + Frobenius norm of m).
  bool contains(const CMatrix& m, const Tolerances& tol = {}) const;
  // Matrix with the given coordinates.
  CMatrix reconstruct(const CVector& coords) const;

  // Spanning set of the Hermitian part: b + b* and i(b - b*) over the basis,
  // zero elements dropped.  Meaningful for adjoint-closed spaces.
  const std::vector<CMatrix>& hermitian_spanning_set() const {
    return herm_span_;
  }

 private:
  int m_out_;
  int m_in_;
  std::vector<CMatrix> basis_;
  std::vector<CMatrix> herm_span_;
  CMatrix basis_mat_;  // vectorized basis, one column per element
  Eigen::CompleteOrthogonalDecomposition<CMatrix> solver_;
  bool is_adjoint_closed_ = false;
  bool is_system_ = false;
  bool is_full_algebra_ = false;
};

// Same ambient shape and same span matrix (hence interchangeable bases are
// NOT equal: coordinates must match).
bool same_space(const OperatorSpace& a, const OperatorSpace& b);

// Linear map between operator spaces, stored as its matrix on basis
// coordinates.
class SuperMap {
 public:
  SuperMap(OperatorSpace domain, OperatorSpace codomain, CMatrix coord);

  static SuperMap identity(const OperatorSpace& v);
  static SuperMap zero(const OperatorSpace& domain,
                       const OperatorSpace& codomain);
  // Builds the coordinate matrix by applying fn to every basis element; fn
  // must return matrices inside the codomain span.
  template <typename Fn>
  static SuperMap from_action(const OperatorSpace& domain,
                              const OperatorSpace& codomain, Fn&& fn) {
    CMatrix coord(codomain.dim(), domain.dim());
    for (int j = 0; j < domain.dim(); ++j) {
      coord.col(j) = codomain.coords(fn(domain.basis()[j]));
    }
    return SuperMap(std::move(domain), std::move(codomain), std::move(coord));
  }

  const OperatorSpace& domain() const { return domain_; }
  const OperatorSpace& codomain() const { return codomain_; }
  const CMatrix& coord_matrix() const { return coord_; }

  // Applies the map; throws DomainError("NotInSpace") when m fails
  // membership of the domain.
  CMatrix apply(const CMatrix& m, const Tolerances& tol = {}) const;

 private:
  OperatorSpace domain_;
  OperatorSpace codomain_;
  CMatrix coord_;
};

SuperMap compose(const SuperMap& outer, const SuperMap& inner);
SuperMap add(const SuperMap& a, const SuperMap& b);
SuperMap scale(Complex z, const SuperMap& a);

// Outcome of a sampled check.
struct Verdict {
  bool passed = false;
  double worst_violation = 0.0;
  std::string witness;
  int samples_used = 0;
};

// Membership probe: least-squares residual plus the threshold decision.
struct MembershipResult {
  bool member = false;
  double residual = 0.0;
};
MembershipResult membership(const OperatorSpace& v, const CMatrix& m,
                            const Tolerances& tol = {});

// Space {T* : T in V}; basis is the adjoint of the original basis, in order.
OperatorSpace adjoint_space(const OperatorSpace& v);

// phi-dagger: V-dagger -> W-dagger, T* -> phi(T)*.  On the adjoint bases its
// coordinate matrix is the entrywise conjugate.
SuperMap adjoint_map(const SuperMap& phi);

// Operator system in Mat_{m_out + m_in} spanned by the two corner
// identities, V in the upper-right corner and V-dagger in the lower-left.
// Basis order: corner P, corner Q, upper copies of the basis, lower copies
// of the adjoint basis.
OperatorSpace tilde_system(const OperatorSpace& v);

// [[alpha I, a], [b, beta I]] -> [[alpha I, phi(a)], [phi-dagger(b), beta I]]
// between the tilde systems; unital and real by construction.
SuperMap tilde_map(const SuperMap& phi);

// Entrywise application on n x n block matrices.
SuperMap amplify(const SuperMap& phi, int n);

// Choi matrix sum_ij E_ij (x) phi(E_ij); PSD iff phi is completely positive.
// Only valid on full matrix algebra domains.
CMatrix choi(const SuperMap& phi);

// Random strictly positive element of Mat_n(V): Hermitian draw H on the
// Hermitian spanning set plus (||H|| + eps) I with eps uniform in [0, 1).
CMatrix sample_positive(const OperatorSpace& v, int n, Rng& rng);

// Keeps block (i, j) of an n x n block matrix, zeroing the rest; this is
// p_i A p_j for the diagonal block projections p_i.
CMatrix block_compress(const CMatrix& a, int n, int i, int j);

// max over basis elements A of Mat_n(V) and all i, j of
// ||Theta(p_i A p_j) - p_i Theta(A) p_j||; zero exactly when Theta acts
// blockwise (Schur action).
double schur_action_defect(const SuperMap& theta, int n);

// Empirical implication check: when Theta fixes every diagonal projection
// p_i and behaves completely positively and contractively on samples, it
// must have zero Schur-action defect and fix the identity.  Failed premises
// give a vacuous pass with an explanatory witness.
Verdict check_prop_F(const SuperMap& theta, int n, int trials, Rng& rng,
                     const Tolerances& tol = {});

// Map on kets induced by an operator: |u> -> |T u>.
SuperMap ket_map_of_operator(const CMatrix& t);

// Span of C and the identity.  C must be adjoint-closed, square, and must
// not already contain I (DomainError("AlreadyUnital")).
OperatorSpace unitise(const OperatorSpace& c);

// Extension of phi to unitise(domain): a + z 1 -> phi(a) + z bound I.  The
// codomain is unitised as needed so the identity is available.
SuperMap extend_cp(const SuperMap& phi, double bound);

// Sampled complete-contraction data: max over amplification levels
// n <= n_max and unit-norm samples of ||phi^(n)(A)||.  A lower bound on the
// cb-norm; never an exact value.
double sampled_cb_norm(const SuperMap& phi, int n_max, int trials, Rng& rng);

// Sampled complete positivity: positivity of amplified outputs on
// sample_positive inputs for n <= n_max.  Requires a system domain.
Verdict sampled_cp_check(const SuperMap& phi, int n_max, int trials, Rng& rng,
                         const Tolerances& tol = {});

// Sampled complete contractivity via amplified norm ratios.
Verdict sampled_cc_check(const SuperMap& phi, int n_max, int trials, Rng& rng,
                         const Tolerances& tol = {});

// Random element of Mat_n(V) with unit operator norm.
CMatrix sample_unit(const OperatorSpace& v, int n, Rng& rng);

}  // namespace qsc
