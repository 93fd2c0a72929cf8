#pragma once

#include <vector>

#include "qsc/numeric.hpp"

namespace qsc {

// Eigendecomposition of a Hermitian matrix: values ascending, columns of
// vectors are the matching orthonormal eigenvectors.
struct EigResult {
  RVector values;
  CMatrix vectors;
};

// Hermiticity defect ||M - M*|| measured entrywise (max modulus).
double herm_defect(const CMatrix& m);

bool is_hermitian(const CMatrix& m, const Tolerances& tol = {});

// Eigendecomposition after symmetrizing (M + M*)/2.  Throws NotHermitian if
// the defect exceeds eig_tol * (1 + max modulus), NonSquare otherwise on
// shape.
EigResult herm_eig(const CMatrix& m, const Tolerances& tol = {});

// Largest singular value.
double op_norm(const CMatrix& m);

// Smallest eigenvalue of a Hermitian matrix.
double min_herm_eig(const CMatrix& m, const Tolerances& tol = {});

// Hermitian with spectrum bounded below by -eig_tol * (1 + op norm).
bool is_psd(const CMatrix& m, const Tolerances& tol = {});

// Spectral square root; eigenvalues within tolerance below zero are clipped
// to zero, values further below raise NotPSD.
CMatrix psd_sqrt(const CMatrix& m, const Tolerances& tol = {});

// Pseudo-inverse square root: eigenvalues at or below the pinv cutoff
// (pinv_tol relative to the largest eigenvalue, with 1 as floor) contribute
// zero instead of blowing up.
CMatrix psd_inv_sqrt(const CMatrix& m, const Tolerances& tol = {});

// Matrix exponential by scaling-and-squaring with a Pade core; 1x1 input
// short-circuits to the scalar exponential.
CMatrix expm(const CMatrix& m);

// Entrywise product; shapes must agree.
CMatrix schur_product(const CMatrix& a, const CMatrix& b);

// Blockwise variant: s and a are partitioned into n x n grids of equal-size
// blocks, and block (i,j) of the result is s_ij * a_ij (operator product).
// s must be (n*p) x (n*q) and a (n*q) x (n*r).
CMatrix block_schur_product(const CMatrix& s, const CMatrix& a, int n);

// Kronecker product.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// chi(u, v) = (|u|^2 + |v|^2)/2 - <u, v>, inner product linear in the second
// argument.  Re chi(u, v) = |u - v|^2 / 2 >= 0 and chi(u, u) = 0.
Complex chi(const CVector& u, const CVector& v);

// Grammian [exp(-t chi(x_i, x_j))]; Hermitian and positive semidefinite for
// every t >= 0, and multiplicative in t under the entrywise product.
CMatrix gram_matrix(const std::vector<CVector>& xs, double t);

// Outcome of factoring [[a, b], [b*, d]]: when the block matrix is PSD,
// contraction holds the unique R with b = a^{1/2} R d^{1/2} supported on the
// ranges of a and d, and ||R|| <= 1; otherwise min_eigenvalue witnesses the
// failure.
struct BlockFactorResult {
  bool psd = false;
  double min_eigenvalue = 0.0;
  CMatrix contraction;
};

BlockFactorResult block_psd_factor(const CMatrix& a, const CMatrix& b,
                                   const CMatrix& d,
                                   const Tolerances& tol = {});

// Largest entry modulus; 0 for empty matrices.
double max_abs(const CMatrix& m);

// Ratio of extreme singular values; infinity when singular.
double cond_number(const CMatrix& m);

}  // namespace qsc
