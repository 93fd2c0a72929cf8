#include "qsc/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <string>

namespace qsc {

namespace {

void require_square(const CMatrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw ShapeError("NonSquare", std::string(op) + " needs a square matrix, got " +
                                      std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()));
  }
}

double eig_floor(const CMatrix& m, const Tolerances& tol) {
  return tol.eig_tol * (1.0 + max_abs(m));
}

}  // namespace

double max_abs(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double herm_defect(const CMatrix& m) {
  return max_abs(m - m.adjoint());
}

bool is_hermitian(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) return false;
  return herm_defect(m) <= eig_floor(m, tol);
}

EigResult herm_eig(const CMatrix& m, const Tolerances& tol) {
  require_square(m, "herm_eig");
  const double defect = herm_defect(m);
  if (defect > eig_floor(m, tol)) {
    throw NotHermitianError("hermiticity defect " + std::to_string(defect),
                            defect);
  }
  const CMatrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw SingularError("EigFailure", "self-adjoint eigensolver did not converge");
  }
  return EigResult{solver.eigenvalues(), solver.eigenvectors()};
}

double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double min_herm_eig(const CMatrix& m, const Tolerances& tol) {
  return herm_eig(m, tol).values.minCoeff();
}

bool is_psd(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) return false;
  if (herm_defect(m) > eig_floor(m, tol)) return false;
  return min_herm_eig(m, tol) >= -eig_floor(m, tol);
}

CMatrix psd_sqrt(const CMatrix& m, const Tolerances& tol) {
  const EigResult eig = herm_eig(m, tol);
  const double floor = eig_floor(m, tol);
  RVector vals = eig.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -floor) {
      throw NotPsdError("NotPSD", "eigenvalue " + std::to_string(vals(i)),
                        vals(i));
    }
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return eig.vectors * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         eig.vectors.adjoint();
}

CMatrix psd_inv_sqrt(const CMatrix& m, const Tolerances& tol) {
  const EigResult eig = herm_eig(m, tol);
  const double floor = eig_floor(m, tol);
  const double top = eig.values.size() ? eig.values.maxCoeff() : 0.0;
  const double cutoff = tol.pinv_tol * std::max(1.0, top);
  RVector vals = eig.values;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -floor) {
      throw NotPsdError("NotPSD", "eigenvalue " + std::to_string(vals(i)),
                        vals(i));
    }
    vals(i) = vals(i) > cutoff ? 1.0 / std::sqrt(vals(i)) : 0.0;
  }
  return eig.vectors * vals.asDiagonal().toDenseMatrix().cast<Complex>() *
         eig.vectors.adjoint();
}

CMatrix expm(const CMatrix& m) {
  require_square(m, "expm");
  if (m.rows() == 1) {
    CMatrix out(1, 1);
    out(0, 0) = std::exp(m(0, 0));
    return out;
  }
  return m.exp();
}

CMatrix schur_product(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("ShapeMismatch",
                     "schur_product shapes " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " +
                         std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
  }
  return a.cwiseProduct(b);
}

CMatrix block_schur_product(const CMatrix& s, const CMatrix& a, int n) {
  if (n <= 0 || s.rows() % n != 0 || s.cols() % n != 0 || a.rows() % n != 0 ||
      a.cols() % n != 0) {
    throw ShapeError("ShapeMismatch", "block grid " + std::to_string(n) +
                                          " does not divide the operands");
  }
  const Eigen::Index p = s.rows() / n;
  const Eigen::Index q = s.cols() / n;
  const Eigen::Index r = a.cols() / n;
  if (a.rows() / n != q) {
    throw ShapeError("ShapeMismatch",
                     "inner block sizes disagree: " + std::to_string(q) +
                         " vs " + std::to_string(a.rows() / n));
  }
  CMatrix out = CMatrix::Zero(n * p, n * r);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.block(i * p, j * r, p, r) =
          s.block(i * p, j * q, p, q) * a.block(i * q, j * r, q, r);
    }
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Complex chi(const CVector& u, const CVector& v) {
  if (u.size() != v.size()) {
    throw ShapeError("DimensionMismatch", "chi over C^" + std::to_string(u.size()) +
                                              " vs C^" + std::to_string(v.size()));
  }
  return 0.5 * (u.squaredNorm() + v.squaredNorm()) - u.dot(v);
}

CMatrix gram_matrix(const std::vector<CVector>& xs, double t) {
  if (t < 0.0) {
    throw TimeError("NegativeTime", "gram_matrix at t = " + std::to_string(t));
  }
  const int n = static_cast<int>(xs.size());
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = std::exp(-t * chi(xs[i], xs[j]));
    }
  }
  return out;
}

BlockFactorResult block_psd_factor(const CMatrix& a, const CMatrix& b,
                                   const CMatrix& d, const Tolerances& tol) {
  require_square(a, "block_psd_factor");
  require_square(d, "block_psd_factor");
  if (b.rows() != a.rows() || b.cols() != d.rows()) {
    throw ShapeError("ShapeMismatch",
                     "off-diagonal block must be " + std::to_string(a.rows()) +
                         "x" + std::to_string(d.rows()));
  }
  CMatrix block(a.rows() + d.rows(), a.cols() + d.cols());
  block.topLeftCorner(a.rows(), a.cols()) = a;
  block.topRightCorner(a.rows(), d.cols()) = b;
  block.bottomLeftCorner(d.rows(), a.cols()) = b.adjoint();
  block.bottomRightCorner(d.rows(), d.cols()) = d;

  BlockFactorResult result;
  result.min_eigenvalue = min_herm_eig(block, tol);
  if (result.min_eigenvalue < -eig_floor(block, tol)) {
    result.psd = false;
    return result;
  }
  result.psd = true;
  result.contraction = psd_inv_sqrt(a, tol) * b * psd_inv_sqrt(d, tol);
  return result;
}

double cond_number(const CMatrix& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / smallest;
}

}  // namespace qsc
