#include "qsc/opspace.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace qsc {

namespace {

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, int rows, int cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CMatrix unit_matrix(int rows, int cols, int i, int j) {
  CMatrix m = CMatrix::Zero(rows, cols);
  m(i, j) = 1.0;
  return m;
}

}  // namespace

OperatorSpace::OperatorSpace(std::vector<CMatrix> basis, const Tolerances& tol)
    : basis_(std::move(basis)) {
  if (basis_.empty()) {
    throw ShapeError("ShapeMismatch", "operator space needs a nonempty basis");
  }
  m_out_ = static_cast<int>(basis_.front().rows());
  m_in_ = static_cast<int>(basis_.front().cols());
  for (const CMatrix& b : basis_) {
    if (b.rows() != m_out_ || b.cols() != m_in_) {
      throw ShapeError("ShapeMismatch", "basis elements have mixed shapes");
    }
  }
  basis_mat_.resize(m_out_ * m_in_, dim());
  for (int k = 0; k < dim(); ++k) basis_mat_.col(k) = vec(basis_[k]);
  solver_.setThreshold(tol.pinv_tol);
  solver_.compute(basis_mat_);
  if (solver_.rank() < dim()) {
    throw DomainError("DependentBasis",
                      "basis spans only " + std::to_string(solver_.rank()) +
                          " of " + std::to_string(dim()) + " dimensions");
  }

  is_adjoint_closed_ = m_out_ == m_in_;
  for (const CMatrix& b : basis_) {
    if (!is_adjoint_closed_) break;
    const CMatrix adj = b.adjoint();
    if (residual(adj) > tol.eq_tol * (1.0 + adj.norm())) {
      is_adjoint_closed_ = false;
    }
  }
  if (m_out_ == m_in_ && is_adjoint_closed_) {
    const CMatrix id = CMatrix::Identity(m_out_, m_in_);
    is_system_ = residual(id) <= tol.eq_tol * (1.0 + id.norm());
  }
  is_full_algebra_ = dim() == m_out_ * m_in_;

  // Hermitian spanning set for positive-element sampling.
  for (const CMatrix& b : basis_) {
    const CMatrix sym = b + b.adjoint();
    const CMatrix asym = Complex(0, 1) * (b - b.adjoint());
    if (max_abs(sym) > tol.eq_tol) herm_span_.push_back(sym);
    if (max_abs(asym) > tol.eq_tol) herm_span_.push_back(asym);
  }
}

OperatorSpace OperatorSpace::full_algebra(int m) {
  std::vector<CMatrix> basis;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) basis.push_back(unit_matrix(m, m, i, j));
  }
  return OperatorSpace(std::move(basis));
}

OperatorSpace OperatorSpace::scalar() { return full_algebra(1); }

OperatorSpace OperatorSpace::ket_space(int m) {
  std::vector<CMatrix> basis;
  for (int i = 0; i < m; ++i) basis.push_back(unit_matrix(m, 1, i, 0));
  return OperatorSpace(std::move(basis));
}

OperatorSpace OperatorSpace::mat_space(const OperatorSpace& v, int n) {
  if (n < 1) {
    throw DomainError("BadBlockCount", "mat_space needs n >= 1");
  }
  std::vector<CMatrix> basis;
  basis.reserve(static_cast<std::size_t>(n) * n * v.dim());
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      const CMatrix cell = unit_matrix(n, n, row, col);
      for (const CMatrix& b : v.basis()) basis.push_back(kron(cell, b));
    }
  }
  return OperatorSpace(std::move(basis));
}

CVector OperatorSpace::coords(const CMatrix& m) const {
  if (m.rows() != m_out_ || m.cols() != m_in_) {
    throw ShapeError("ShapeMismatch",
                     "coordinates of a " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " matrix in a " +
                         std::to_string(m_out_) + "x" + std::to_string(m_in_) +
                         " space");
  }
  return solver_.solve(vec(m));
}

double OperatorSpace::residual(const CMatrix& m) const {
  const CVector c = coords(m);
  return (basis_mat_ * c - vec(m)).norm();
}

bool OperatorSpace::contains(const CMatrix& m, const Tolerances& tol) const {
  return residual(m) <= tol.eq_tol * (1.0 + m.norm());
}

CMatrix OperatorSpace::reconstruct(const CVector& c) const {
  if (c.size() != dim()) {
    throw ShapeError("DimensionMismatch",
                     "coordinate vector of length " + std::to_string(c.size()) +
                         " against dimension " + std::to_string(dim()));
  }
  return unvec(basis_mat_ * c, m_out_, m_in_);
}

bool same_space(const OperatorSpace& a, const OperatorSpace& b) {
  if (a.m_out() != b.m_out() || a.m_in() != b.m_in() || a.dim() != b.dim()) {
    return false;
  }
  for (int k = 0; k < a.dim(); ++k) {
    if (max_abs(a.basis()[k] - b.basis()[k]) > 1e-12) return false;
  }
  return true;
}

SuperMap::SuperMap(OperatorSpace domain, OperatorSpace codomain, CMatrix coord)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      coord_(std::move(coord)) {
  if (coord_.rows() != codomain_.dim() || coord_.cols() != domain_.dim()) {
    throw ShapeError("ShapeMismatch",
                     "coordinate matrix " + std::to_string(coord_.rows()) +
                         "x" + std::to_string(coord_.cols()) +
                         " does not match spaces of dimension " +
                         std::to_string(codomain_.dim()) + " and " +
                         std::to_string(domain_.dim()));
  }
}

SuperMap SuperMap::identity(const OperatorSpace& v) {
  return SuperMap(v, v, CMatrix::Identity(v.dim(), v.dim()));
}

SuperMap SuperMap::zero(const OperatorSpace& domain,
                        const OperatorSpace& codomain) {
  return SuperMap(domain, codomain,
                  CMatrix::Zero(codomain.dim(), domain.dim()));
}

CMatrix SuperMap::apply(const CMatrix& m, const Tolerances& tol) const {
  if (!domain_.contains(m, tol)) {
    throw DomainError("NotInSpace",
                      "argument lies outside the domain span (residual " +
                          std::to_string(domain_.residual(m)) + ")");
  }
  return codomain_.reconstruct(coord_ * domain_.coords(m));
}

SuperMap compose(const SuperMap& outer, const SuperMap& inner) {
  if (!same_space(outer.domain(), inner.codomain())) {
    throw DomainError("SpaceMismatch",
                      "composition needs inner codomain = outer domain");
  }
  return SuperMap(inner.domain(), outer.codomain(),
                  outer.coord_matrix() * inner.coord_matrix());
}

SuperMap add(const SuperMap& a, const SuperMap& b) {
  if (!same_space(a.domain(), b.domain()) ||
      !same_space(a.codomain(), b.codomain())) {
    throw DomainError("SpaceMismatch", "adding maps between different spaces");
  }
  return SuperMap(a.domain(), a.codomain(),
                  a.coord_matrix() + b.coord_matrix());
}

SuperMap scale(Complex z, const SuperMap& a) {
  return SuperMap(a.domain(), a.codomain(), z * a.coord_matrix());
}

MembershipResult membership(const OperatorSpace& v, const CMatrix& m,
                            const Tolerances& tol) {
  MembershipResult out;
  out.residual = v.residual(m);
  out.member = out.residual <= tol.eq_tol * (1.0 + m.norm());
  return out;
}

OperatorSpace adjoint_space(const OperatorSpace& v) {
  std::vector<CMatrix> basis;
  basis.reserve(v.dim());
  for (const CMatrix& b : v.basis()) basis.push_back(b.adjoint());
  return OperatorSpace(std::move(basis));
}

SuperMap adjoint_map(const SuperMap& phi) {
  return SuperMap(adjoint_space(phi.domain()), adjoint_space(phi.codomain()),
                  phi.coord_matrix().conjugate());
}

OperatorSpace tilde_system(const OperatorSpace& v) {
  const int p = v.m_out();
  const int q = v.m_in();
  const int side = p + q;
  std::vector<CMatrix> basis;
  CMatrix corner_p = CMatrix::Zero(side, side);
  corner_p.topLeftCorner(p, p) = CMatrix::Identity(p, p);
  CMatrix corner_q = CMatrix::Zero(side, side);
  corner_q.bottomRightCorner(q, q) = CMatrix::Identity(q, q);
  basis.push_back(std::move(corner_p));
  basis.push_back(std::move(corner_q));
  for (const CMatrix& a : v.basis()) {
    CMatrix upper = CMatrix::Zero(side, side);
    upper.topRightCorner(p, q) = a;
    basis.push_back(std::move(upper));
  }
  for (const CMatrix& a : v.basis()) {
    CMatrix lower = CMatrix::Zero(side, side);
    lower.bottomLeftCorner(q, p) = a.adjoint();
    basis.push_back(std::move(lower));
  }
  return OperatorSpace(std::move(basis));
}

SuperMap tilde_map(const SuperMap& phi) {
  const int dv = phi.domain().dim();
  const int dw = phi.codomain().dim();
  CMatrix coord = CMatrix::Zero(2 + 2 * dw, 2 + 2 * dv);
  coord(0, 0) = 1.0;
  coord(1, 1) = 1.0;
  coord.block(2, 2, dw, dv) = phi.coord_matrix();
  coord.block(2 + dw, 2 + dv, dw, dv) = phi.coord_matrix().conjugate();
  return SuperMap(tilde_system(phi.domain()), tilde_system(phi.codomain()),
                  std::move(coord));
}

SuperMap amplify(const SuperMap& phi, int n) {
  if (n < 1) {
    throw DomainError("BadBlockCount", "amplification level must be >= 1");
  }
  if (n == 1) return phi;
  return SuperMap(OperatorSpace::mat_space(phi.domain(), n),
                  OperatorSpace::mat_space(phi.codomain(), n),
                  kron(CMatrix::Identity(n * n, n * n), phi.coord_matrix()));
}

CMatrix choi(const SuperMap& phi) {
  const OperatorSpace& dom = phi.domain();
  if (!dom.is_full_algebra() || dom.m_out() != dom.m_in()) {
    throw DomainError("NotFullAlgebra",
                      "Choi matrix needs a full square matrix algebra domain");
  }
  const int m = dom.m_out();
  const int p = phi.codomain().m_out();
  const int q = phi.codomain().m_in();
  CMatrix out = CMatrix::Zero(m * p, m * q);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      out.block(i * p, j * q, p, q) = phi.apply(unit_matrix(m, m, i, j));
    }
  }
  return out;
}

CMatrix sample_positive(const OperatorSpace& v, int n, Rng& rng) {
  if (!v.is_system()) {
    throw DomainError("NotASystem", "positive sampling needs an operator system");
  }
  const OperatorSpace space =
      n == 1 ? v : OperatorSpace::mat_space(v, n);
  CMatrix h = CMatrix::Zero(space.m_out(), space.m_in());
  for (const CMatrix& e : space.hermitian_spanning_set()) {
    h += rng.normal() * e;
  }
  const double eps = rng.uniform();
  return h + (op_norm(h) + eps) * CMatrix::Identity(h.rows(), h.cols());
}

CMatrix block_compress(const CMatrix& a, int n, int i, int j) {
  if (n < 1 || a.rows() % n != 0 || a.cols() % n != 0) {
    throw ShapeError("ShapeMismatch", "block grid does not divide the matrix");
  }
  const Eigen::Index p = a.rows() / n;
  const Eigen::Index q = a.cols() / n;
  CMatrix out = CMatrix::Zero(a.rows(), a.cols());
  out.block(i * p, j * q, p, q) = a.block(i * p, j * q, p, q);
  return out;
}

double schur_action_defect(const SuperMap& theta, int n) {
  if (!same_space(theta.domain(), theta.codomain())) {
    throw DomainError("SpaceMismatch", "Schur-action defect needs an endomap");
  }
  double worst = 0.0;
  for (const CMatrix& a : theta.domain().basis()) {
    const CMatrix image = theta.apply(a);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const CMatrix lhs = theta.apply(block_compress(a, n, i, j));
        const CMatrix rhs = block_compress(image, n, i, j);
        worst = std::max(worst, op_norm(lhs - rhs));
      }
    }
  }
  return worst;
}

Verdict check_prop_F(const SuperMap& theta, int n, int trials, Rng& rng,
                     const Tolerances& tol) {
  const OperatorSpace& space = theta.domain();
  const double threshold = 100.0 * tol.eq_tol;
  Verdict verdict;
  verdict.samples_used = 0;

  const int m = space.m_out() / n;
  double premise_defect = 0.0;
  for (int i = 0; i < n; ++i) {
    CMatrix p = CMatrix::Zero(space.m_out(), space.m_in());
    p.block(i * m, i * m, m, m) = CMatrix::Identity(m, m);
    premise_defect = std::max(premise_defect, op_norm(theta.apply(p) - p));
  }
  if (premise_defect > threshold) {
    verdict.passed = true;
    verdict.worst_violation = 0.0;
    std::ostringstream os;
    os << "premise fails: diagonal projections move by " << premise_defect
       << "; implication is vacuous";
    verdict.witness = os.str();
    return verdict;
  }

  for (int trial = 0; trial < trials; ++trial) {
    const CMatrix pos = sample_positive(space, 1, rng);
    ++verdict.samples_used;
    if (!is_psd(theta.apply(pos), tol)) {
      verdict.passed = true;
      verdict.witness = "premise fails: a sampled positive maps to a "
                        "non-positive output; implication is vacuous";
      return verdict;
    }
    const CMatrix unit = sample_unit(space, 1, rng);
    ++verdict.samples_used;
    if (op_norm(theta.apply(unit)) > 1.0 + threshold) {
      verdict.passed = true;
      verdict.witness = "premise fails: sampled norm exceeds 1; "
                        "implication is vacuous";
      return verdict;
    }
  }

  const double schur = schur_action_defect(theta, n);
  const CMatrix id = CMatrix::Identity(space.m_out(), space.m_in());
  const double unital = op_norm(theta.apply(id) - id);
  verdict.worst_violation = std::max(schur, unital);
  verdict.passed = verdict.worst_violation <= threshold;
  std::ostringstream os;
  os << "premises hold; schur_action_defect=" << schur
     << " unitality_defect=" << unital;
  verdict.witness = os.str();
  return verdict;
}

SuperMap ket_map_of_operator(const CMatrix& t) {
  if (t.rows() != t.cols()) {
    throw ShapeError("NonSquare", "ket map needs a square operator");
  }
  const OperatorSpace kets =
      OperatorSpace::ket_space(static_cast<int>(t.rows()));
  return SuperMap(kets, kets, t);
}

OperatorSpace unitise(const OperatorSpace& c) {
  if (c.m_out() != c.m_in()) {
    throw ShapeError("NonSquare", "unitisation needs square matrices");
  }
  if (!c.is_adjoint_closed()) {
    throw DomainError("NotAdjointClosed", "unitisation needs a *-closed span");
  }
  const CMatrix id = CMatrix::Identity(c.m_out(), c.m_in());
  if (c.contains(id)) {
    throw DomainError("AlreadyUnital", "the identity already lies in the span");
  }
  std::vector<CMatrix> basis = c.basis();
  basis.push_back(id);
  return OperatorSpace(std::move(basis));
}

SuperMap extend_cp(const SuperMap& phi, double bound) {
  const OperatorSpace dom = unitise(phi.domain());
  const CMatrix id_out =
      CMatrix::Identity(phi.codomain().m_out(), phi.codomain().m_in());
  const OperatorSpace cod = phi.codomain().contains(id_out)
                                ? phi.codomain()
                                : unitise(phi.codomain());
  CMatrix coord(cod.dim(), dom.dim());
  for (int j = 0; j < phi.domain().dim(); ++j) {
    coord.col(j) = cod.coords(phi.apply(phi.domain().basis()[j]));
  }
  coord.col(dom.dim() - 1) = cod.coords(bound * id_out);
  return SuperMap(std::move(dom), cod, std::move(coord));
}

CMatrix sample_unit(const OperatorSpace& v, int n, Rng& rng) {
  const OperatorSpace space =
      n == 1 ? v : OperatorSpace::mat_space(v, n);
  CMatrix out = CMatrix::Zero(space.m_out(), space.m_in());
  for (const CMatrix& b : space.basis()) out += rng.cnormal() * b;
  const double norm = op_norm(out);
  if (norm < 1e-14) return sample_unit(v, n, rng);
  return out / norm;
}

double sampled_cb_norm(const SuperMap& phi, int n_max, int trials, Rng& rng) {
  double best = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const SuperMap amp = amplify(phi, n);
    for (int trial = 0; trial < trials; ++trial) {
      const CMatrix a = sample_unit(phi.domain(), n, rng);
      best = std::max(best, op_norm(amp.apply(a)));
    }
  }
  return best;
}

Verdict sampled_cp_check(const SuperMap& phi, int n_max, int trials, Rng& rng,
                         const Tolerances& tol) {
  Verdict verdict;
  verdict.passed = true;
  for (int n = 1; n <= n_max; ++n) {
    const SuperMap amp = amplify(phi, n);
    for (int trial = 0; trial < trials; ++trial) {
      const CMatrix pos = sample_positive(phi.domain(), n, rng);
      const CMatrix out = amp.apply(pos);
      ++verdict.samples_used;
      const double low = min_herm_eig(out, tol);
      const double violation = std::max(0.0, -low);
      if (violation > verdict.worst_violation) {
        verdict.worst_violation = violation;
        std::ostringstream os;
        os << "n=" << n << " trial=" << trial << " min_eig=" << low;
        verdict.witness = os.str();
      }
      if (low < -tol.eig_tol * (1.0 + max_abs(out))) verdict.passed = false;
    }
  }
  return verdict;
}

Verdict sampled_cc_check(const SuperMap& phi, int n_max, int trials, Rng& rng,
                         const Tolerances& tol) {
  Verdict verdict;
  verdict.passed = true;
  for (int n = 1; n <= n_max; ++n) {
    const SuperMap amp = amplify(phi, n);
    for (int trial = 0; trial < trials; ++trial) {
      const CMatrix a = sample_unit(phi.domain(), n, rng);
      const double out = op_norm(amp.apply(a));
      ++verdict.samples_used;
      const double violation = std::max(0.0, out - 1.0);
      if (violation > verdict.worst_violation) {
        verdict.worst_violation = violation;
        std::ostringstream os;
        os << "n=" << n << " trial=" << trial << " norm=" << out;
        verdict.witness = os.str();
      }
      if (violation > 100.0 * tol.eq_tol) verdict.passed = false;
    }
  }
  return verdict;
}

}  // namespace qsc
