#include "qsc/semigroup.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qsc/linalg.hpp"

namespace qsc {

namespace {

constexpr double kValueTieTol = 1e-12;

void check_time(double t) {
  if (t < 0.0) throw TimeError("NegativeTime", "semigroups evolve forward only");
}

}  // namespace

SuperMap evolve(const Generator& gen, double t) {
  check_time(t);
  const Eigen::Index dim = gen.space.dim();
  if (gen.coord.rows() != dim || gen.coord.cols() != dim) {
    throw ShapeError("GeneratorShape", "coordinate matrix must be dim x dim");
  }
  return SuperMap(gen.space, gen.space, expm(t * gen.coord));
}

NoisePoints::NoisePoints(std::vector<CVector> points)
    : points_(std::move(points)) {
  if (points_.empty()) {
    throw DomainError("EmptyNoise", "need at least the zero value");
  }
  d_ = static_cast<int>(points_[0].size());
  if (d_ <= 0) throw DomainError("EmptyNoise", "values live in C^d with d >= 1");
  for (const CVector& p : points_) {
    if (p.size() != d_) {
      throw ShapeError("NoiseDim", "all values must share one dimension");
    }
  }
  if (points_[0].norm() > kValueTieTol) {
    throw DomainError("ZeroNotFirst", "index 0 must hold the zero value");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (std::size_t j = i + 1; j < points_.size(); ++j) {
      if ((points_[i] - points_[j]).norm() <= kValueTieTol) {
        throw DomainError("DuplicateValue", "noise values must be distinct");
      }
    }
  }
}

int NoisePoints::index_of(const CVector& x) const {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() == x.size() &&
        (points_[i] - x).norm() <= kValueTieTol) {
      return static_cast<int>(i);
    }
  }
  throw DomainError("ValueNotInT", "value is not one of the noise points");
}

AssociatedFamily::AssociatedFamily(OperatorSpace space, NoisePoints points,
                                   std::vector<std::vector<CMatrix>> gens)
    : space_(std::move(space)), points_(std::move(points)),
      gens_(std::move(gens)) {
  const std::size_t n = static_cast<std::size_t>(points_.size());
  const Eigen::Index dim = space_.dim();
  if (gens_.size() != n) {
    throw ShapeError("GeneratorGrid", "need one generator row per noise value");
  }
  for (const auto& row : gens_) {
    if (row.size() != n) {
      throw ShapeError("GeneratorGrid", "need one generator per value pair");
    }
    for (const CMatrix& g : row) {
      if (g.rows() != dim || g.cols() != dim) {
        throw ShapeError("GeneratorShape", "coordinate matrix must be dim x dim");
      }
    }
  }
}

const CMatrix& AssociatedFamily::gen_coord(int i, int j) const {
  if (i < 0 || j < 0 || i >= points_.size() || j >= points_.size()) {
    throw DomainError("IndexNotInT", "component index out of range");
  }
  return gens_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

Generator AssociatedFamily::generator(int i, int j) const {
  return Generator{space_, gen_coord(i, j)};
}

SuperMap AssociatedFamily::component(int i, int j, double t) const {
  return evolve(generator(i, j), t);
}

OperatorFamily::OperatorFamily(int hilbert_dim, NoisePoints points,
                               std::vector<std::vector<CMatrix>> gens)
    : hilbert_dim_(hilbert_dim), points_(std::move(points)),
      gens_(std::move(gens)) {
  if (hilbert_dim_ <= 0) {
    throw ShapeError("HilbertDim", "operator families act on C^m with m >= 1");
  }
  const std::size_t n = static_cast<std::size_t>(points_.size());
  if (gens_.size() != n) {
    throw ShapeError("GeneratorGrid", "need one generator row per noise value");
  }
  for (const auto& row : gens_) {
    if (row.size() != n) {
      throw ShapeError("GeneratorGrid", "need one generator per value pair");
    }
    for (const CMatrix& g : row) {
      if (g.rows() != hilbert_dim_ || g.cols() != hilbert_dim_) {
        throw ShapeError("GeneratorShape", "generators must be m x m");
      }
    }
  }
}

const CMatrix& OperatorFamily::gen(int i, int j) const {
  if (i < 0 || j < 0 || i >= points_.size() || j >= points_.size()) {
    throw DomainError("IndexNotInT", "component index out of range");
  }
  return gens_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
}

CMatrix OperatorFamily::component(int i, int j, double t) const {
  check_time(t);
  return expm(t * gen(i, j));
}

namespace {

// Shared body of schur_tuple / global_semigroup: block-diagonal coordinate
// with expm(t L_{kl}) on block (k, l), matching the block-major basis order
// of mat_space.
SuperMap labelled_semigroup(const AssociatedFamily& fam,
                            const std::vector<int>& labels, double t) {
  check_time(t);
  const int n = static_cast<int>(labels.size());
  if (n == 0) throw DomainError("EmptyTuple", "need at least one value");
  const int nt = fam.points().size();
  for (int idx : labels) {
    if (idx < 0 || idx >= nt) {
      throw DomainError("IndexNotInT", "tuple entry out of range");
    }
  }
  OperatorSpace big = OperatorSpace::mat_space(fam.space(), n);
  const Eigen::Index dim = fam.space().dim();
  CMatrix coord = CMatrix::Zero(big.dim(), big.dim());
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const Eigen::Index at = (static_cast<Eigen::Index>(k) * n + l) * dim;
      coord.block(at, at, dim, dim) =
          expm(t * fam.gen_coord(labels[static_cast<std::size_t>(k)],
                                 labels[static_cast<std::size_t>(l)]));
    }
  }
  return SuperMap(big, big, std::move(coord));
}

}  // namespace

SuperMap schur_tuple(const AssociatedFamily& fam, const std::vector<int>& xs,
                     double t) {
  return labelled_semigroup(fam, xs, t);
}

SuperMap global_semigroup(const AssociatedFamily& fam,
                          const std::vector<int>& gamma, double t) {
  return labelled_semigroup(fam, gamma, t);
}

Generator global_generator(const AssociatedFamily& fam,
                           const std::vector<int>& gamma) {
  const int n = static_cast<int>(gamma.size());
  if (n == 0) throw DomainError("EmptyTuple", "need at least one value");
  const int nt = fam.points().size();
  for (int idx : gamma) {
    if (idx < 0 || idx >= nt) {
      throw DomainError("IndexNotInT", "tuple entry out of range");
    }
  }
  OperatorSpace big = OperatorSpace::mat_space(fam.space(), n);
  const Eigen::Index dim = fam.space().dim();
  CMatrix coord = CMatrix::Zero(big.dim(), big.dim());
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const Eigen::Index at = (static_cast<Eigen::Index>(k) * n + l) * dim;
      coord.block(at, at, dim, dim) =
          fam.gen_coord(gamma[static_cast<std::size_t>(k)],
                        gamma[static_cast<std::size_t>(l)]);
    }
  }
  return Generator{std::move(big), std::move(coord)};
}

AssociatedFamily tilde_family(const AssociatedFamily& fam) {
  const OperatorSpace tilde = tilde_system(fam.space());
  const Eigen::Index dim = fam.space().dim();
  const int n = fam.points().size();
  std::vector<std::vector<CMatrix>> gens(
      static_cast<std::size_t>(n),
      std::vector<CMatrix>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex rate = -chi(fam.points()[i], fam.points()[j]);
      CMatrix g = CMatrix::Zero(tilde.dim(), tilde.dim());
      g(0, 0) = rate;
      g(1, 1) = rate;
      g.block(2, 2, dim, dim) = fam.gen_coord(i, j);
      g.block(2 + dim, 2 + dim, dim, dim) = fam.gen_coord(j, i).conjugate();
      gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          std::move(g);
    }
  }
  return AssociatedFamily(tilde, fam.points(), std::move(gens));
}

AssociatedFamily trivial_family(const OperatorSpace& v,
                                const NoisePoints& points) {
  const Eigen::Index dim = v.dim();
  const int n = points.size();
  std::vector<std::vector<CMatrix>> gens(
      static_cast<std::size_t>(n),
      std::vector<CMatrix>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          -chi(points[i], points[j]) * CMatrix::Identity(dim, dim);
    }
  }
  return AssociatedFamily(v, points, std::move(gens));
}

AssociatedFamily product_family(const Generator& s, const NoisePoints& points) {
  const OperatorSpace& v = s.space;
  const Eigen::Index dim = v.dim();
  if (s.coord.rows() != dim || s.coord.cols() != dim) {
    throw ShapeError("GeneratorShape", "coordinate matrix must be dim x dim");
  }
  for (double t : {0.1, 0.5, 1.0}) {
    SuperMap st = evolve(s, t);
    if (v.is_system()) {
      const CMatrix eye = CMatrix::Identity(v.m_out(), v.m_in());
      if (max_abs(st.apply(eye) - eye) > 1e-8) {
        throw DomainError("NotUnitalCP", "semigroup does not fix the identity");
      }
    }
    if (v.is_full_algebra()) {
      const CMatrix c = choi(st);
      const double floor = -1e-8 * (1.0 + max_abs(c));
      if (min_herm_eig(c) < floor) {
        throw DomainError("NotUnitalCP", "semigroup is not completely positive");
      }
    }
  }
  const int n = points.size();
  std::vector<std::vector<CMatrix>> gens(
      static_cast<std::size_t>(n),
      std::vector<CMatrix>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          s.coord - chi(points[i], points[j]) * CMatrix::Identity(dim, dim);
    }
  }
  return AssociatedFamily(v, points, std::move(gens));
}

AssociatedFamily contraction_scaled(const AssociatedFamily& fam, double c) {
  const Eigen::Index dim = fam.space().dim();
  const int n = fam.points().size();
  std::vector<std::vector<CMatrix>> gens(
      static_cast<std::size_t>(n),
      std::vector<CMatrix>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          fam.gen_coord(i, j) - c * CMatrix::Identity(dim, dim);
    }
  }
  return AssociatedFamily(fam.space(), fam.points(), std::move(gens));
}

CounterexampleFamily counterexample_family(double scale) {
  OperatorSpace space = OperatorSpace::mat_space(OperatorSpace::scalar(), 2);
  // Psi = Phi - id on the unit basis E00, E01, E10, E11, where Phi swaps the
  // two diagonal entries and annihilates the off-diagonal ones.
  CMatrix psi = CMatrix::Zero(4, 4);
  psi(0, 0) = -1.0;
  psi(3, 0) = 1.0;
  psi(1, 1) = -1.0;
  psi(2, 2) = -1.0;
  psi(0, 3) = 1.0;
  psi(3, 3) = -1.0;
  CVector zero = CVector::Zero(1);
  CVector one(1);
  one(0) = 1.0;
  NoisePoints points({zero, one});
  return CounterexampleFamily{Generator{std::move(space), scale * psi},
                              std::move(points), scale};
}

OperatorFamily weyl_scalar_family(const CVector& c, const NoisePoints& points) {
  if (c.size() != points.d()) {
    throw ShapeError("NoiseDim", "amplitude must live in the same C^d");
  }
  const int n = points.size();
  const Complex iunit(0.0, 1.0);
  std::vector<std::vector<CMatrix>> gens(
      static_cast<std::size_t>(n),
      std::vector<CMatrix>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CVector& x = points[i];
      const CVector& y = points[j];
      const Complex rate =
          -iunit * std::imag(c.dot(y)) - chi(x, CVector(c + y));
      CMatrix g(1, 1);
      g(0, 0) = rate;
      gens[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g;
    }
  }
  return OperatorFamily(1, points, std::move(gens));
}

}  // namespace qsc
