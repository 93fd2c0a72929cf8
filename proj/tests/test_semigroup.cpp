#include "qsc/semigroup.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "qsc/linalg.hpp"
#include "qsc/opspace.hpp"

using namespace qsc;

namespace {

const double kGrid[] = {0.0, 0.1, 0.5, 1.0, 2.0};

CVector scalar_point(Complex z) {
  CVector v(1);
  v(0) = z;
  return v;
}

NoisePoints three_points() {
  return NoisePoints({scalar_point(0.0), scalar_point(1.0),
                      scalar_point(Complex(0.0, 1.0))});
}

// Dephasing generator on Mat_2: a -> Z a Z - a, diagonal in the unit basis.
Generator dephasing_generator() {
  CMatrix coord = CMatrix::Zero(4, 4);
  coord(1, 1) = -2.0;
  coord(2, 2) = -2.0;
  return Generator{OperatorSpace::full_algebra(2), coord};
}

void check_semigroup_law(const AssociatedFamily& fam, int i, int j) {
  for (double s : kGrid) {
    for (double t : kGrid) {
      const CMatrix lhs = fam.component(i, j, s + t).coord_matrix();
      const CMatrix rhs = fam.component(i, j, s).coord_matrix() *
                          fam.component(i, j, t).coord_matrix();
      CHECK(max_abs(lhs - rhs) <= 1e-10);
    }
  }
}

}  // namespace

TEST_CASE("noise point lists are validated") {
  CHECK_THROWS_AS(NoisePoints({scalar_point(1.0)}), DomainError);
  CHECK_THROWS_AS(NoisePoints({scalar_point(0.0), scalar_point(1.0),
                               scalar_point(1.0)}),
                  DomainError);
  CHECK_THROWS_AS(NoisePoints(std::vector<CVector>{}), DomainError);
  CVector two = CVector::Zero(2);
  CHECK_THROWS_AS(NoisePoints({scalar_point(0.0), two}), ShapeError);

  NoisePoints pts = three_points();
  CHECK(pts.d() == 1);
  CHECK(pts.size() == 3);
  CHECK(pts.index_of(scalar_point(Complex(0.0, 1.0))) == 2);
  CHECK_THROWS_AS(pts.index_of(scalar_point(2.0)), DomainError);
}

TEST_CASE("evolve exponentiates the generator coordinates") {
  OperatorSpace v = OperatorSpace::full_algebra(2);
  Generator gen{v, CMatrix::Zero(4, 4)};
  CHECK(max_abs(evolve(gen, 1.3).coord_matrix() - CMatrix::Identity(4, 4)) <=
        1e-14);

  Generator decay{v, -0.7 * CMatrix::Identity(4, 4)};
  const CMatrix c = evolve(decay, 2.0).coord_matrix();
  CHECK(std::abs(c(0, 0) - std::exp(-1.4)) <= 1e-14);
  CHECK(max_abs(c - std::exp(-1.4) * CMatrix::Identity(4, 4)) <= 1e-14);

  CHECK_THROWS_AS(evolve(gen, -0.1), TimeError);
  CHECK_THROWS_AS(evolve(Generator{v, CMatrix::Zero(3, 3)}, 1.0), ShapeError);
}

TEST_CASE("trivial family components are frozen scalings") {
  OperatorSpace v = OperatorSpace::full_algebra(2);
  AssociatedFamily fam = trivial_family(v, three_points());

  CHECK(max_abs(fam.component(0, 0, 1.7).coord_matrix() -
                CMatrix::Identity(4, 4)) <= 1e-13);

  // chi(0, 1) = 1/2, so the (0,1) component at t = 1 scales by e^{-1/2}.
  const CMatrix c01 = fam.component(0, 1, 1.0).coord_matrix();
  CHECK(max_abs(c01 - 0.60653065971263342 * CMatrix::Identity(4, 4)) <= 1e-13);

  // chi(1, i) = 1 - i, so the (1,2) component at t = 1 scales by
  // e^{-1} (cos 1 + i sin 1); the (2,1) component carries the conjugate.
  const Complex z12 = fam.component(1, 2, 1.0).coord_matrix()(0, 0);
  CHECK(std::abs(z12.real() - 0.19876611034641298) <= 1e-14);
  CHECK(std::abs(z12.imag() - 0.30955987565311222) <= 1e-14);
  const Complex z21 = fam.component(2, 1, 1.0).coord_matrix()(0, 0);
  CHECK(std::abs(z21 - std::conj(z12)) <= 1e-15);

  CHECK_THROWS_AS(fam.component(0, 3, 1.0), DomainError);
  CHECK_THROWS_AS(fam.component(-1, 0, 1.0), DomainError);
}

TEST_CASE("semigroup law holds on the time grid") {
  AssociatedFamily triv =
      trivial_family(OperatorSpace::full_algebra(2), three_points());
  AssociatedFamily prod = product_family(dephasing_generator(), three_points());
  AssociatedFamily til = tilde_family(prod);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      check_semigroup_law(triv, i, j);
      check_semigroup_law(prod, i, j);
      check_semigroup_law(til, i, j);
    }
  }
}

TEST_CASE("product family with dephasing semigroup") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  const CMatrix e01 = (CMatrix(2, 2) << 0, 1, 0, 0).finished();
  const CMatrix eye = CMatrix::Identity(2, 2);

  // Expectation component is the dephasing semigroup itself.
  SuperMap exp1 = fam.component(0, 0, 1.0);
  CHECK(max_abs(exp1.apply(e01) - 0.1353352832366127 * e01) <= 1e-13);
  CHECK(max_abs(exp1.apply(eye) - eye) <= 1e-13);

  // Other components scale it by e^{-t chi(x, y)}.
  SuperMap p01 = fam.component(0, 1, 1.0);
  CHECK(max_abs(p01.apply(eye) - 0.60653065971263342 * eye) <= 1e-13);
  CHECK(max_abs(p01.apply(e01) -
                0.60653065971263342 * 0.1353352832366127 * e01) <= 1e-13);
}

TEST_CASE("product family rejects non-unital and non-CP generators") {
  OperatorSpace full = OperatorSpace::full_algebra(2);
  // Growth semigroup e^t id: completely positive but not unital.
  CHECK_THROWS_AS(
      product_family(Generator{full, CMatrix::Identity(4, 4)}, three_points()),
      DomainError);

  // transpose - id generates a unital, positive, but not completely positive
  // semigroup: its Choi matrix is negative on the antisymmetric line.
  CMatrix flip = CMatrix::Zero(4, 4);
  flip(0, 0) = 1.0;
  flip(2, 1) = 1.0;
  flip(1, 2) = 1.0;
  flip(3, 3) = 1.0;
  CHECK_THROWS_AS(
      product_family(Generator{full, flip - CMatrix::Identity(4, 4)},
                     three_points()),
      DomainError);
}

TEST_CASE("product family schur tuples preserve positivity") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  OperatorSpace big = OperatorSpace::mat_space(fam.space(), 3);
  Rng rng(77);
  const std::vector<int> xs = {0, 1, 2};
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = sample_positive(big, 1, rng);
    const double t = rng.uniform(0.0, 2.0);
    const CMatrix out = schur_tuple(fam, xs, t).apply(a);
    CHECK(min_herm_eig(out) >= -1e-9 * (1.0 + max_abs(out)));
  }
}

TEST_CASE("schur tuple acts blockwise") {
  OperatorSpace v = OperatorSpace::full_algebra(2);
  AssociatedFamily fam = trivial_family(v, three_points());
  const std::vector<int> xs = {0, 1};

  // On the trivial family the block action is Schur multiplication by the
  // exponential Grammian.
  const CMatrix x = (CMatrix(2, 2) << 0, 1, 1, 0).finished();
  const CMatrix a = kron(CMatrix::Ones(2, 2), x);
  const double t = 0.8;
  const CMatrix got = schur_tuple(fam, xs, t).apply(a);
  std::vector<CVector> pts = {scalar_point(0.0), scalar_point(1.0)};
  const CMatrix want = kron(gram_matrix(pts, t), x);
  CHECK(max_abs(got - want) <= 1e-12);

  // Time zero is the identity, a single zero label is the expectation.
  CHECK(max_abs(schur_tuple(fam, xs, 0.0).apply(a) - a) <= 1e-13);
  SuperMap expectation = schur_tuple(fam, {0}, 1.0);
  CHECK(max_abs(expectation.apply(x) - x) <= 1e-13);

  CHECK_THROWS_AS(schur_tuple(fam, {0, 5}, 1.0), DomainError);
  CHECK_THROWS_AS(schur_tuple(fam, {}, 1.0), DomainError);
  CHECK_THROWS_AS(schur_tuple(fam, xs, -1.0), TimeError);
}

TEST_CASE("global semigroup diagonal blocks are the diagonal components") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  const std::vector<int> gamma = {0, 1, 2};
  const double t = 0.6;
  SuperMap global = global_semigroup(fam, gamma, t);
  Rng rng(31);
  for (int i = 0; i < 3; ++i) {
    const CMatrix b = rng.cmatrix(2, 2);
    CMatrix e = CMatrix::Zero(3, 3);
    e(i, i) = 1.0;
    const CMatrix out = global.apply(kron(e, b));
    const CMatrix want = kron(e, fam.component(gamma[i], gamma[i], t).apply(b));
    CHECK(max_abs(out - want) <= 1e-12);
  }
}

TEST_CASE("constant labelling amplifies one component") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  const double t = 1.3;
  SuperMap global = global_semigroup(fam, {1, 1, 1}, t);
  SuperMap amp = amplify(fam.component(1, 1, t), 3);
  CHECK(max_abs(global.coord_matrix() - amp.coord_matrix()) <= 1e-12);
}

TEST_CASE("global generator exponentiates to the global semigroup") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  const std::vector<int> gamma = {2, 0, 1, 1};
  Generator big = global_generator(fam, gamma);
  for (double t : {0.0, 0.4, 1.1}) {
    CHECK(max_abs(evolve(big, t).coord_matrix() -
                  global_semigroup(fam, gamma, t).coord_matrix()) <= 1e-11);
  }
}

TEST_CASE("tilde family scales corners and conjugates downstairs") {
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  AssociatedFamily til = tilde_family(fam);
  const OperatorSpace& ts = til.space();
  CHECK(ts.dim() == 10);
  CHECK(ts.is_system());

  const double t = 1.0;
  const int i = 0;
  const int j = 1;
  SuperMap tc = til.component(i, j, t);

  // Corner identities scale by e^{-t chi(x_i, x_j)} = e^{-1/2}.
  for (int corner = 0; corner < 2; ++corner) {
    const CMatrix& b = ts.basis()[static_cast<std::size_t>(corner)];
    CHECK(max_abs(tc.apply(b) - 0.60653065971263342 * b) <= 1e-13);
  }

  // Upper corner carries P^{x_i, x_j}_t itself.
  SuperMap pij = fam.component(i, j, t);
  for (int k = 0; k < 4; ++k) {
    const CMatrix& bk = fam.space().basis()[static_cast<std::size_t>(k)];
    CMatrix upper = CMatrix::Zero(4, 4);
    upper.topRightCorner(2, 2) = bk;
    CMatrix want = CMatrix::Zero(4, 4);
    want.topRightCorner(2, 2) = pij.apply(bk);
    CHECK(max_abs(tc.apply(upper) - want) <= 1e-12);
  }

  // Lower corner carries the adjoint of the transposed-index component.
  SuperMap pji_dag = adjoint_map(fam.component(j, i, t));
  for (int k = 0; k < 4; ++k) {
    const CMatrix bk_adj =
        fam.space().basis()[static_cast<std::size_t>(k)].adjoint();
    CMatrix lower = CMatrix::Zero(4, 4);
    lower.bottomLeftCorner(2, 2) = bk_adj;
    CMatrix want = CMatrix::Zero(4, 4);
    want.bottomLeftCorner(2, 2) = pji_dag.apply(bk_adj);
    CHECK(max_abs(tc.apply(lower) - want) <= 1e-12);
  }
}

TEST_CASE("tilde family preserves positivity where it should") {
  // Off-diagonal components with complex rate carry a phase and cannot be
  // positive maps; positivity holds for diagonal components and for whole
  // Schur tuples, where the phases assemble into a PSD Grammian.
  AssociatedFamily fam = product_family(dephasing_generator(), three_points());
  AssociatedFamily til = tilde_family(fam);
  Rng rng(93);
  for (int i = 0; i < 3; ++i) {
    SuperMap tc = til.component(i, i, 0.9);
    Verdict v = sampled_cp_check(tc, 2, 40, rng);
    CHECK(v.passed);
  }
  OperatorSpace big = OperatorSpace::mat_space(til.space(), 3);
  const std::vector<int> xs = {0, 1, 2};
  for (int trial = 0; trial < 60; ++trial) {
    const CMatrix a = sample_positive(big, 1, rng);
    const double t = rng.uniform(0.0, 2.0);
    const CMatrix out = schur_tuple(til, xs, t).apply(a);
    CHECK(min_herm_eig(out) >= -1e-9 * (1.0 + max_abs(out)));
  }
}

TEST_CASE("tilde of an evolved map differs from the tilde family") {
  // Scaling the corners matters: applying tilde to the time-t map keeps the
  // corner identities fixed, while the tilde family decays them.
  AssociatedFamily fam = trivial_family(
      OperatorSpace::scalar(),
      NoisePoints({scalar_point(0.0), scalar_point(1.0)}));
  SuperMap pointwise = tilde_map(fam.component(0, 1, 1.0));
  SuperMap family = tilde_family(fam).component(0, 1, 1.0);
  const double defect = max_abs(pointwise.coord_matrix() -
                                family.coord_matrix());
  CHECK(std::abs(defect - 0.39346934028736658) <= 1e-13);
}

TEST_CASE("contraction scaling multiplies components by a decay") {
  AssociatedFamily fam =
      trivial_family(OperatorSpace::full_algebra(2), three_points());
  AssociatedFamily down = contraction_scaled(fam, 0.3);
  const CMatrix c = down.component(0, 0, 1.0).coord_matrix();
  CHECK(max_abs(c - 0.74081822068171788 * CMatrix::Identity(4, 4)) <= 1e-13);

  AssociatedFamily up = contraction_scaled(fam, -0.5);
  const CMatrix grow = up.component(0, 0, 1.0).coord_matrix();
  CHECK(std::abs(max_abs(grow) - std::exp(0.5)) <= 1e-12);

  AssociatedFamily same = contraction_scaled(fam, 0.0);
  CHECK(max_abs(same.gen_coord(1, 2) - fam.gen_coord(1, 2)) == 0.0);
}

TEST_CASE("counterexample family closed forms") {
  CounterexampleFamily ce = counterexample_family();
  CHECK(ce.scale == 0.5);
  CHECK(ce.points.size() == 2);
  CHECK(ce.generator.space.is_full_algebra());

  const CMatrix box = CMatrix::Ones(2, 2);
  const CMatrix p0 = (CMatrix(2, 2) << 1, 0, 0, 0).finished();

  for (double t : {0.25, 1.0, 2.0}) {
    const CMatrix out = evolve(ce.generator, t).apply(box);
    CMatrix want(2, 2);
    const double off = std::exp(-0.5 * t);
    want << 1, off, off, 1;
    CHECK(max_abs(out - want) <= 1e-12);
    // The single-box normalisation: the image matches the exponential
    // Grammian of {0, 1}.
    CHECK(max_abs(out - gram_matrix({ce.points[0], ce.points[1]}, t)) <=
          1e-10);
  }

  const CMatrix out1 = evolve(ce.generator, 1.0).apply(box);
  CHECK(std::abs(out1(0, 1).real() - 0.60653065971263342) <= 1e-12);

  // p_0 is not fixed: its image interpolates toward the flat diagonal.
  const CMatrix img = evolve(ce.generator, 1.0).apply(p0);
  CHECK(std::abs(img(0, 0).real() - 0.68393972058572117) <= 1e-12);
  CHECK(std::abs(img(1, 1).real() - 0.31606027941427883) <= 1e-12);
  CHECK(std::abs(img(0, 1)) <= 1e-14);
  CHECK(max_abs(img - p0) >= 0.2);

  // The evolved map is unital and completely positive yet fails the
  // corner-compression property by a fixed margin.
  SuperMap theta = evolve(ce.generator, 1.0);
  CHECK(max_abs(theta.apply(CMatrix::Identity(2, 2)) -
                CMatrix::Identity(2, 2)) <= 1e-13);
  Rng rng(5);
  CHECK(sampled_cp_check(theta, 2, 50, rng).passed);
  const double defect = schur_action_defect(theta, 2);
  CHECK(std::abs(defect - 0.31606027941427883) <= 1e-10);
  CHECK(defect >= 0.1);

  // Doubling the rate doubles the decay exponent.
  CounterexampleFamily fast = counterexample_family(1.0);
  const CMatrix out_fast = evolve(fast.generator, 1.0).apply(box);
  CHECK(std::abs(out_fast(0, 1).real() - 0.36787944117144233) <= 1e-12);
}

TEST_CASE("weyl scalar family rates and moduli") {
  NoisePoints pts = three_points();
  OperatorFamily fam = weyl_scalar_family(scalar_point(0.6), pts);
  CHECK(fam.hilbert_dim() == 1);

  // Expectation rate is -|c|^2 / 2.
  CHECK(std::abs(fam.gen(0, 0)(0, 0) - Complex(-0.18, 0.0)) <= 1e-15);
  for (double t : {0.3, 1.0, 2.5}) {
    const Complex z = fam.component(0, 0, t)(0, 0);
    CHECK(std::abs(std::abs(z) - std::exp(-0.18 * t)) <= 1e-14);
  }
  CHECK(std::abs(fam.component(0, 0, 1.0)(0, 0) -
                 Complex(0.83527021141127423, 0.0)) <= 1e-14);

  // Hand value of the rate at (x, y) = (1, i):
  // -i Im<c, i> - chi(1, c + i) = -0.58 + 0.4 i.
  const Complex lam = fam.gen(1, 2)(0, 0);
  CHECK(std::abs(lam - Complex(-0.58, 0.4)) <= 1e-14);
  const Complex ev = fam.component(1, 2, 1.0)(0, 0);
  CHECK(std::abs(ev - Complex(0.515700546049321, 0.21803469376922005)) <=
        1e-14);
  // The one-dimensional evolution agrees with the scalar exponential.
  CHECK(std::abs(ev - std::exp(lam)) <= 1e-15);

  // Semigroup law for the scalar components.
  for (double s : kGrid) {
    for (double t : kGrid) {
      const Complex lhs = fam.component(2, 1, s + t)(0, 0);
      const Complex rhs =
          fam.component(2, 1, s)(0, 0) * fam.component(2, 1, t)(0, 0);
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }

  // Zero amplitude degenerates to the trivial rates.
  OperatorFamily triv = weyl_scalar_family(scalar_point(0.0), pts);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex want = -chi(pts[i], pts[j]);
      CHECK(std::abs(triv.gen(i, j)(0, 0) - want) <= 1e-15);
    }
  }

  CHECK_THROWS_AS(fam.component(0, 0, -0.5), TimeError);
  CHECK_THROWS_AS(weyl_scalar_family(CVector::Zero(2), pts), ShapeError);
}
