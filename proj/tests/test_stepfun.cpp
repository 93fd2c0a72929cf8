#include "qsc/stepfun.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

#include "qsc/linalg.hpp"

namespace {

using qsc::Complex;
using qsc::CVector;
using qsc::StepFunction;

CVector v1(Complex z) {
  CVector v(1);
  v << z;
  return v;
}

StepFunction random_step(qsc::Rng& rng, int d, int max_jumps, double horizon) {
  const int jumps = rng.uniform_int(0, max_jumps);
  std::vector<double> bps;
  for (int i = 0; i < jumps; ++i) bps.push_back(rng.uniform(0.05, horizon));
  std::sort(bps.begin(), bps.end());
  for (std::size_t i = 1; i < bps.size(); ++i) {
    if (bps[i] - bps[i - 1] < 1e-3) bps[i] = bps[i - 1] + 1e-3;
  }
  std::vector<CVector> vals;
  for (int i = 0; i <= jumps; ++i) vals.push_back(rng.cvector(d));
  return StepFunction(d, bps, vals);
}

}  // namespace

TEST_CASE("normal form merges equal neighbours and validates input") {
  const StepFunction merged(1, {1.0}, {v1(2.0), v1(2.0)});
  CHECK(merged.breakpoints().empty());
  CHECK(merged == StepFunction::constant(v1(2.0)));

  CHECK_THROWS_AS(StepFunction(1, {1.0, 0.5}, {v1(0), v1(1), v1(2)}),
                  qsc::DomainError);
  CHECK_THROWS_AS(StepFunction(1, {-1.0}, {v1(0), v1(1)}), qsc::DomainError);
  CHECK_THROWS_AS(StepFunction(1, {1.0}, {v1(0)}), qsc::ShapeError);
  CHECK_THROWS_AS(StepFunction(2, {}, {v1(0)}), qsc::ShapeError);
}

TEST_CASE("evaluation is right-continuous") {
  const StepFunction f(1, {0.5, 1.0}, {v1(1.0), v1(2.0), v1(3.0)});
  CHECK(f.at(0.0) == v1(1.0));
  CHECK(f.at(0.49) == v1(1.0));
  CHECK(f.at(0.5) == v1(2.0));
  CHECK(f.at(1.0) == v1(3.0));
  CHECK(f.at(100.0) == v1(3.0));
  CHECK_THROWS_AS(f.at(-0.1), qsc::DomainError);
}

TEST_CASE("shift_restrict agrees with pointwise shifts") {
  const StepFunction f = StepFunction::indicator(v1(1.0), 1.0);

  CHECK(shift_restrict(f, 0.0) == f);
  CHECK(shift_restrict(f, 0.5) == StepFunction::indicator(v1(1.0), 0.5));
  CHECK(shift_restrict(f, 1.0) == StepFunction::zero(1));
  CHECK(shift_restrict(f, 7.0) == StepFunction::zero(1));

  const StepFunction c = StepFunction::constant(v1(3.0));
  CHECK(shift_restrict(c, 2.5) == c);

  qsc::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const StepFunction g = random_step(rng, 2, 3, 2.0);
    const double r = rng.uniform(0.0, 2.5);
    const StepFunction shifted = shift_restrict(g, r);
    for (double s : {0.0, 0.3, 0.9, 1.7, 3.0}) {
      CHECK((shifted.at(s) - g.at(s + r)).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
  CHECK_THROWS_AS(shift_restrict(f, -0.5), qsc::TimeError);
}

TEST_CASE("time_reverse reflects the window and keeps the rest") {
  const StepFunction f = StepFunction::indicator(v1(1.0), 1.0);
  const StepFunction rev = time_reverse(f, 3.0);
  CHECK(rev.at(0.0) == v1(0.0));
  CHECK(rev.at(2.0) == v1(1.0));
  CHECK(rev.at(2.9) == v1(1.0));
  CHECK(rev.at(3.0) == v1(0.0));
  CHECK(rev == StepFunction(1, {2.0, 3.0}, {v1(0.0), v1(1.0), v1(0.0)}));

  const StepFunction two(1, {0.5}, {v1(1.0), v1(2.0)});
  const StepFunction swapped = time_reverse(two, 1.0);
  CHECK(swapped.at(0.0) == v1(2.0));
  CHECK(swapped.at(0.5) == v1(1.0));
  CHECK(swapped.at(1.0) == v1(2.0));

  const StepFunction c = StepFunction::constant(v1(5.0));
  CHECK(time_reverse(c, 2.0) == c);

  qsc::Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const StepFunction g = random_step(rng, 1, 3, 2.0);
    const double t = rng.uniform(0.1, 2.5);
    CHECK(time_reverse(time_reverse(g, t), t) == g);
  }
}

TEST_CASE("chi_path closed forms") {
  const StepFunction one = StepFunction::constant(v1(1.0));
  const StepFunction zero = StepFunction::zero(1);
  CHECK(std::abs(chi_path(one, one, 5.0)) == 0.0);
  CHECK(chi_path(one, zero, 1.0) == Complex(0.5, 0.0));
  CHECK(chi_path(one, zero, 3.0) == Complex(1.5, 0.0));

  const StepFunction half = StepFunction::indicator(v1(1.0), 0.5);
  CHECK(chi_path(half, zero, 1.0) == Complex(0.25, 0.0));

  CHECK_THROWS_AS(chi_path(one, StepFunction::zero(2), 1.0), qsc::ShapeError);
}

TEST_CASE("chi_path is additive over split intervals") {
  qsc::Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const StepFunction f = random_step(rng, 2, 3, 2.0);
    const StepFunction g = random_step(rng, 2, 3, 2.0);
    const double t = rng.uniform(0.3, 2.5);
    const double r = rng.uniform(0.0, t);
    const Complex whole = chi_path(f, g, t);
    const Complex split = chi_path(f, g, r) +
                          chi_path(shift_restrict(f, r), shift_restrict(g, r),
                                   t - r);
    CHECK(std::abs(whole - split) < 1e-12);
  }
}

TEST_CASE("exp_gram reduces to the value Grammian on constants") {
  const std::vector<CVector> xs = {v1(0.0), v1(1.0), v1(Complex(0, 1))};
  std::vector<StepFunction> fs;
  for (const CVector& x : xs) fs.push_back(StepFunction::constant(x));
  const double t = 0.75;
  CHECK(qsc::max_abs(exp_gram(fs, t) - qsc::gram_matrix(xs, t)) < 1e-15);

  CHECK(qsc::exp_gram({fs[1]}, 1.0)(0, 0) == Complex(1.0, 0.0));
}

TEST_CASE("exp_gram is PSD with unit diagonal on random tuples") {
  qsc::Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<StepFunction> fs;
    const int n = rng.uniform_int(1, 4);
    for (int i = 0; i < n; ++i) fs.push_back(random_step(rng, 2, 3, 1.5));
    const double t = rng.uniform(0.0, 2.0);
    const qsc::CMatrix g = exp_gram(fs, t);
    for (int i = 0; i < n; ++i) CHECK(std::abs(g(i, i) - 1.0) < 1e-14);
    CHECK(qsc::is_psd(g));
  }
}

TEST_CASE("add and truncate compose pointwise") {
  const StepFunction f(1, {1.0}, {v1(1.0), v1(2.0)});
  const StepFunction g(1, {0.5}, {v1(10.0), v1(20.0)});
  const StepFunction sum = add(f, g);
  CHECK(sum.at(0.0) == v1(11.0));
  CHECK(sum.at(0.7) == v1(21.0));
  CHECK(sum.at(1.5) == v1(22.0));

  const StepFunction cut = truncate(f, 0.8);
  CHECK(cut.at(0.5) == v1(1.0));
  CHECK(cut.at(0.8) == v1(0.0));
  CHECK(cut.at(2.0) == v1(0.0));

  // Truncation beyond the window leaves [0, t) untouched.
  CHECK(truncate(f, 3.0).at(1.5) == v1(2.0));
  CHECK(truncate(f, 3.0).at(3.1) == v1(0.0));
}

TEST_CASE("l2_inner integrates segment products") {
  const StepFunction f = StepFunction::indicator(v1(Complex(0, 1)), 1.0);
  const StepFunction g = StepFunction::constant(v1(1.0));
  // <i*1_{[0,1)}, 1> over [0,2) = conj(i) * 1 = -i.
  CHECK(std::abs(l2_inner(f, g, 2.0) - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(l2_inner(g, f, 2.0) - Complex(0, 1)) < 1e-15);
}
