#include "qsc/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "qsc/linalg.hpp"

namespace qsc {

namespace {

void check_horizon(double t) {
  if (t < 0.0) throw TimeError("NegativeTime", "horizons must be nonnegative");
}

std::uint64_t duration_bits(double dt) {
  return std::bit_cast<std::uint64_t>(dt);
}

}  // namespace

CoherentSpanElement::CoherentSpanElement(std::vector<CoherentTerm> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw DomainError("EmptySpan", "need at least one coherent term");
  }
  hilbert_dim_ = static_cast<int>(terms_[0].u.size());
  noise_dim_ = terms_[0].f.dim();
  for (const CoherentTerm& term : terms_) {
    if (term.u.size() != hilbert_dim_ || term.f.dim() != noise_dim_) {
      throw ShapeError("DimensionMismatch",
                       "coherent terms must share both dimensions");
    }
  }
}

Complex span_pairing(const CoherentSpanElement& xi,
                     const CoherentSpanElement& eta, double t) {
  check_horizon(t);
  if (xi.hilbert_dim() != eta.hilbert_dim() ||
      xi.noise_dim() != eta.noise_dim()) {
    throw ShapeError("DimensionMismatch",
                     "span pairing needs matching dimensions");
  }
  Complex total = 0.0;
  for (const CoherentTerm& a : xi.terms()) {
    for (const CoherentTerm& b : eta.terms()) {
      total += a.u.dot(b.u) * std::exp(-chi_path(a.f, b.f, t));
    }
  }
  return total;
}

double span_norm_sq(const CoherentSpanElement& xi, double t) {
  return span_pairing(xi, xi, t).real();
}

CocycleKernel::CocycleKernel(AssociatedFamily family)
    : family_(std::move(family)) {}

CMatrix CocycleKernel::component_coord(int i, int j, double dt) const {
  const auto key = std::make_tuple(i, j, duration_bits(dt));
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  CMatrix value = expm(dt * family_.gen_coord(i, j));
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto [it, inserted] = cache_.emplace(key, std::move(value));
    return it->second;
  }
}

CMatrix CocycleKernel::eval_coord(const StepFunction& f, const StepFunction& g,
                                  double t) const {
  check_horizon(t);
  if (f.dim() != family_.points().d() || g.dim() != family_.points().d()) {
    throw ShapeError("DimensionMismatch",
                     "step functions must match the noise dimension");
  }
  const Eigen::Index dim = space().dim();
  CMatrix total = CMatrix::Identity(dim, dim);
  for (const StepSegment& seg : merged_segments(f, g, t)) {
    const int i = family_.points().index_of(seg.left);
    const int j = family_.points().index_of(seg.right);
    total = total * component_coord(i, j, seg.end - seg.begin);
  }
  return total;
}

CMatrix CocycleKernel::eval_coord_on_partition(
    const StepFunction& f, const StepFunction& g, double t,
    const std::vector<double>& cuts) const {
  check_horizon(t);
  std::vector<double> points = {0.0};
  for (double c : cuts) {
    if (c > kTimeTieTol && c < t - kTimeTieTol) points.push_back(c);
  }
  points.push_back(t);
  std::sort(points.begin(), points.end());
  const Eigen::Index dim = space().dim();
  CMatrix total = CMatrix::Identity(dim, dim);
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    const double begin = points[k];
    const double end = points[k + 1];
    if (end - begin <= kTimeTieTol) continue;
    const int i = family_.points().index_of(f.at(begin));
    const int j = family_.points().index_of(g.at(begin));
    total = total * component_coord(i, j, end - begin);
  }
  return total;
}

CMatrix CocycleKernel::eval(const StepFunction& f, const StepFunction& g,
                            double t, const CMatrix& a) const {
  return SuperMap(space(), space(), eval_coord(f, g, t)).apply(a);
}

double partition_invariance_defect(const CocycleKernel& kernel,
                                   const StepFunction& f,
                                   const StepFunction& g, double t,
                                   const CMatrix& a,
                                   const std::vector<double>& refinement) {
  std::vector<double> cuts = refinement;
  for (double b : f.breakpoints()) cuts.push_back(b);
  for (double b : g.breakpoints()) cuts.push_back(b);
  const CMatrix diff = kernel.eval_coord(f, g, t) -
                       kernel.eval_coord_on_partition(f, g, t, cuts);
  const OperatorSpace& v = kernel.space();
  return op_norm(v.reconstruct(diff * v.coords(a)));
}

double cocycle_identity_defect(const CocycleKernel& kernel,
                               const StepFunction& f, const StepFunction& g,
                               double r, double t, const CMatrix& a) {
  const CMatrix whole = kernel.eval(f, g, r + t, a);
  const CMatrix inner =
      kernel.eval(shift_restrict(f, r), shift_restrict(g, r), t, a);
  const CMatrix nested = kernel.eval(f, g, r, inner);
  return op_norm(whole - nested);
}

CMatrix form_matrix(const CocycleKernel& kernel,
                    const std::vector<CoherentTerm>& xi, double t,
                    const CMatrix& a_big) {
  if (xi.empty()) throw DomainError("EmptySpan", "need at least one term");
  const OperatorSpace& v = kernel.space();
  const int n = static_cast<int>(xi.size());
  const int mo = v.m_out();
  const int mi = v.m_in();
  if (a_big.rows() != static_cast<Eigen::Index>(n) * mo ||
      a_big.cols() != static_cast<Eigen::Index>(n) * mi) {
    throw ShapeError("ShapeMismatch",
                     "block matrix must have one block per term pair");
  }
  for (const CoherentTerm& term : xi) {
    if (term.u.size() != mo || mo != mi) {
      throw ShapeError("DimensionMismatch",
                       "coefficients must match a square operator space");
    }
  }
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const CMatrix block = a_big.block(static_cast<Eigen::Index>(i) * mo,
                                        static_cast<Eigen::Index>(j) * mi, mo,
                                        mi);
      const CMatrix mapped = kernel.eval(xi[static_cast<std::size_t>(i)].f,
                                         xi[static_cast<std::size_t>(j)].f, t,
                                         block);
      out(i, j) = xi[static_cast<std::size_t>(i)].u.dot(
          mapped * xi[static_cast<std::size_t>(j)].u);
    }
  }
  return out;
}

CMatrix span_norm_form(const std::vector<CoherentTerm>& xi, double t) {
  if (xi.empty()) throw DomainError("EmptySpan", "need at least one term");
  check_horizon(t);
  const int n = static_cast<int>(xi.size());
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) =
          xi[static_cast<std::size_t>(i)].u.dot(
              xi[static_cast<std::size_t>(j)].u) *
          std::exp(-chi_path(xi[static_cast<std::size_t>(i)].f,
                             xi[static_cast<std::size_t>(j)].f, t));
    }
  }
  return out;
}

StepFunction sample_step(const NoisePoints& points, double horizon,
                         int max_jumps, Rng& rng) {
  const int jumps = rng.uniform_int(0, max_jumps);
  std::vector<double> breaks;
  for (int k = 0; k < jumps; ++k) {
    breaks.push_back(rng.uniform(horizon * 0.05, horizon * 0.95));
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) {
                             return b - a <= kTimeTieTol;
                           }),
               breaks.end());
  std::vector<CVector> values;
  for (std::size_t k = 0; k <= breaks.size(); ++k) {
    values.push_back(points[rng.uniform_int(0, points.size() - 1)]);
  }
  return StepFunction(points.d(), std::move(breaks), std::move(values));
}

namespace {

struct SampledSpan {
  std::vector<CoherentTerm> terms;
  double t = 0.0;
  bool usable = false;
};

SampledSpan draw_span(const CocycleKernel& kernel, int n_max,
                      const std::vector<double>& t_grid, int trial, Rng& rng) {
  SampledSpan span;
  span.t = t_grid[static_cast<std::size_t>(trial) % t_grid.size()];
  const int n = rng.uniform_int(1, n_max);
  const int m = kernel.space().m_out();
  const double horizon = std::max(span.t, 0.1);
  std::vector<StepFunction> fs;
  for (int k = 0; k < n; ++k) {
    StepFunction f = sample_step(kernel.family().points(), horizon, 3, rng);
    fs.push_back(f);
    span.terms.push_back(CoherentTerm{rng.cvector(m), std::move(f)});
  }
  // Nearly parallel exponential vectors make the Gram matrix useless as a
  // positivity reference; skip such draws.
  span.usable = cond_number(exp_gram(fs, span.t)) <= 1e12;
  return span;
}

std::string span_witness(const char* label, int trial, const SampledSpan& span,
                         double value) {
  std::ostringstream out;
  out << label << " trial=" << trial << " t=" << span.t
      << " n=" << span.terms.size() << " value=" << value;
  return out.str();
}

}  // namespace

Verdict kernel_positivity(const CocycleKernel& kernel, int n_max,
                          const std::vector<double>& t_grid, int trials,
                          Rng& rng, double tol) {
  Verdict verdict;
  verdict.passed = true;
  for (int trial = 0; trial < trials; ++trial) {
    SampledSpan span = draw_span(kernel, n_max, t_grid, trial, rng);
    if (!span.usable) continue;
    const int n = static_cast<int>(span.terms.size());
    const CMatrix a =
        sample_positive(OperatorSpace::mat_space(kernel.space(), n), 1, rng);
    double violation = 0.0;
    try {
      const CMatrix fm = form_matrix(kernel, span.terms, span.t, a);
      violation = std::max(0.0, -min_herm_eig(fm) /
                                    (1.0 + max_abs(fm)));
    } catch (const NotHermitianError& err) {
      violation = err.defect();
    }
    ++verdict.samples_used;
    if (violation > verdict.worst_violation) {
      verdict.worst_violation = violation;
      verdict.witness = span_witness("positivity", trial, span, violation);
    }
  }
  verdict.passed = verdict.worst_violation <= tol;
  return verdict;
}

Verdict kernel_contractivity(const CocycleKernel& kernel, int n_max,
                             const std::vector<double>& t_grid, int trials,
                             Rng& rng, double tol) {
  Verdict verdict;
  verdict.passed = true;
  const int m = kernel.space().m_out();
  for (int trial = 0; trial < trials; ++trial) {
    SampledSpan span = draw_span(kernel, n_max, t_grid, trial, rng);
    if (!span.usable) continue;
    const int n = static_cast<int>(span.terms.size());
    const CMatrix eye_box =
        kron(CMatrix::Ones(n, n), CMatrix::Identity(m, m));
    double violation = 0.0;
    try {
      const CMatrix fm = form_matrix(kernel, span.terms, span.t, eye_box);
      const CMatrix sn = span_norm_form(span.terms, span.t);
      violation = std::max(0.0, -min_herm_eig(sn - fm) /
                                    (1.0 + max_abs(sn)));
    } catch (const NotHermitianError& err) {
      violation = err.defect();
    }
    ++verdict.samples_used;
    if (violation > verdict.worst_violation) {
      verdict.worst_violation = violation;
      verdict.witness = span_witness("contractivity", trial, span, violation);
    }
  }
  verdict.passed = verdict.worst_violation <= tol;
  return verdict;
}

Verdict kernel_unitality(const CocycleKernel& kernel, int n_max,
                         const std::vector<double>& t_grid, int trials,
                         Rng& rng, double tol) {
  Verdict verdict;
  verdict.passed = true;
  const int m = kernel.space().m_out();
  for (int trial = 0; trial < trials; ++trial) {
    SampledSpan span = draw_span(kernel, n_max, t_grid, trial, rng);
    if (!span.usable) continue;
    const int n = static_cast<int>(span.terms.size());
    const CMatrix eye_box =
        kron(CMatrix::Ones(n, n), CMatrix::Identity(m, m));
    const CMatrix fm = form_matrix(kernel, span.terms, span.t, eye_box);
    const CMatrix sn = span_norm_form(span.terms, span.t);
    const double violation = max_abs(fm - sn) / (1.0 + max_abs(sn));
    ++verdict.samples_used;
    if (violation > verdict.worst_violation) {
      verdict.worst_violation = violation;
      verdict.witness = span_witness("unitality", trial, span, violation);
    }
  }
  verdict.passed = verdict.worst_violation <= tol;
  return verdict;
}

CoherentSpanElement weyl_apply(const CVector& c, double t,
                               const CoherentSpanElement& xi) {
  check_horizon(t);
  if (c.size() != xi.noise_dim()) {
    throw ShapeError("DimensionMismatch",
                     "amplitude dimension must match the span");
  }
  const StepFunction window = StepFunction::indicator(c, t);
  const Complex iunit(0.0, 1.0);
  std::vector<CoherentTerm> terms;
  for (const CoherentTerm& term : xi.terms()) {
    const double phase = std::imag(l2_inner(window, term.f, t));
    terms.push_back(CoherentTerm{std::exp(-iunit * phase) * term.u,
                                 add(term.f, window)});
  }
  return CoherentSpanElement(std::move(terms));
}

double weyl_gram_identity_defect(const std::vector<CVector>& xs,
                                 const CMatrix& lambda, double t) {
  check_horizon(t);
  const int n = static_cast<int>(xs.size());
  if (n == 0) throw DomainError("EmptySpan", "need at least one value");
  if (lambda.rows() != n || lambda.cols() != n) {
    throw ShapeError("ShapeMismatch", "lambda must be n x n for n values");
  }
  const int d = static_cast<int>(xs[0].size());
  CVector one(1);
  one(0) = 1.0;
  const CoherentSpanElement vacuum(
      {CoherentTerm{one, StepFunction::zero(d)}});
  std::vector<CoherentSpanElement> columns;
  for (const CVector& x : xs) columns.push_back(weyl_apply(x, t, vacuum));
  CMatrix left(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      left(i, j) = lambda(i, j) *
                   span_pairing(columns[static_cast<std::size_t>(i)],
                                columns[static_cast<std::size_t>(j)], t);
    }
  }
  return max_abs(left - schur_product(gram_matrix(xs, t), lambda));
}

CMatrix operator_kernel(const OperatorFamily& family, const StepFunction& f,
                        const StepFunction& g, double t, KernelSide side) {
  check_horizon(t);
  if (f.dim() != family.points().d() || g.dim() != family.points().d()) {
    throw ShapeError("DimensionMismatch",
                     "step functions must match the noise dimension");
  }
  const int m = family.hilbert_dim();
  CMatrix total = CMatrix::Identity(m, m);
  for (const StepSegment& seg : merged_segments(f, g, t)) {
    const int i = family.points().index_of(seg.left);
    const int j = family.points().index_of(seg.right);
    const CMatrix factor = expm((seg.end - seg.begin) * family.gen(i, j));
    if (side == KernelSide::Left) {
      total = total * factor;
    } else {
      total = factor * total;
    }
  }
  return total;
}

}  // namespace qsc
