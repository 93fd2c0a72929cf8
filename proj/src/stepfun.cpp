#include "qsc/stepfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsc/linalg.hpp"

namespace qsc {

namespace {

bool values_equal(const CVector& a, const CVector& b) {
  return (a - b).cwiseAbs().maxCoeff() <= kTimeTieTol;
}

}  // namespace

StepFunction::StepFunction(int d, std::vector<double> breakpoints,
                           std::vector<CVector> values)
    : d_(d), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  if (values_.size() != breakpoints_.size() + 1) {
    throw ShapeError("ShapeMismatch",
                     "need one value per interval plus a tail: " +
                         std::to_string(breakpoints_.size()) +
                         " breakpoints vs " + std::to_string(values_.size()) +
                         " values");
  }
  double prev = 0.0;
  for (double b : breakpoints_) {
    if (!std::isfinite(b) || b <= prev + kTimeTieTol) {
      throw DomainError("BadBreakpoints",
                        "breakpoints must be strictly increasing and positive");
    }
    prev = b;
  }
  for (const CVector& v : values_) {
    if (v.size() != d_) {
      throw ShapeError("DimensionMismatch",
                       "value dimension " + std::to_string(v.size()) +
                           " does not match d = " + std::to_string(d_));
    }
  }
  // Normal form: merge adjacent equal values.
  std::vector<double> keep_bp;
  std::vector<CVector> keep_vals;
  keep_vals.push_back(values_.front());
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (values_equal(values_[i + 1], keep_vals.back())) continue;
    keep_bp.push_back(breakpoints_[i]);
    keep_vals.push_back(values_[i + 1]);
  }
  breakpoints_ = std::move(keep_bp);
  values_ = std::move(keep_vals);
}

StepFunction StepFunction::constant(const CVector& value) {
  return StepFunction(static_cast<int>(value.size()), {}, {value});
}

StepFunction StepFunction::zero(int d) {
  return constant(CVector::Zero(d));
}

StepFunction StepFunction::indicator(const CVector& value, double upto) {
  const int d = static_cast<int>(value.size());
  if (upto <= kTimeTieTol) return zero(d);
  return StepFunction(d, {upto}, {value, CVector::Zero(d)});
}

const CVector& StepFunction::at(double s) const {
  if (s < 0.0) {
    throw DomainError("NegativeTime", "step function queried at " + std::to_string(s));
  }
  // First breakpoint strictly above s selects the interval.
  const auto it =
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

bool StepFunction::operator==(const StepFunction& other) const {
  if (d_ != other.d_ || breakpoints_.size() != other.breakpoints_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (std::abs(breakpoints_[i] - other.breakpoints_[i]) > kTimeTieTol) {
      return false;
    }
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!values_equal(values_[i], other.values_[i])) return false;
  }
  return true;
}

std::vector<StepSegment> merged_segments(const StepFunction& f,
                                         const StepFunction& g, double t) {
  if (f.dim() != g.dim()) {
    throw ShapeError("DimensionMismatch",
                     "merging step functions over C^" + std::to_string(f.dim()) +
                         " and C^" + std::to_string(g.dim()));
  }
  std::vector<StepSegment> out;
  if (t <= kTimeTieTol) return out;
  std::vector<double> cuts{0.0};
  for (double b : f.breakpoints()) {
    if (b < t - kTimeTieTol) cuts.push_back(b);
  }
  for (double b : g.breakpoints()) {
    if (b < t - kTimeTieTol) cuts.push_back(b);
  }
  cuts.push_back(t);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] - cuts[i] <= kTimeTieTol) continue;
    StepSegment seg;
    seg.begin = cuts[i];
    seg.end = cuts[i + 1];
    seg.left = f.at(seg.begin);
    seg.right = g.at(seg.begin);
    out.push_back(std::move(seg));
  }
  return out;
}

StepFunction shift_restrict(const StepFunction& f, double r) {
  if (r < 0.0) {
    throw TimeError("NegativeTime", "shift by " + std::to_string(r));
  }
  std::vector<double> bps;
  std::vector<CVector> vals;
  vals.push_back(f.at(r));
  for (double b : f.breakpoints()) {
    if (b > r + kTimeTieTol) {
      bps.push_back(b - r);
      vals.push_back(f.at(b));
    }
  }
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

StepFunction time_reverse(const StepFunction& f, double t) {
  if (t < 0.0) {
    throw TimeError("NegativeTime", "reverse over [0," + std::to_string(t) + ")");
  }
  if (t <= kTimeTieTol) return f;
  // Reflected pieces of [0,t), then the original from t on.
  const auto segs = merged_segments(f, f, t);
  std::vector<double> bps;
  std::vector<CVector> vals;
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (!vals.empty()) bps.push_back(t - it->end);
    vals.push_back(it->left);
  }
  bps.push_back(t);
  vals.push_back(f.at(t));
  for (double b : f.breakpoints()) {
    if (b > t + kTimeTieTol) {
      bps.push_back(b);
      vals.push_back(f.at(b));
    }
  }
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

StepFunction add(const StepFunction& f, const StepFunction& g) {
  if (f.dim() != g.dim()) {
    throw ShapeError("DimensionMismatch", "adding step functions of unequal d");
  }
  std::vector<double> cuts;
  cuts.insert(cuts.end(), f.breakpoints().begin(), f.breakpoints().end());
  cuts.insert(cuts.end(), g.breakpoints().begin(), g.breakpoints().end());
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bps;
  std::vector<CVector> vals;
  vals.push_back(f.at(0.0) + g.at(0.0));
  for (double c : cuts) {
    if (!bps.empty() && c - bps.back() <= kTimeTieTol) continue;
    bps.push_back(c);
    vals.push_back(f.at(c) + g.at(c));
  }
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

StepFunction truncate(const StepFunction& f, double t) {
  if (t < 0.0) {
    throw TimeError("NegativeTime", "truncate at " + std::to_string(t));
  }
  if (t <= kTimeTieTol) return StepFunction::zero(f.dim());
  std::vector<double> bps;
  std::vector<CVector> vals;
  vals.push_back(f.at(0.0));
  for (double b : f.breakpoints()) {
    if (b < t - kTimeTieTol) {
      bps.push_back(b);
      vals.push_back(f.at(b));
    }
  }
  bps.push_back(t);
  vals.push_back(CVector::Zero(f.dim()));
  return StepFunction(f.dim(), std::move(bps), std::move(vals));
}

Complex l2_inner(const StepFunction& f, const StepFunction& g, double t) {
  Complex acc(0.0, 0.0);
  for (const StepSegment& seg : merged_segments(f, g, t)) {
    acc += (seg.end - seg.begin) * seg.left.dot(seg.right);
  }
  return acc;
}

Complex chi_path(const StepFunction& f, const StepFunction& g, double t) {
  Complex acc(0.0, 0.0);
  for (const StepSegment& seg : merged_segments(f, g, t)) {
    acc += (seg.end - seg.begin) * chi(seg.left, seg.right);
  }
  return acc;
}

CMatrix exp_gram(const std::vector<StepFunction>& fs, double t) {
  const int n = static_cast<int>(fs.size());
  CMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = std::exp(-chi_path(fs[i], fs[j], t));
    }
  }
  return out;
}

}  // namespace qsc
