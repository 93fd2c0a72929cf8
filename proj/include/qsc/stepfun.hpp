#pragma once

#include <vector>

#include "qsc/numeric.hpp"

namespace qsc {

// Breakpoints closer than this are treated as coincident; adjacent values
// agreeing within it are merged by the normal form.
inline constexpr double kTimeTieTol = 1e-12;

// Right-continuous step function [0, inf) -> C^d with finitely many jumps.
// Always held in normal form: breakpoints strictly increasing and positive,
// adjacent equal values merged.  values()[i] rules [breakpoints()[i-1],
// breakpoints()[i]) with an implicit leading 0, and values().back() is the
// tail beyond the last breakpoint.
class StepFunction {
 public:
  // values.size() must equal breakpoints.size() + 1 (the last entry is the
  // tail).  Throws DomainError on unsorted or non-positive breakpoints and
  // ShapeError on mixed value dimensions.
  StepFunction(int d, std::vector<double> breakpoints,
               std::vector<CVector> values);

  static StepFunction constant(const CVector& value);
  static StepFunction zero(int d);
  // value on [0, upto), zero afterwards.
  static StepFunction indicator(const CVector& value, double upto);

  int dim() const { return d_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<CVector>& values() const { return values_; }

  // Right-continuous evaluation; s < 0 is out of domain.
  const CVector& at(double s) const;

  bool operator==(const StepFunction& other) const;

 private:
  int d_;
  std::vector<double> breakpoints_;
  std::vector<CVector> values_;
};

// One constancy interval [begin, end) shared by a pair of step functions.
struct StepSegment {
  double begin = 0.0;
  double end = 0.0;
  CVector left;
  CVector right;
};

// Common refinement of f and g on [0, t): consecutive segments carrying the
// values of both functions.  Empty when t <= 0.
std::vector<StepSegment> merged_segments(const StepFunction& f,
                                         const StepFunction& g, double t);

// t -> f(t + r), in normal form.
StepFunction shift_restrict(const StepFunction& f, double r);

// s -> f(t - s) on [0, t), f(s) on [t, inf); right-continuous normal form.
StepFunction time_reverse(const StepFunction& f, double t);

// Pointwise sum.
StepFunction add(const StepFunction& f, const StepFunction& g);

// f on [0, t), zero afterwards.
StepFunction truncate(const StepFunction& f, double t);

// L^2 inner product over [0, t), linear in the second argument.
Complex l2_inner(const StepFunction& f, const StepFunction& g, double t);

// (|f|^2 + |g|^2)/2 - <f, g> over [0, t), evaluated exactly as an interval
// sum of chi terms.  Additive over disjoint time intervals.
Complex chi_path(const StepFunction& f, const StepFunction& g, double t);

// Matrix [exp(-chi_path(f_i, f_j, t))]; PSD with unit diagonal.
CMatrix exp_gram(const std::vector<StepFunction>& fs, double t);

}  // namespace qsc
