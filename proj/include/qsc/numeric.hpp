#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qsc {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Tolerance knobs shared across the library.  eig_tol is an eigenvalue floor
// and is always applied scaled by (1 + operator norm) of the matrix under
// test; eq_tol is an absolute entrywise agreement threshold; singular values
// at or below pinv_tol (relative to the largest) are treated as zero when
// pseudo-inverting.
struct Tolerances {
  double eig_tol = 1e-9;
  double eq_tol = 1e-9;
  double pinv_tol = 1e-10;
};

// Base error: every failure carries a short machine-readable kind plus a
// human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

// NonSquare, ShapeMismatch, DimensionMismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Hermiticity defect beyond tolerance.
class NotHermitianError : public Error {
 public:
  NotHermitianError(const std::string& what, double defect)
      : Error("NotHermitian", what), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_;
};

// NotPSD / NotPSDBlock; carries the offending minimum eigenvalue.
class NotPsdError : public Error {
 public:
  NotPsdError(std::string kind, const std::string& what, double min_eigenvalue)
      : Error(std::move(kind), what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

// SingularBeyondCutoff and kin.
class SingularError : public Error {
 public:
  using Error::Error;
};

// Violated structural preconditions: failed membership, missing flags,
// unknown indices or values, degenerate actions.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Negative durations where only forward evolution is defined.
class TimeError : public Error {
 public:
  using Error::Error;
};

// Property requested from an object that cannot express it.
class NotApplicableError : public Error {
 public:
  using Error::Error;
};

// Deterministic random source.  All draws go through fixed 64-bit integer
// arithmetic so identical seeds give identical streams on every platform;
// no std::*_distribution is used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so nearby seeds decorrelate.
    next();
    next();
  }

  // Independent substream for a (seed, stream) pair; lets callers run trials
  // in any order or in parallel without changing the draws.
  static Rng split(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed, stream));
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inclusive integer range via rejection sampling.
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t draw = next();
    while (draw >= limit) draw = next();
    return lo + static_cast<int>(draw % span);
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Standard complex normal, E|z|^2 = 1.
  Complex cnormal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
  }

  CVector cvector(int dim) {
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = cnormal();
    return v;
  }

  CMatrix cmatrix(int rows, int cols) {
    CMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = cnormal();
    return m;
  }

 private:
  // splitmix64 step; doubles as the (seed, stream) mixer.
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace qsc
