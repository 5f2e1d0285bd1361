#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpf {

// Error taxonomy mirrored by the CLI exit codes and the C API status values.
enum class ErrorCode : int {
  Schema = 2,      // malformed or inconsistent configuration
  Assumption = 3,  // a structural precondition on the dynamics fails
  Numeric = 4,     // iteration failed to converge / lost positivity
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail_schema(const std::string& msg) {
  throw Error(ErrorCode::Schema, msg);
}
[[noreturn]] inline void fail_assumption(const std::string& msg) {
  throw Error(ErrorCode::Assumption, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& msg) {
  throw Error(ErrorCode::Numeric, msg);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool degenerate(double tol = 0.0) const { return length() <= tol; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  Interval clipped_to(const Interval& other) const {
    return {std::max(lo, other.lo), std::min(hi, other.hi)};
  }
};

inline Interval hull(double a, double b) {
  return a <= b ? Interval{a, b} : Interval{b, a};
}

// Sorted list of disjoint intervals with positive length.
using IntervalSet = std::vector<Interval>;

inline double total_length(const IntervalSet& s) {
  double acc = 0.0;
  for (const auto& iv : s) acc += iv.length();
  return acc;
}

// Removes the open intervals `holes` from `whole`; keeps only parts longer
// than `min_len`.  `holes` need not be sorted.
IntervalSet subtract_holes(const Interval& whole, const IntervalSet& holes,
                           double min_len);

// Union of two disjoint-interval sets (components get merged when they touch
// within `tol`).
IntervalSet interval_union(const IntervalSet& a, const IntervalSet& b,
                           double tol);

IntervalSet interval_intersection(const IntervalSet& a, const IntervalSet& b,
                                  double min_len);

// Validates sortedness/disjointness of a hole description.
void check_hole_set(const Interval& base, const IntervalSet& holes);

// --- deterministic counter-based randomness ------------------------------
//
// A stateless mix of (seed, index) so that draws are addressable at any
// integer index, including negative ones.  splitmix64 finalizer.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_bits(std::uint64_t seed, std::int64_t index,
                                  std::uint64_t stream = 0) {
  std::uint64_t z = seed;
  z = mix64(z ^ 0xd1b54a32d192ed03ull * stream);
  z = mix64(z ^ static_cast<std::uint64_t>(index) * 0x9e3779b97f4a7c15ull);
  return mix64(z);
}

// Uniform draw in [0,1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::int64_t index,
                              std::uint64_t stream = 0) {
  return static_cast<double>(counter_bits(seed, index, stream) >> 11) *
         0x1.0p-53;
}

// --- small numerics -------------------------------------------------------

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double corr = 0.0;  // Pearson correlation coefficient
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;  // sample standard error of the mean
  std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& values);

}  // namespace rpf
