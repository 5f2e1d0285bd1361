#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

inline constexpr double kProbSumTol = 1e-12;
inline constexpr double kStationaryTol = 1e-10;

// Independent draws from a fixed law at every integer index.
struct IidDriver {
  std::vector<double> probs;
};

// Stationary finite-state chain.  Forward steps use the transition matrix,
// backward steps the time-reversed chain, both seeded from the stationary law
// at index 0, so symbol_at is well defined on all of Z.
struct MarkovDriver {
  std::vector<std::vector<double>> transition;  // row-stochastic
  std::vector<double> stationary;               // pi P = pi
};

// Deterministic irrational rotation read through a labeled partition of the
// circle: symbol_at(k) = label of frac(omega0 + k * alpha).
struct RotationDriver {
  double alpha = 0.0;
  double omega0 = 0.0;
  struct Cell {
    double lo = 0.0;  // [lo, hi) on the unit circle
    double hi = 1.0;
    int symbol = 0;
  };
  std::vector<Cell> cells;
};

using DriverSpec = std::variant<IidDriver, MarkovDriver, RotationDriver>;

// Base-point policy for Monte-Carlo averages over the driving system.
enum class BasePointPolicy {
  Spread,    // independent-ish indices k_i = i * stride
  Birkhoff,  // consecutive indices 0..K-1 (used for rotations)
};

class Driver {
 public:
  Driver(DriverSpec spec, std::uint64_t seed);

  int symbol_count() const { return symbol_count_; }
  std::uint64_t seed() const { return seed_; }
  bool deterministic() const;

  // Symbol at any integer index; draws are addressable (counter-based), so
  // negative indices are as cheap as positive ones for iid/rotation drivers
  // and cost O(|k|) for the Markov chain.
  int symbol_at(std::int64_t k) const;

  // word[j] = symbol_at(start + j), j = 0..len-1
  std::vector<int> word(std::int64_t start, int len) const;

  // K base-point indices used for integrals over the driving system.
  std::vector<std::int64_t> base_points(int count, int spacing) const;
  BasePointPolicy policy() const;

 private:
  DriverSpec spec_;
  std::uint64_t seed_ = 0;
  int symbol_count_ = 0;
  std::vector<double> iid_cdf_;
  std::vector<std::vector<double>> reversed_;  // time-reversed Markov rows
};

}  // namespace rpf
