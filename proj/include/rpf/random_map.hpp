#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rpf/common.hpp"

namespace rpf {

// Relative geometric tolerances (scaled by base length).
inline constexpr double kFullBranchRel = 1e-10;   // image-vs-base endpoint gap
inline constexpr double kZeroLengthRel = 1e-12;   // discard shorter intervals
inline constexpr double kInvertAbsTol = 1e-13;    // root finding for inverses

// --- branch families -------------------------------------------------------

struct AffineBranch {
  double a = 1.0;  // T(x) = a x + b
  double b = 0.0;
};

// T(x) = c * (x - x0)^p on domains right of x0, c * (x0 - x)^p left of x0.
struct PowerBranch {
  double c = 1.0;
  double x0 = 0.0;
  double p = 1.0;
};

// T(x) = alpha (x - r0)(x - r1); the domain must avoid the vertex.
struct QuadraticBranch {
  double alpha = 1.0;
  double r0 = 0.0;
  double r1 = 0.0;
};

// T(x) = x (1 + 2^gamma x^gamma), the intermittent family on [0, 1/2).
struct MannevillePomeauBranch {
  double gamma = 1.0;
};

using BranchFamily = std::variant<AffineBranch, PowerBranch, QuadraticBranch,
                                  MannevillePomeauBranch>;

class Branch {
 public:
  Branch(Interval domain, BranchFamily family);

  const Interval& domain() const { return domain_; }
  const BranchFamily& family() const { return family_; }
  bool increasing() const { return increasing_; }
  const Interval& image() const { return image_; }

  double forward(double x) const;
  double derivative(double x) const;  // signed T'
  // Preimage of y under this branch; y is clamped into image().  Closed form
  // for affine/power/quadratic, safeguarded bisection-Newton for the
  // intermittent family (absolute tolerance kInvertAbsTol * base length,
  // supplied by the owner as `abs_tol`).
  double invert(double y, double abs_tol) const;

  // |T'| endpoint extremes; valid because |T'| is monotone on a branch for
  // every supported family.
  double abs_deriv_min() const;
  double abs_deriv_max() const;

  std::string family_tag() const;

 private:
  Interval domain_;
  BranchFamily family_;
  bool increasing_ = true;
  Interval image_{0.0, 1.0};
};

// --- open maps --------------------------------------------------------------

// One level-1 cylinder: a maximal surviving interval inside one branch.
struct Level1Element {
  Interval dom;
  int branch = 0;
  Interval image;
  bool full = false;
};

class OpenMap {
 public:
  // Branch domains must tile `base` (up to zero-length gaps); `hole` is the
  // finite union of open intervals removed from the state space.
  OpenMap(Interval base, std::vector<Branch> branches, IntervalSet hole);

  const Interval& base() const { return base_; }
  const std::vector<Branch>& branches() const { return branches_; }
  const IntervalSet& hole() const { return hole_; }
  const IntervalSet& survivor() const { return survivor_; }
  const std::vector<Level1Element>& elements() const { return elements_; }

  double invert_tol() const { return kInvertAbsTol * base_.length(); }
  double full_tol() const { return kFullBranchRel * base_.length(); }
  double zero_tol() const { return kZeroLengthRel * base_.length(); }

  // At least one full branch whose domain avoids every hole: required by all
  // spectral constructions (it keeps inf L^(n) 1 positive).
  bool has_protected_full_branch() const;

  int full_count() const;            // b_f at level 1
  int longest_partial_run() const;   // xi at level 1

 private:
  Interval base_;
  std::vector<Branch> branches_;
  IntervalSet hole_;
  IntervalSet survivor_;
  std::vector<Level1Element> elements_;
};

// A finite family of open maps over a common base interval, indexed by the
// driver's symbols.
struct MapFamily {
  Interval base{0.0, 1.0};
  std::vector<OpenMap> maps;

  const OpenMap& at(int symbol) const {
    if (symbol < 0 || static_cast<std::size_t>(symbol) >= maps.size())
      fail_schema("symbol out of range for map family");
    return maps[static_cast<std::size_t>(symbol)];
  }
};

void validate_family(const MapFamily& family);

// --- composed survivor partitions ------------------------------------------

// One element of the level-n partition for a word: maximal surviving interval
// on which the n-step composition is a homeomorphism onto its image.
struct SurvivorElement {
  Interval dom;                    // in the starting fiber's coordinates
  Interval image;                  // forward image under the word
  bool full = false;
  std::vector<int> branch_chain;   // branch index per step
};

struct SurvivorStats {
  std::int64_t element_count = 0;
  std::int64_t full_count = 0;        // b_f^(n)
  std::int64_t longest_partial_run = 0;  // xi^(n)
};

// Streaming left-to-right enumeration of the level-n partition for `word`
// (map indices, first applied first).  The visitor receives elements in
// increasing domain order; `dom` is only materialized when
// `materialize_domains` is true (it costs an inverse chain per clip).
class SurvivorWalker {
 public:
  struct Element {
    Interval dom;     // valid only when domains are materialized
    Interval image;
    bool full;
  };
  using Visitor = std::function<void(const Element&)>;

  SurvivorWalker(const MapFamily& family, std::vector<int> word,
                 bool materialize_domains);

  void walk(const Visitor& visit) const;
  SurvivorStats stats() const;

 private:
  const MapFamily& family_;
  std::vector<int> word_;
  bool materialize_;
};

// Materialized partition (use only for modest n; grows like the element
// count).
std::vector<SurvivorElement> survivor_partition(const MapFamily& family,
                                                const std::vector<int>& word);

SurvivorStats survivor_stats(const MapFamily& family,
                             const std::vector<int>& word);

}  // namespace rpf
