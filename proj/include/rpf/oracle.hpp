#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rpf/transfer.hpp"

namespace rpf {

// Brute-force cross-check path: a sparse Ulam discretization of each
// single-step operator, plus a dense nodewise re-evaluation of the operator
// formula.  Deliberately independent of the piecewise-function calculus:
// only the branch geometry (forward/inverse/derivative) is shared with the
// main path, so agreement actually validates something.

// M[k][i] ~ cell-average over cell k of the operator applied to a unit
// density on cell i: per branch, the surviving part of cell i is pushed
// forward and g(T^{-1}y) is integrated over the overlap with cell k by a
// 32-point composite midpoint rule (in the image variable), normalized by
// the cell width.  Column-major sparse storage.
struct UlamMatrix {
  int cells = 0;
  Interval base{0.0, 1.0};
  // cols[i]: (row index k, entry) pairs, ascending in k
  std::vector<std::vector<std::pair<int, double>>> cols;
};

UlamMatrix ulam_matrix(const System& sys, int symbol, int cells);

// w = M v on cell values.
std::vector<double> ulam_apply(const UlamMatrix& m,
                               const std::vector<double>& v);

// Expected-pressure estimate from the matrix cocycle, averaged over
// base_count base points with spacing n.  Two extraction conventions of the
// same renormalized product are reported: the l1 growth rate of the cocycle
// applied to the uniform probability vector, and the growth rate of the
// minimum cell value of the cocycle applied to the constant-one vector (the
// convention matching the Einf-based main-path estimator).
struct OracleLyapunov {
  int cells = 0;
  int n = 0;
  int base_count = 0;
  double l1_mean = 0.0;
  double l1_stderr = 0.0;
  double einf_mean = 0.0;
  double einf_stderr = 0.0;
};

OracleLyapunov oracle_lyapunov(const System& sys, int cells, int n,
                               int base_count);

// Cell-value profile of the equivariant density at `fiber`: the matrix
// cocycle over the `depth` preceding fibers applied to the constant-one
// vector, normalized to minimum value 1.
std::vector<double> oracle_density(const System& sys, std::int64_t fiber,
                                   int depth, int cells);

// Dense nodewise application of the one-step operator formula on a uniform
// grid of `values.size()` nodes spanning the base interval: at each node x,
// sum g(x_Z) f(x_Z) over branches Z with x in T(Z) and x_Z = T_Z^{-1}(x)
// surviving the hole; f between nodes is linear.
std::vector<double> grid_apply(const System& sys, int symbol,
                               const std::vector<double>& values);

}  // namespace rpf
