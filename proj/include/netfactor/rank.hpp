#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "netfactor/search.hpp"
#include "netfactor/tensor.hpp"

namespace netfactor {

struct RankReport {
  int rank = 0;
  std::vector<double> singular_values;
  double tol_used = 0.0;
};

/// Rank by singular-value thresholding: count of values above
/// tol * (largest singular value).
RankReport numerical_rank(const Eigen::MatrixXcd& m, double tol = 1e-9);

struct ForcedRowResult {
  bool rows_independent = false;  // rows 1-3 linearly independent
  Eigen::Vector3cd coeffs;        // row4 = l*row1 + m*row2 + n*row3
  double residual = 0.0;
  bool negative_coefficient = false;  // any coefficient with real part < 0
};

/// For a 4-row matrix whose first three rows are independent, the expansion
/// coefficients of row 4 are forced for every rank-3 factorization; a
/// negative coefficient obstructs non-negative factorizations of that shape.
/// Throws when the rows are independent but row 4 is not in their span
/// within tol.
ForcedRowResult forced_row_combination(const Eigen::MatrixXcd& m, double tol = 1e-10);

struct FoolingSet {
  int size = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> witness;
};

/// Largest set of positive positions that are pairwise incompatible in the
/// cross-entry zero pattern: m(i,l) * m(k,j) == 0 for distinct (i,j), (k,l).
/// Exhaustive search; the matrix may have at most 64 positive entries. The
/// set size lower-bounds the non-negative rank.
FoolingSet fooling_set_lower_bound(const Eigen::MatrixXd& m, int max_size = 64);

struct NNRankBounds {
  int lower = 0;
  int upper = 0;
  RankReport rank;       // the field-rank part of the lower bound
  FoolingSet fooling;    // the combinatorial part of the lower bound
  std::pair<Tensor, Tensor> upper_witness;  // non-negative factors, product ~ m
  bool inconclusive_gap = false;  // searches failed strictly between the bounds
};

/// Sandwiches the non-negative rank: lower = max(rank, fooling set), upper =
/// smallest r at which a multi-start non-negative factorization search over a
/// width-r channel hits, capped by the trivial identity factorization.
NNRankBounds nonneg_rank_bounds(const Eigen::MatrixXd& m, const SearchConfig& config);

/// The explicit rank-3 complex factorization of the typewriter matrix:
/// C (4x3) and F (3x4) with C*F equal to the unnormalized matrix.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> complex_compression_pair();

}  // namespace netfactor
