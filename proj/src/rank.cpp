#include "netfactor/rank.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "netfactor/task.hpp"

namespace netfactor {

RankReport numerical_rank(const Eigen::MatrixXcd& m, double tol) {
  if (m.size() == 0) throw std::invalid_argument("numerical_rank: empty matrix");
  if (!m.allFinite()) throw std::invalid_argument("numerical_rank: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  RankReport report;
  report.tol_used = tol;
  double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
    double s = svd.singularValues()(k);
    report.singular_values.push_back(s);
    if (top > 0.0 && s > tol * top) ++report.rank;
  }
  return report;
}

ForcedRowResult forced_row_combination(const Eigen::MatrixXcd& m, double tol) {
  if (m.rows() != 4) throw std::invalid_argument("forced_row_combination: need 4 rows");
  ForcedRowResult result;

  Eigen::MatrixXcd top3 = m.topRows(3);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(top3);
  double s0 = svd.singularValues()(0);
  result.rows_independent = s0 > 0.0 && svd.singularValues()(2) > tol * s0;
  if (!result.rows_independent) return result;

  // Solve row4^T = [row1; row2; row3]^T * coeffs in the least-squares sense.
  Eigen::MatrixXcd a = top3.transpose();
  Eigen::VectorXcd b = m.row(3).transpose();
  Eigen::Vector3cd coeffs = a.completeOrthogonalDecomposition().solve(b);
  double residual = (a * coeffs - b).norm();
  if (residual > tol)
    throw std::invalid_argument(
        "forced_row_combination: row 4 is not in the span of rows 1-3 (matrix "
        "is not rank 3 on this row pattern)");
  result.coeffs = coeffs;
  result.residual = residual;
  for (int k = 0; k < 3; ++k)
    if (coeffs(k).real() < -tol) result.negative_coefficient = true;
  return result;
}

FoolingSet fooling_set_lower_bound(const Eigen::MatrixXd& m, int max_size) {
  if ((m.array() < 0.0).any())
    throw std::invalid_argument("fooling_set_lower_bound: negative entries");

  std::vector<std::pair<Eigen::Index, Eigen::Index>> positive;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) > 0.0) positive.push_back({i, j});
  const size_t n = positive.size();
  if (n > 64)
    throw std::invalid_argument("fooling_set_lower_bound: more than 64 positive entries");
  if (n == 0) return {};

  // Compatibility graph: entries (i,j), (k,l) may share a fooling set iff
  // m(i,l) * m(k,j) == 0.
  std::vector<std::uint64_t> compat(n, 0);
  for (size_t p = 0; p < n; ++p)
    for (size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      auto [i, j] = positive[p];
      auto [k, l] = positive[q];
      if (m(i, l) * m(k, j) == 0.0) compat[p] |= (1ULL << q);
    }

  // Branch and bound for the maximum clique, capped at max_size.
  std::vector<size_t> best, current;
  auto extend = [&](auto&& self, std::uint64_t candidates) -> void {
    if (current.size() > best.size()) best = current;
    if (static_cast<int>(best.size()) >= max_size) return;
    while (candidates) {
      std::uint64_t rest = candidates;
      if (current.size() + static_cast<size_t>(__builtin_popcountll(rest)) <= best.size())
        return;
      size_t p = static_cast<size_t>(__builtin_ctzll(candidates));
      candidates &= candidates - 1;
      current.push_back(p);
      self(self, rest & compat[p] & ~(1ULL << p));
      current.pop_back();
    }
  };
  std::uint64_t all = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
  extend(extend, all);

  FoolingSet out;
  out.size = static_cast<int>(best.size());
  for (size_t p : best) out.witness.push_back(positive[p]);
  std::sort(out.witness.begin(), out.witness.end());
  return out;
}

NNRankBounds nonneg_rank_bounds(const Eigen::MatrixXd& m, const SearchConfig& config) {
  if ((m.array() < 0.0).any())
    throw std::invalid_argument("nonneg_rank_bounds: negative entries");
  if (m.size() == 0) throw std::invalid_argument("nonneg_rank_bounds: empty matrix");

  NNRankBounds bounds;
  bounds.rank = numerical_rank(m.cast<Complex>());
  bounds.fooling = fooling_set_lower_bound(m);
  bounds.lower = std::max(bounds.rank.rank, bounds.fooling.size);
  bounds.lower = std::max(bounds.lower, 1);

  const Eigen::Index rows = m.rows(), cols = m.cols();
  const int cap = static_cast<int>(std::min(rows, cols));

  // A non-negative matrix has non-negative rank 1 iff its rank is 1; the
  // leading singular pair can be taken entrywise non-negative.
  if (bounds.lower <= 1) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double s0 = svd.singularValues()(0);
    bool rank_one = s0 > 0.0;
    for (Eigen::Index k = 1; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()(k) > 1e-9 * s0) rank_one = false;
    if (rank_one) {
      Eigen::VectorXd u = (svd.matrixU().col(0) * std::sqrt(s0)).cwiseAbs();
      Eigen::VectorXd v = (svd.matrixV().col(0) * std::sqrt(s0)).cwiseAbs();
      bounds.upper = 1;
      bounds.upper_witness = {
          from_matrix(Eigen::MatrixXcd(u.cast<Complex>()), "iu", "ch", Domain::NonNegative),
          from_matrix(Eigen::MatrixXcd(v.cast<Complex>().transpose()), "ch", "iv",
                      Domain::NonNegative)};
      return bounds;
    }
  }

  Tensor matrix_tensor = from_matrix(m.cast<Complex>(), "u", "v", Domain::NonNegative);
  DistributionTask task = task_from_matrix(matrix_tensor, Domain::NonNegative);

  bool searched_and_failed = false;
  for (int r = std::max(bounds.lower, 2); r < cap; ++r) {
    SearchResult result = als_search(channel_network(r, rows, cols), task,
                                     Domain::NonNegative, config);
    if (result.hit) {
      bounds.upper = r;
      bounds.upper_witness = {result.best_assignment.node_tensors.at("U"),
                              result.best_assignment.node_tensors.at("V")};
      bounds.inconclusive_gap = false;
      return bounds;
    }
    searched_and_failed = true;
  }

  // Trivial witness at the cap: m = I * m (or m * I when rows < cols).
  bounds.upper = cap;
  if (rows <= cols) {
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(rows, rows);
    bounds.upper_witness = {from_matrix(identity, "iu", "ch", Domain::NonNegative),
                            from_matrix(m.cast<Complex>(), "ch", "iv", Domain::NonNegative)};
  } else {
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(cols, cols);
    bounds.upper_witness = {from_matrix(m.cast<Complex>(), "iu", "ch", Domain::NonNegative),
                            from_matrix(identity, "ch", "iv", Domain::NonNegative)};
  }
  bounds.inconclusive_gap = searched_and_failed && bounds.upper > bounds.lower;
  return bounds;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> complex_compression_pair() {
  Eigen::MatrixXcd c(4, 3), f(3, 4);
  c << 1, 1, 0,
       0, 1, 1,
       0, 0, 1,
       1, 0, 0;
  f << 1, 0, 0, 1,
       0, 1, 0, -1,
       0, 0, 1, 1;
  return {c, f};
}

}  // namespace netfactor
