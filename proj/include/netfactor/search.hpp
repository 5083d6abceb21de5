#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netfactor/network.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"

namespace netfactor {

struct SearchConfig {
  int restarts = 100;
  int max_sweeps = 2000;
  std::uint64_t seed = 0;
  double conv_tol = 1e-10;    // relative residual change per sweep
  double success_tol = 1e-6;  // relative residual for declaring a hit
  double init_scale = 1.0;
  int threads = 1;
  /// Optional observer, called after each sweep of each restart.
  std::function<void(int restart, int sweep, double residual)> on_sweep;

  void check() const;
};

struct SearchResult {
  NodeAssignment best_assignment;
  double best_residual = 0.0;
  int best_restart = 0;
  std::vector<double> residual_per_restart;  // +inf marks an aborted restart
  std::vector<int> sweeps_used;
  bool hit = false;
};

/// Alternating least squares over the node tensors: each restart initializes
/// randomly (complex Gaussian / uniform [0, init_scale] by domain) and sweeps
/// the nodes cyclically, solving the per-node linear (or non-negativity
/// constrained) least-squares subproblem exactly. Residuals are relative to
/// the task norm. Restarts run independently; restart r draws from the
/// stream derived from (seed, r), so threaded and serial runs agree.
SearchResult als_search(const Network& net, const DistributionTask& task,
                        Domain domain, const SearchConfig& config);

/// Non-negativity-constrained least squares min |A x - b|, x >= 0, by the
/// active-set method; terminates when every inactive gradient component is
/// below kkt_tol (scaled).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     double kkt_tol = 1e-10);

/// The symmetry-reduced family for the cross task on square(2,2): corners
/// A0 = B0 = D0 = I, B1 = Z, with C0, C1, D1 free and A1 free except
/// A1(0,0) = 1; 15 complex parameters in total.
struct SquareReducedParams {
  Eigen::Matrix2cd a1;  // entry (0,0) forced to 1
  Eigen::Matrix2cd c0;
  Eigen::Matrix2cd c1;
  Eigen::Matrix2cd d1;
};

/// Sum over all client bits of |tr(A B C D) - delta delta|^2.
double square_reduced_objective(const SquareReducedParams& p);

/// Corner matrices of the reduced family as a square(2,2) node assignment.
NodeAssignment square_reduced_assignment(const SquareReducedParams& p);

/// Gradient-descent search (with restarts) over the reduced family. Residual
/// convention matches als_search: sqrt(objective) / |task|.
SearchResult square_cross_reduced_search(const SearchConfig& config);

struct SquareConditionReport {
  struct Corner {
    std::string node;
    std::array<int, 2> rank;      // rank of the corner matrix per client bit
    bool full_rank;
  };
  struct AdjacentPair {
    std::string first, second;
    bool spans;  // the four products form a basis of the 2x2 matrices
  };
  std::vector<Corner> corners;
  std::vector<AdjacentPair> pairs;
  bool passed = false;  // all corners rank 2 and all pairs spanning
};

/// Necessary conditions for a square(2,2) cross solution: every corner
/// matrix has rank 2 and each adjacent product family spans the 2x2
/// matrices. Any candidate failing a condition is certified a non-solution
/// without contraction.
SquareConditionReport square_necessary_conditions(const NodeAssignment& assignment,
                                                  double tol = 1e-9);

}  // namespace netfactor
