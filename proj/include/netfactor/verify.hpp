#pragma once

#include <map>
#include <string>
#include <vector>

#include "netfactor/contraction.hpp"
#include "netfactor/network.hpp"
#include "netfactor/task.hpp"

namespace netfactor {

/// One tensor per non-client node, axes labeled by the node's incident edge
/// labels. Clients carry no tensor; their edge indices stay free.
struct NodeAssignment {
  std::map<std::string, Tensor> node_tensors;
  Domain domain = Domain::Complex;
};

struct VerifyReport {
  bool matched = false;
  Complex scale;
  double residual = 0.0;
  std::vector<std::string> domain_violations;
};

/// Checks the assignment against the network shape; throws
/// std::invalid_argument on any structural mismatch.
void check_assignment_structure(const Network& net, const NodeAssignment& assignment);

/// Contracts the assignment along the network: internal edges are bonded,
/// client edge indices are relabeled to the client ids. An edge joining two
/// clients contributes a Kronecker delta (the channel delivered as-is).
Tensor realized_tensor(const Network& net, const NodeAssignment& assignment);

/// Decides whether the assignment realizes the task up to an admissible
/// scale in the task's domain.
VerifyReport verify_assignment(const Network& net, const DistributionTask& task,
                               const NodeAssignment& assignment,
                               double tol = 1e-8);

/// Re-tags every node tensor from NonNegative to Complex; entries unchanged.
NodeAssignment lift_classical_assignment(const NodeAssignment& assignment);

// Bundled assignments for the canonical instances.

/// Butterfly crossing solution: copy tensors at A1, A2, C and parity (XOR)
/// tensors at B, D1, D2.
NodeAssignment butterfly_xor_assignment();
/// Star center holding the generalized delta; realizes GHZ(n, d).
NodeAssignment star_ghz_assignment(int n, Index d);
/// Ternary-square solution delivering the cross pairs (a,d),(b,c); the
/// outcome bit selects the sign pattern of the D measurement branch.
NodeAssignment ternary_square_cross_assignment(int outcome_bit);

}  // namespace netfactor
