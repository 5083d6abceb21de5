#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "netfactor/network.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"

namespace netfactor {

struct Subsystem {
  std::string name;
  std::string owner;
  Index dim = 2;

  friend bool operator==(const Subsystem&, const Subsystem&) = default;
};

/// Amplitude vector over an ordered list of labeled qudit subsystems,
/// row-major. Kept unnormalized through protocols; the flag records whether
/// the amplitudes are currently unit-norm.
class PureState {
 public:
  PureState() = default;
  PureState(std::vector<Subsystem> subsystems, Eigen::VectorXcd amplitudes,
            bool normalized = false);

  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  bool normalized() const { return normalized_; }
  double norm() const { return amplitudes_.norm(); }

  bool has_subsystem(const std::string& name) const;
  Index subsystem_index(const std::string& name) const;

  PureState normalized_copy() const;
  PureState reordered(const std::vector<std::string>& names) const;
  PureState renamed(const std::string& name, const std::string& new_name,
                    const std::string& new_owner) const;

  /// Applies op to the named subsystems: they are replaced by the output
  /// subsystems (possibly none, for a bra). op has one column per input
  /// basis state (row-major over the input order) and one row per output
  /// basis state.
  PureState applied(const Eigen::MatrixXcd& op,
                    const std::vector<std::string>& inputs,
                    const std::vector<Subsystem>& outputs) const;

  friend PureState tensor_product(const PureState& a, const PureState& b);

 private:
  std::vector<Subsystem> subsystems_;
  Eigen::VectorXcd amplitudes_;
  bool normalized_ = false;
};

/// |<a|b>|^2 / (|a|^2 |b|^2); subsystems matched by name.
double fidelity(const PureState& a, const PureState& b);

/// Task tensor as a pure state with one subsystem per client.
PureState task_target_state(const DistributionTask& task);

/// The network state: one maximally entangled pair per edge, subsystems
/// named "<node>.<edge label>".
PureState build_network_state(const Network& net);

/// Applies each node tensor as an unnormalized bra on the node's subsystems
/// of the network state and returns the resulting client state (subsystems
/// renamed to the client ids). Equals the contraction of the assignment.
PureState project_assignment(const Network& net, const NodeAssignment& assignment);

// Protocol steps.

struct PrepareStep {
  std::string node;
  std::vector<std::pair<std::string, Index>> subsystems;  // (name, dim)
  Eigen::VectorXcd amplitudes;  // row-major over the subsystems
};

struct IsometryStep {
  std::string node;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, Index>> outputs;
  Eigen::MatrixXcd matrix;  // columns orthonormal within 1e-10
};

struct MeasureStep {
  std::string node;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, Index>> outputs;
  std::string outcome_name;
  /// Operator family, possibly unnormalized; the simulator rescales the
  /// family globally so that sum M^dag M <= identity.
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> operators;
};

/// Teleports a held subsystem along an edge, consuming the edge's pair.
struct SendStep {
  std::string subsystem;
  std::string from;
  std::string to;
};

struct PhaseFixStep {
  std::string subsystem;
  Eigen::VectorXcd diagonal;
  /// Applied only in branches whose (outcome name -> value) record matches.
  std::optional<std::pair<std::string, std::string>> condition;
};

using ProtocolStep =
    std::variant<PrepareStep, IsometryStep, MeasureStep, SendStep, PhaseFixStep>;

struct Branch {
  std::map<std::string, std::string> outcomes;
  PureState state;
  double probability = 1.0;
};

/// Outcome selection: empty means follow every branch.
using BranchPolicy = std::map<std::string, std::string>;

struct RunInfo {
  /// Per measurement, the factor the family was divided by.
  std::vector<std::pair<std::string, double>> normalizations;
};

/// Executes the steps against the network state; measurements split into
/// branches with Born probabilities. Branch probabilities never exceed 1
/// in total.
std::vector<Branch> run_protocol(const Network& net,
                                 const std::vector<ProtocolStep>& steps,
                                 const BranchPolicy& policy = {},
                                 RunInfo* info = nullptr);

/// The scripted protocol distributing the cross pairs (a,d),(b,c) over the
/// ternary square with probability one.
std::vector<ProtocolStep> ternary_cross_protocol();

/// Renames every subsystem owned by a client to the bare client id, for
/// comparison against task targets. Each client must own at most one
/// subsystem.
PureState relabel_to_clients(const Network& net, const PureState& state);

struct LiftedSuccess {
  double classical_p = 0.0;
  double quantum_p = 0.0;
};

/// For a deterministic partial classical assignment (all entries 0/1), the
/// classical success probability under the input distribution and the
/// success probability of the corresponding quantum protocol (source
/// superposition projected onto the accepted inputs). The two agree.
LiftedSuccess lifted_success_probability(const Network& net,
                                         const NodeAssignment& assignment,
                                         const std::vector<std::string>& sources,
                                         const std::vector<double>& input_distribution);

}  // namespace netfactor
