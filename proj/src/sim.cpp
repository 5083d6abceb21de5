#include "netfactor/sim.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace netfactor {

namespace {

std::vector<Axis> as_axes(const std::vector<Subsystem>& subs) {
  std::vector<Axis> axes;
  axes.reserve(subs.size());
  for (const Subsystem& s : subs) axes.push_back({s.name, s.dim});
  return axes;
}

Index total_dim(const std::vector<Subsystem>& subs) {
  Index n = 1;
  for (const Subsystem& s : subs) n *= s.dim;
  return n;
}

}  // namespace

PureState::PureState(std::vector<Subsystem> subsystems, Eigen::VectorXcd amplitudes,
                     bool normalized)
    : subsystems_(std::move(subsystems)),
      amplitudes_(std::move(amplitudes)),
      normalized_(normalized) {
  std::set<std::string> names;
  for (const Subsystem& s : subsystems_) {
    if (s.dim < 1) throw std::invalid_argument("subsystem '" + s.name + "' has dim < 1");
    if (!names.insert(s.name).second)
      throw std::invalid_argument("duplicate subsystem name '" + s.name + "'");
  }
  if (amplitudes_.size() != total_dim(subsystems_))
    throw std::invalid_argument("amplitude count does not match subsystem dims");
  if (normalized_ && std::abs(amplitudes_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("state flagged normalized but norm differs from 1");
}

bool PureState::has_subsystem(const std::string& name) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(),
                     [&](const Subsystem& s) { return s.name == name; });
}

Index PureState::subsystem_index(const std::string& name) const {
  for (size_t i = 0; i < subsystems_.size(); ++i)
    if (subsystems_[i].name == name) return static_cast<Index>(i);
  throw std::invalid_argument("no subsystem named '" + name + "'");
}

PureState PureState::normalized_copy() const {
  double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero state");
  return PureState(subsystems_, amplitudes_ / n, true);
}

PureState PureState::reordered(const std::vector<std::string>& names) const {
  if (names.size() != subsystems_.size())
    throw std::invalid_argument("reorder arity mismatch");
  std::vector<Index> perm;
  std::vector<Subsystem> subs;
  for (const std::string& name : names) {
    Index i = subsystem_index(name);
    perm.push_back(i);
    subs.push_back(subsystems_[static_cast<size_t>(i)]);
  }
  std::vector<Axis> axes = as_axes(subsystems_);
  return PureState(std::move(subs), permute_flat(amplitudes_, axes, perm), normalized_);
}

PureState PureState::renamed(const std::string& name, const std::string& new_name,
                             const std::string& new_owner) const {
  std::vector<Subsystem> subs = subsystems_;
  subs[static_cast<size_t>(subsystem_index(name))] = {new_name, new_owner,
                                                      subsystems_[static_cast<size_t>(
                                                          subsystem_index(name))].dim};
  return PureState(std::move(subs), amplitudes_, normalized_);
}

PureState PureState::applied(const Eigen::MatrixXcd& op,
                             const std::vector<std::string>& inputs,
                             const std::vector<Subsystem>& outputs) const {
  // Move the inputs to the front, in the given order.
  std::vector<std::string> order;
  for (const std::string& name : inputs) order.push_back(name);
  Index in_dim = 1;
  std::set<std::string> input_set(inputs.begin(), inputs.end());
  if (input_set.size() != inputs.size())
    throw std::invalid_argument("duplicate input subsystem");
  std::vector<Subsystem> rest;
  for (const Subsystem& s : subsystems_) {
    if (input_set.count(s.name)) continue;
    order.push_back(s.name);
    rest.push_back(s);
  }
  for (const std::string& name : inputs)
    in_dim *= subsystems_[static_cast<size_t>(subsystem_index(name))].dim;

  Index out_dim = 1;
  for (const Subsystem& s : outputs) out_dim *= s.dim;
  if (op.cols() != in_dim || op.rows() != out_dim)
    throw std::invalid_argument("operator shape does not match the subsystems");

  PureState moved = reordered(order);
  Index rest_dim = moved.amplitudes_.size() / in_dim;
  using RowMajor =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> mat(moved.amplitudes_.data(), in_dim, rest_dim);
  RowMajor result = op * mat;

  std::vector<Subsystem> subs = outputs;
  for (const Subsystem& s : rest) {
    if (std::any_of(outputs.begin(), outputs.end(),
                    [&](const Subsystem& o) { return o.name == s.name; }))
      throw std::invalid_argument("output subsystem '" + s.name + "' already exists");
    subs.push_back(s);
  }
  return PureState(std::move(subs),
                   Eigen::Map<Eigen::VectorXcd>(result.data(), result.size()), false);
}

PureState tensor_product(const PureState& a, const PureState& b) {
  std::vector<Subsystem> subs = a.subsystems_;
  subs.insert(subs.end(), b.subsystems_.begin(), b.subsystems_.end());
  Eigen::VectorXcd amps(a.amplitudes_.size() * b.amplitudes_.size());
  for (Index i = 0; i < a.amplitudes_.size(); ++i)
    amps.segment(i * b.amplitudes_.size(), b.amplitudes_.size()) =
        a.amplitudes_[i] * b.amplitudes_;
  return PureState(std::move(subs), std::move(amps), false);
}

double fidelity(const PureState& a, const PureState& b) {
  std::vector<std::string> names;
  for (const Subsystem& s : a.subsystems()) names.push_back(s.name);
  PureState rb = b.reordered(names);
  double na2 = a.amplitudes().squaredNorm();
  double nb2 = rb.amplitudes().squaredNorm();
  if (na2 == 0.0 || nb2 == 0.0)
    throw std::invalid_argument("fidelity of a zero state");
  Complex overlap = a.amplitudes().dot(rb.amplitudes());
  return std::norm(overlap) / (na2 * nb2);
}

PureState task_target_state(const DistributionTask& task) {
  std::vector<Subsystem> subs;
  std::vector<std::string> order;
  for (const TaskClient& c : task.clients()) {
    subs.push_back({c.id, c.id, c.dim});
    order.push_back(c.id);
  }
  Tensor t = task.tensor().transposed(order);
  return PureState(std::move(subs), t.data(), false);
}

PureState build_network_state(const Network& net) {
  net.require_valid();
  PureState state({}, Eigen::VectorXcd::Ones(1), false);
  for (const NetworkEdge& e : net.edges()) {
    Eigen::VectorXcd pair = Eigen::VectorXcd::Zero(e.dim * e.dim);
    for (Index i = 0; i < e.dim; ++i) pair[i * e.dim + i] = 1.0;
    PureState epr({{e.a + "." + e.label, e.a, e.dim}, {e.b + "." + e.label, e.b, e.dim}},
                  std::move(pair), false);
    state = tensor_product(state, epr);
  }
  return state;
}

PureState project_assignment(const Network& net, const NodeAssignment& assignment) {
  check_assignment_structure(net, assignment);
  PureState state = build_network_state(net);

  for (const auto& [id, t] : assignment.node_tensors) {
    std::vector<std::string> inputs;
    for (const Axis& ax : t.axes()) inputs.push_back(id + "." + ax.label);
    // Unnormalized bra with the tensor entries as coefficients.
    Eigen::MatrixXcd bra = t.data().transpose();
    state = state.applied(bra, inputs, {});
  }

  // Remaining subsystems are the client sides; rename them to client ids.
  for (const std::string& c : net.clients()) {
    const NetworkEdge& e = net.incident_edges(c).front();
    state = state.renamed(c + "." + e.label, c, c);
  }
  return state;
}

namespace {

// Branch state kept as independent factors; operations merge factors only
// when they span more than one.
struct FactoredState {
  std::vector<PureState> factors;

  Index factor_of(const std::string& subsystem) const {
    for (size_t i = 0; i < factors.size(); ++i)
      if (factors[i].has_subsystem(subsystem)) return static_cast<Index>(i);
    throw std::invalid_argument("no subsystem named '" + subsystem +
                                "' (already consumed?)");
  }

  bool has(const std::string& subsystem) const {
    return std::any_of(factors.begin(), factors.end(), [&](const PureState& f) {
      return f.has_subsystem(subsystem);
    });
  }

  // Merges the factors containing the given subsystems into one and returns
  // its index.
  Index merge(const std::vector<std::string>& subsystems) {
    std::set<Index> which;
    for (const std::string& s : subsystems) which.insert(factor_of(s));
    std::vector<Index> sorted(which.begin(), which.end());
    Index target = sorted.front();
    for (size_t k = sorted.size(); k-- > 1;) {
      factors[static_cast<size_t>(target)] = tensor_product(
          factors[static_cast<size_t>(target)], factors[static_cast<size_t>(sorted[k])]);
      factors.erase(factors.begin() + static_cast<std::ptrdiff_t>(sorted[k]));
    }
    return target;
  }

  PureState merged_all() const {
    PureState all({}, Eigen::VectorXcd::Ones(1), false);
    for (const PureState& f : factors) all = tensor_product(all, f);
    return all;
  }
};

struct WorkBranch {
  std::map<std::string, std::string> outcomes;
  FactoredState state;
  double probability = 1.0;
};

void apply_send(const Network& net, WorkBranch& branch, const SendStep& step) {
  const NetworkEdge& edge = net.find_edge(step.from, step.to);
  std::string from_side = step.from + "." + edge.label;
  std::string to_side = step.to + "." + edge.label;
  if (!branch.state.has(from_side) || !branch.state.has(to_side))
    throw std::invalid_argument("edge '" + edge.label + "' already consumed");

  FactoredState& fs = branch.state;
  Index fi = fs.merge({step.subsystem, from_side, to_side});
  PureState& f = fs.factors[static_cast<size_t>(fi)];
  Index d = f.subsystems()[static_cast<size_t>(f.subsystem_index(step.subsystem))].dim;
  if (d != edge.dim)
    throw std::invalid_argument("subsystem dim does not match edge '" + edge.label + "'");

  // Perfect teleportation: contract the held subsystem with the near pair
  // half; the far half inherits the payload.
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(d, d * d * d);
  for (Index x = 0; x < d; ++x)
    for (Index j = 0; j < d; ++j) op(j, (x * d + x) * d + j) = 1.0;
  PureState applied = f.applied(op, {step.subsystem, from_side, to_side},
                                {{step.subsystem, step.to, d}});
  f = std::move(applied);
}

}  // namespace

std::vector<Branch> run_protocol(const Network& net,
                                 const std::vector<ProtocolStep>& steps,
                                 const BranchPolicy& policy, RunInfo* info) {
  net.require_valid();

  WorkBranch root;
  for (const NetworkEdge& e : net.edges()) {
    Eigen::VectorXcd pair = Eigen::VectorXcd::Zero(e.dim * e.dim);
    for (Index i = 0; i < e.dim; ++i) pair[i * e.dim + i] = 1.0;
    root.state.factors.push_back(
        PureState({{e.a + "." + e.label, e.a, e.dim}, {e.b + "." + e.label, e.b, e.dim}},
                  std::move(pair), false));
  }

  std::vector<WorkBranch> branches{std::move(root)};

  for (const ProtocolStep& step : steps) {
    if (std::holds_alternative<PrepareStep>(step)) {
      const auto& s = std::get<PrepareStep>(step);
      if (!net.has_node(s.node)) throw std::invalid_argument("unknown node '" + s.node + "'");
      std::vector<Subsystem> subs;
      for (const auto& [name, dim] : s.subsystems) subs.push_back({name, s.node, dim});
      PureState prepared(subs, s.amplitudes, false);
      for (WorkBranch& b : branches) {
        for (const Subsystem& sub : subs)
          if (b.state.has(sub.name))
            throw std::invalid_argument("subsystem '" + sub.name + "' already exists");
        b.state.factors.push_back(prepared);
      }
    } else if (std::holds_alternative<IsometryStep>(step)) {
      const auto& s = std::get<IsometryStep>(step);
      if (!net.has_node(s.node)) throw std::invalid_argument("unknown node '" + s.node + "'");
      Eigen::MatrixXcd gram = s.matrix.adjoint() * s.matrix;
      if ((gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() >
          1e-10)
        throw std::invalid_argument("isometry columns are not orthonormal");
      std::vector<Subsystem> outputs;
      for (const auto& [name, dim] : s.outputs) outputs.push_back({name, s.node, dim});
      for (WorkBranch& b : branches) {
        Index fi = b.state.merge(s.inputs);
        b.state.factors[static_cast<size_t>(fi)] =
            b.state.factors[static_cast<size_t>(fi)].applied(s.matrix, s.inputs, outputs);
      }
    } else if (std::holds_alternative<MeasureStep>(step)) {
      const auto& s = std::get<MeasureStep>(step);
      if (!net.has_node(s.node)) throw std::invalid_argument("unknown node '" + s.node + "'");
      if (s.operators.empty()) throw std::invalid_argument("measurement with no operators");

      // Global family normalization: sum M^dag M <= identity afterwards.
      Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(s.operators.front().second.cols(),
                                                      s.operators.front().second.cols());
      for (const auto& [label, op] : s.operators) {
        if (op.cols() != total.cols())
          throw std::invalid_argument("measurement operators act on mismatched dims");
        total += op.adjoint() * op;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(total);
      double top = eig.eigenvalues().maxCoeff();
      if (top <= 0.0) throw std::invalid_argument("measurement family is zero");
      double normalization = (top > 1.0 + 1e-10) ? std::sqrt(top) : 1.0;
      if (info) info->normalizations.push_back({s.outcome_name, normalization});

      std::vector<Subsystem> outputs;
      for (const auto& [name, dim] : s.outputs) outputs.push_back({name, s.node, dim});

      std::vector<WorkBranch> next;
      for (WorkBranch& b : branches) {
        Index fi = b.state.merge(s.inputs);
        const PureState& f = b.state.factors[static_cast<size_t>(fi)];
        double before2 = f.amplitudes().squaredNorm();
        for (const auto& [label, op] : s.operators) {
          auto it = policy.find(s.outcome_name);
          if (it != policy.end() && it->second != label) continue;
          WorkBranch child = b;
          PureState after =
              child.state.factors[static_cast<size_t>(fi)].applied(op / normalization,
                                                                   s.inputs, outputs);
          double after2 = after.amplitudes().squaredNorm();
          child.state.factors[static_cast<size_t>(fi)] = std::move(after);
          child.probability *= (before2 > 0.0) ? after2 / before2 : 0.0;
          child.outcomes[s.outcome_name] = label;
          next.push_back(std::move(child));
        }
      }
      branches = std::move(next);
    } else if (std::holds_alternative<SendStep>(step)) {
      const auto& s = std::get<SendStep>(step);
      for (WorkBranch& b : branches) apply_send(net, b, s);
    } else {
      const auto& s = std::get<PhaseFixStep>(step);
      for (WorkBranch& b : branches) {
        if (s.condition) {
          auto it = b.outcomes.find(s.condition->first);
          if (it == b.outcomes.end() || it->second != s.condition->second) continue;
        }
        Index fi = b.state.factor_of(s.subsystem);
        PureState& f = b.state.factors[static_cast<size_t>(fi)];
        const Subsystem& sub =
            f.subsystems()[static_cast<size_t>(f.subsystem_index(s.subsystem))];
        if (s.diagonal.size() != sub.dim)
          throw std::invalid_argument("phase-fix diagonal has wrong dim");
        f = f.applied(Eigen::MatrixXcd(s.diagonal.asDiagonal()), {s.subsystem}, {sub});
      }
    }
  }

  std::vector<Branch> out;
  for (const WorkBranch& b : branches)
    out.push_back({b.outcomes, b.state.merged_all(), b.probability});
  return out;
}

std::vector<ProtocolStep> ternary_cross_protocol() {
  std::vector<ProtocolStep> steps;

  // A prepares a qubit for client a and two qutrit payloads.
  Eigen::VectorXcd prep = Eigen::VectorXcd::Zero(2 * 3 * 3);
  for (auto [ia, ab, ac] : {std::array<Index, 3>{0, 0, 2},
                            std::array<Index, 3>{0, 2, 0},
                            std::array<Index, 3>{1, 1, 2},
                            std::array<Index, 3>{1, 2, 1}})
    prep[(ia * 3 + ab) * 3 + ac] = 1.0;
  steps.push_back(PrepareStep{"A", {{"A_a", 2}, {"A_B", 3}, {"A_C", 3}}, prep});
  steps.push_back(SendStep{"A_a", "A", "a"});
  steps.push_back(SendStep{"A_B", "A", "B"});
  steps.push_back(SendStep{"A_C", "A", "C"});

  // B marks whether its payload is 2 on a fresh qubit for client b.
  Eigen::MatrixXcd b_iso = Eigen::MatrixXcd::Zero(6, 3);
  b_iso(0 * 2 + 0, 0) = 1.0;  // |0> -> |0,0>
  b_iso(1 * 2 + 0, 1) = 1.0;  // |1> -> |1,0>
  b_iso(2 * 2 + 1, 2) = 1.0;  // |2> -> |2,1>
  steps.push_back(IsometryStep{"B", {"A_B"}, {{"B_out", 3}, {"B_b", 2}}, b_iso});
  steps.push_back(SendStep{"B_b", "B", "b"});
  steps.push_back(SendStep{"B_out", "B", "D"});

  // C marks whether its payload is below 2.
  Eigen::MatrixXcd c_iso = Eigen::MatrixXcd::Zero(6, 3);
  c_iso(0 * 2 + 1, 0) = 1.0;  // |0> -> |0,1>
  c_iso(1 * 2 + 1, 1) = 1.0;  // |1> -> |1,1>
  c_iso(2 * 2 + 0, 2) = 1.0;  // |2> -> |2,0>
  steps.push_back(IsometryStep{"C", {"A_C"}, {{"C_out", 3}, {"C_c", 2}}, c_iso});
  steps.push_back(SendStep{"C_c", "C", "c"});
  steps.push_back(SendStep{"C_out", "C", "D"});

  // D merges the two payloads into one qubit, up to a sign on half the
  // support; the x = 1 branch is fixed by a Z on b.
  auto d_op = [](double sign) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 9);
    m(0, 0 * 3 + 2) = 1.0;   // |0><02|
    m(1, 1 * 3 + 2) = 1.0;   // |1><12|
    m(0, 2 * 3 + 0) = sign;  // |0><20|
    m(1, 2 * 3 + 1) = sign;  // |1><21|
    return m;
  };
  steps.push_back(MeasureStep{"D",
                              {"B_out", "C_out"},
                              {{"D_out", 2}},
                              "x",
                              {{"0", d_op(1.0)}, {"1", d_op(-1.0)}}});
  Eigen::VectorXcd z(2);
  z << 1.0, -1.0;
  steps.push_back(PhaseFixStep{"B_b", z, std::make_pair(std::string("x"), std::string("1"))});
  steps.push_back(SendStep{"D_out", "D", "d"});
  return steps;
}

PureState relabel_to_clients(const Network& net, const PureState& state) {
  PureState out = state;
  for (const std::string& c : net.clients()) {
    std::vector<std::string> owned;
    for (const Subsystem& s : out.subsystems())
      if (s.owner == c) owned.push_back(s.name);
    if (owned.size() > 1)
      throw std::invalid_argument("client '" + c + "' owns several subsystems");
    if (owned.size() == 1 && owned.front() != c)
      out = out.renamed(owned.front(), c, c);
  }
  return out;
}

LiftedSuccess lifted_success_probability(const Network& net,
                                         const NodeAssignment& assignment,
                                         const std::vector<std::string>& sources,
                                         const std::vector<double>& input_distribution) {
  for (const auto& [id, t] : assignment.node_tensors)
    for (Index k = 0; k < t.size(); ++k) {
      Complex v = t.data()[k];
      bool zero = std::abs(v) <= 1e-12;
      bool one = std::abs(v - Complex(1.0, 0.0)) <= 1e-12;
      if (!zero && !one)
        throw std::invalid_argument("assignment entry at node '" + id +
                                    "' is neither 0 nor 1");
    }

  std::vector<std::string> clients = net.clients();
  std::set<std::string> client_set(clients.begin(), clients.end());
  std::set<std::string> source_set;
  for (const std::string& s : sources) {
    if (!client_set.count(s))
      throw std::invalid_argument("source '" + s + "' is not a client");
    if (!source_set.insert(s).second)
      throw std::invalid_argument("source '" + s + "' listed twice");
  }
  std::vector<std::string> sinks;
  for (const std::string& c : clients)
    if (!source_set.count(c)) sinks.push_back(c);

  Tensor realized = realized_tensor(net, assignment);
  std::vector<std::string> order = sources;
  order.insert(order.end(), sinks.begin(), sinks.end());
  Tensor ordered = realized.transposed(order);

  Index n_inputs = 1;
  for (const std::string& s : sources) n_inputs *= realized.dim(s);
  Index n_outputs = ordered.size() / n_inputs;

  if (static_cast<Index>(input_distribution.size()) != n_inputs)
    throw std::invalid_argument("input distribution length mismatch");
  double mass = 0.0;
  for (double p : input_distribution) {
    if (p < -1e-12) throw std::invalid_argument("negative input probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9)
    throw std::invalid_argument("input distribution does not sum to 1");

  // Row masses of the realized conditional table; deterministic partial maps
  // give 0 or 1 per input.
  std::vector<double> accepted(static_cast<size_t>(n_inputs), 0.0);
  double classical_p = 0.0;
  for (Index i = 0; i < n_inputs; ++i) {
    double row = 0.0;
    for (Index o = 0; o < n_outputs; ++o) row += ordered.data()[i * n_outputs + o].real();
    if (std::abs(row) > 1e-9 && std::abs(row - 1.0) > 1e-9)
      throw std::invalid_argument(
          "assignment does not define a deterministic partial map");
    accepted[static_cast<size_t>(i)] = row;
    classical_p += input_distribution[static_cast<size_t>(i)] * row;
  }

  // Quantum side: sources hold the input superposition; the protocol's
  // projection onto the accepted inputs succeeds with the accepted mass,
  // and the deterministic core runs with probability one.
  std::vector<Subsystem> subs;
  for (const std::string& s : sources) subs.push_back({s, s, realized.dim(s)});
  Eigen::VectorXcd amps(n_inputs);
  for (Index i = 0; i < n_inputs; ++i)
    amps[i] = std::sqrt(std::max(0.0, input_distribution[static_cast<size_t>(i)]));
  PureState input_state(subs, amps, false);

  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(n_inputs, n_inputs);
  for (Index i = 0; i < n_inputs; ++i)
    projector(i, i) = accepted[static_cast<size_t>(i)] > 0.5 ? 1.0 : 0.0;
  PureState projected = input_state.applied(projector, sources, subs);
  double before2 = input_state.amplitudes().squaredNorm();
  double quantum_p = before2 > 0.0 ? projected.amplitudes().squaredNorm() / before2 : 0.0;

  return {classical_p, quantum_p};
}

}  // namespace netfactor
