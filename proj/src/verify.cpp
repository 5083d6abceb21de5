#include "netfactor/verify.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace netfactor {

void check_assignment_structure(const Network& net, const NodeAssignment& assignment) {
  net.require_valid();
  std::vector<std::string> internal = net.internal_nodes();
  for (const std::string& id : internal)
    if (!assignment.node_tensors.count(id))
      throw std::invalid_argument("no tensor assigned to node '" + id + "'");
  for (const auto& [id, t] : assignment.node_tensors) {
    if (!net.has_node(id))
      throw std::invalid_argument("assignment names unknown node '" + id + "'");
    if (net.is_client(id))
      throw std::invalid_argument("client '" + id + "' must not carry a tensor");
    std::vector<NetworkEdge> incident = net.incident_edges(id);
    if (t.rank() != static_cast<Index>(incident.size()))
      throw std::invalid_argument("tensor rank mismatch at node '" + id + "'");
    for (const NetworkEdge& e : incident) {
      if (!t.has_axis(e.label))
        throw std::invalid_argument("tensor at '" + id + "' missing axis '" + e.label + "'");
      if (t.dim(e.label) != e.dim)
        throw std::invalid_argument("tensor at '" + id + "' has wrong dim on axis '" +
                                    e.label + "'");
    }
    if (t.domain() != assignment.domain &&
        !(assignment.domain == Domain::Complex))
      throw std::invalid_argument("tensor at '" + id + "' is outside the assignment domain");
  }
}

Tensor realized_tensor(const Network& net, const NodeAssignment& assignment) {
  check_assignment_structure(net, assignment);

  // Guard against free-label collisions after client edges are renamed to
  // client ids.
  std::set<std::string> client_ids;
  for (const std::string& c : net.clients()) client_ids.insert(c);
  for (const NetworkEdge& e : net.edges()) {
    bool a_client = net.is_client(e.a), b_client = net.is_client(e.b);
    if (!a_client && !b_client && client_ids.count(e.label))
      throw std::invalid_argument("internal edge label '" + e.label +
                                  "' collides with a client id");
  }

  std::vector<Tensor> tensors;
  std::vector<std::string> order;  // node id per tensor slot
  for (const auto& [id, t] : assignment.node_tensors) {
    // Rename client-edge axes to the adjacent client id.
    std::vector<std::pair<std::string, std::string>> renames;
    for (const NetworkEdge& e : net.incident_edges(id)) {
      std::string other = (e.a == id) ? e.b : e.a;
      if (net.is_client(other)) renames.push_back({e.label, other});
    }
    tensors.push_back(t.relabeled(renames));
    order.push_back(id);
  }

  std::vector<std::pair<std::string, std::string>> bonds;
  for (const NetworkEdge& e : net.edges()) {
    bool a_client = net.is_client(e.a), b_client = net.is_client(e.b);
    if (!a_client && !b_client) {
      bonds.push_back({e.label, e.label});
    } else if (a_client && b_client) {
      tensors.push_back(Tensor::delta({{e.a, e.dim}, {e.b, e.dim}}));
      order.push_back("");
    }
  }

  std::vector<std::string> free = net.clients();
  return contract(ContractionPlan{std::move(tensors), std::move(bonds), std::move(free)});
}

VerifyReport verify_assignment(const Network& net, const DistributionTask& task,
                               const NodeAssignment& assignment, double tol) {
  net.require_valid();
  if (task.domain() == Domain::NonNegative && assignment.domain == Domain::Complex)
    throw std::invalid_argument(
        "complex assignment cannot be verified against a non-negative task");

  std::vector<std::string> net_clients = net.clients();
  std::set<std::string> net_client_set(net_clients.begin(), net_clients.end());
  if (task.clients().size() != net_clients.size())
    throw std::invalid_argument("task clients do not match network clients");
  for (const TaskClient& c : task.clients()) {
    if (!net_client_set.count(c.id))
      throw std::invalid_argument("task client '" + c.id + "' is not a network client");
    const NetworkEdge& e = net.incident_edges(c.id).front();
    if (e.dim != c.dim)
      throw std::invalid_argument("task dim mismatch for client '" + c.id + "'");
  }

  Tensor realized = realized_tensor(net, assignment);

  VerifyReport report;
  if (assignment.domain == Domain::NonNegative) {
    for (const auto& [id, t] : assignment.node_tensors) {
      for (Index k = 0; k < t.size(); ++k) {
        Complex v = t.data()[k];
        if (v.imag() != 0.0 || v.real() < 0.0)
          report.domain_violations.push_back("node '" + id + "' entry " +
                                             std::to_string(k) + " outside R+");
      }
    }
  }

  ScaleFit fit = compute_scale_fit(realized, task.tensor(), task.domain());
  report.scale = fit.scale;
  report.residual = fit.residual;
  report.matched =
      fit.admissible && fit.residual <= tol && report.domain_violations.empty();
  return report;
}

NodeAssignment lift_classical_assignment(const NodeAssignment& assignment) {
  if (assignment.domain != Domain::NonNegative)
    throw std::invalid_argument("lift expects a non-negative assignment");
  NodeAssignment lifted;
  lifted.domain = Domain::Complex;
  for (const auto& [id, t] : assignment.node_tensors)
    lifted.node_tensors.emplace(id, t.retagged(Domain::Complex));
  return lifted;
}

namespace {

// Entry 1 iff all incident indices coincide.
Tensor copy_tensor(const std::vector<Axis>& axes) { return Tensor::delta(axes); }

// Entry 1 iff the incident indices sum to 0 mod 2.
Tensor xor_tensor(const std::vector<Axis>& axes) {
  Tensor t = Tensor::zeros(axes, Domain::NonNegative);
  for (Index flat = 0; flat < t.size(); ++flat) {
    std::vector<Index> multi = t.multi_index(flat);
    Index sum = 0;
    for (Index v : multi) sum += v;
    if (sum % 2 == 0) t.set(multi, Complex(1.0, 0.0));
  }
  return t;
}

}  // namespace

NodeAssignment butterfly_xor_assignment() {
  Network net = butterfly_network();
  auto axes_of = [&](const std::string& id) {
    std::vector<Axis> axes;
    for (const NetworkEdge& e : net.incident_edges(id)) axes.push_back({e.label, e.dim});
    return axes;
  };
  NodeAssignment asg;
  asg.domain = Domain::NonNegative;
  for (const std::string& id : {"A1", "A2", "C"})
    asg.node_tensors.emplace(id, copy_tensor(axes_of(id)));
  for (const std::string& id : {"B", "D1", "D2"})
    asg.node_tensors.emplace(id, xor_tensor(axes_of(id)));
  return asg;
}

NodeAssignment star_ghz_assignment(int n, Index d) {
  Network net = star_network(n, d);
  std::vector<Axis> axes;
  for (const NetworkEdge& e : net.incident_edges("hub")) axes.push_back({e.label, e.dim});
  NodeAssignment asg;
  asg.domain = Domain::NonNegative;
  asg.node_tensors.emplace("hub", Tensor::delta(axes));
  return asg;
}

NodeAssignment ternary_square_cross_assignment(int outcome_bit) {
  if (outcome_bit != 0 && outcome_bit != 1)
    throw std::invalid_argument("outcome bit must be 0 or 1");
  double sign = outcome_bit ? -1.0 : 1.0;

  using E = std::pair<std::vector<Index>, Complex>;
  Tensor a = Tensor::from_entries(
      {{"ia", 2}, {"AB", 3}, {"AC", 3}},
      {E{{0, 0, 2}, 1.0}, E{{0, 2, 0}, 1.0}, E{{1, 1, 2}, 1.0}, E{{1, 2, 1}, 1.0}},
      Domain::Complex);
  Tensor b = Tensor::from_entries(
      {{"ib", 2}, {"AB", 3}, {"BD", 3}},
      {E{{0, 0, 0}, 1.0}, E{{0, 1, 1}, 1.0}, E{{1, 2, 2}, 1.0}}, Domain::Complex);
  Tensor c = Tensor::from_entries(
      {{"ic", 2}, {"AC", 3}, {"CD", 3}},
      {E{{1, 0, 0}, 1.0}, E{{1, 1, 1}, 1.0}, E{{0, 2, 2}, 1.0}}, Domain::Complex);
  Tensor d = Tensor::from_entries(
      {{"id", 2}, {"BD", 3}, {"CD", 3}},
      {E{{0, 0, 2}, 1.0}, E{{1, 1, 2}, 1.0}, E{{0, 2, 0}, sign}, E{{1, 2, 1}, sign}},
      Domain::Complex);

  NodeAssignment asg;
  asg.domain = Domain::Complex;
  asg.node_tensors.emplace("A", std::move(a));
  asg.node_tensors.emplace("B", std::move(b));
  asg.node_tensors.emplace("C", std::move(c));
  asg.node_tensors.emplace("D", std::move(d));
  return asg;
}

}  // namespace netfactor
