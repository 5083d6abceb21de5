#include "netfactor/network.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace netfactor {

Network::Network(std::vector<NetworkNode> nodes, std::vector<NetworkEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {}

bool Network::has_node(const std::string& id) const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [&](const NetworkNode& n) { return n.id == id; });
}

bool Network::is_client(const std::string& id) const {
  for (const NetworkNode& n : nodes_)
    if (n.id == id) return n.is_client;
  throw std::invalid_argument("no node '" + id + "'");
}

Index Network::degree(const std::string& id) const {
  Index d = 0;
  for (const NetworkEdge& e : edges_)
    if (e.a == id || e.b == id) ++d;
  return d;
}

std::vector<NetworkEdge> Network::incident_edges(const std::string& id) const {
  std::vector<NetworkEdge> out;
  for (const NetworkEdge& e : edges_)
    if (e.a == id || e.b == id) out.push_back(e);
  return out;
}

std::vector<std::string> Network::clients() const {
  std::vector<std::string> out;
  for (const NetworkNode& n : nodes_)
    if (n.is_client) out.push_back(n.id);
  return out;
}

std::vector<std::string> Network::internal_nodes() const {
  std::vector<std::string> out;
  for (const NetworkNode& n : nodes_)
    if (!n.is_client) out.push_back(n.id);
  return out;
}

const NetworkEdge& Network::edge_by_label(const std::string& label) const {
  for (const NetworkEdge& e : edges_)
    if (e.label == label) return e;
  throw std::invalid_argument("no edge labeled '" + label + "'");
}

const NetworkEdge& Network::find_edge(const std::string& a,
                                      const std::string& b) const {
  for (const NetworkEdge& e : edges_)
    if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) return e;
  throw std::invalid_argument("no edge joining '" + a + "' and '" + b + "'");
}

ValidationReport Network::validate() const {
  ValidationReport report;
  auto flag = [&](const std::string& msg) { report.violations.push_back(msg); };

  std::set<std::string> node_ids;
  for (const NetworkNode& n : nodes_) {
    if (n.id.empty()) flag("empty node id");
    if (!node_ids.insert(n.id).second) flag("duplicate node id '" + n.id + "'");
  }

  std::set<std::string> labels;
  for (const NetworkEdge& e : edges_) {
    if (!node_ids.count(e.a)) flag("edge '" + e.label + "' endpoint '" + e.a + "' does not exist");
    if (!node_ids.count(e.b)) flag("edge '" + e.label + "' endpoint '" + e.b + "' does not exist");
    if (e.a == e.b) flag("self-loop at '" + e.a + "'");
    if (e.dim < 2) flag("edge '" + e.label + "' has dim < 2");
    if (e.label.empty()) flag("edge with empty label");
    if (!labels.insert(e.label).second) flag("duplicate edge label '" + e.label + "'");
  }

  bool any_client = false;
  for (const NetworkNode& n : nodes_) {
    Index deg = degree(n.id);
    if (n.is_client) {
      any_client = true;
      if (deg != 1) flag("client '" + n.id + "' is not a leaf (degree " + std::to_string(deg) + ")");
    } else if (deg == 1) {
      flag("leaf '" + n.id + "' is not flagged as a client");
    }
  }
  if (!any_client) flag("network has no client");

  if (report.ok() && connected_components(*this).size() > 1)
    report.warnings.push_back("network is disconnected");
  return report;
}

void Network::require_valid() const {
  ValidationReport report = validate();
  if (report.ok()) return;
  std::string msg = "invalid network:";
  for (const std::string& v : report.violations) msg += "\n  " + v;
  throw std::invalid_argument(msg);
}

std::vector<std::vector<std::string>> connected_components(
    const Network& net, const std::vector<std::string>& excluded_labels) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const NetworkNode& n : net.nodes()) adj[n.id];
  for (const NetworkEdge& e : net.edges()) {
    if (std::find(excluded_labels.begin(), excluded_labels.end(), e.label) !=
        excluded_labels.end())
      continue;
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<std::string> seen;
  std::vector<std::vector<std::string>> components;
  for (const NetworkNode& n : net.nodes()) {
    if (seen.count(n.id)) continue;
    std::vector<std::string> component, stack{n.id};
    seen.insert(n.id);
    while (!stack.empty()) {
      std::string id = stack.back();
      stack.pop_back();
      component.push_back(id);
      for (const std::string& next : adj[id])
        if (seen.insert(next).second) stack.push_back(next);
    }
    std::sort(component.begin(), component.end());
    components.push_back(std::move(component));
  }
  return components;
}

Network single_edge_network(Index d) {
  if (d < 2) throw std::invalid_argument("single-edge dim must be >= 2");
  return Network({{"u", true}, {"v", true}}, {{"u", "v", d, "ch"}});
}

Network channel_network(Index d, Index client_dim_u, Index client_dim_v) {
  if (client_dim_u == 0) client_dim_u = d;
  if (client_dim_v == 0) client_dim_v = d;
  if (d < 2 || client_dim_u < 2 || client_dim_v < 2)
    throw std::invalid_argument("channel dims must be >= 2");
  return Network({{"u", true}, {"U", false}, {"V", false}, {"v", true}},
                 {{"u", "U", client_dim_u, "iu"},
                  {"U", "V", d, "ch"},
                  {"V", "v", client_dim_v, "iv"}});
}

Network butterfly_network() {
  std::vector<NetworkNode> nodes = {
      {"S1", true}, {"S2", true}, {"T1", true}, {"T2", true},
      {"A1", false}, {"A2", false}, {"B", false}, {"C", false},
      {"D1", false}, {"D2", false}};
  std::vector<NetworkEdge> edges = {
      {"S1", "A1", 2, "s1a1"}, {"S2", "A2", 2, "s2a2"},
      {"A1", "B", 2, "a1b"},   {"A2", "B", 2, "a2b"},
      {"B", "C", 2, "bc"},     {"C", "D1", 2, "cd1"},
      {"C", "D2", 2, "cd2"},   {"A1", "D2", 2, "a1d2"},
      {"A2", "D1", 2, "a2d1"}, {"D1", "T1", 2, "d1t1"},
      {"D2", "T2", 2, "d2t2"}};
  return Network(std::move(nodes), std::move(edges));
}

Network square_network(Index d_internal, Index d_client) {
  if (d_internal < 2 || d_client < 2)
    throw std::invalid_argument("square dims must be >= 2");
  std::vector<NetworkNode> nodes = {
      {"A", false}, {"B", false}, {"C", false}, {"D", false},
      {"a", true},  {"b", true},  {"c", true},  {"d", true}};
  std::vector<NetworkEdge> edges = {
      {"A", "B", d_internal, "beta"},  {"B", "C", d_internal, "gamma"},
      {"C", "D", d_internal, "delta"}, {"D", "A", d_internal, "alpha"},
      {"A", "a", d_client, "ia"},      {"B", "b", d_client, "ib"},
      {"C", "c", d_client, "ic"},      {"D", "d", d_client, "id"}};
  return Network(std::move(nodes), std::move(edges));
}

Network ternary_square_network() {
  std::vector<NetworkNode> nodes = {
      {"A", false}, {"B", false}, {"C", false}, {"D", false},
      {"a", true},  {"b", true},  {"c", true},  {"d", true}};
  std::vector<NetworkEdge> edges = {
      {"A", "B", 3, "AB"}, {"A", "C", 3, "AC"},
      {"B", "D", 3, "BD"}, {"C", "D", 3, "CD"},
      {"A", "a", 2, "ia"}, {"B", "b", 2, "ib"},
      {"C", "c", 2, "ic"}, {"D", "d", 2, "id"}};
  return Network(std::move(nodes), std::move(edges));
}

Network star_network(int n, Index d) {
  if (n < 2 || d < 2) throw std::invalid_argument("star needs n >= 2 and d >= 2");
  std::vector<NetworkNode> nodes = {{"hub", false}};
  std::vector<NetworkEdge> edges;
  for (int i = 1; i <= n; ++i) {
    std::string c = "c" + std::to_string(i);
    nodes.push_back({c, true});
    edges.push_back({"hub", c, d, "e" + std::to_string(i)});
  }
  return Network(std::move(nodes), std::move(edges));
}

}  // namespace netfactor
