#pragma once

#include <string>
#include <vector>

#include "netfactor/tensor.hpp"

namespace netfactor {

struct NetworkNode {
  std::string id;
  bool is_client = false;

  friend bool operator==(const NetworkNode&, const NetworkNode&) = default;
};

struct NetworkEdge {
  std::string a;
  std::string b;
  Index dim = 2;
  std::string label;

  friend bool operator==(const NetworkEdge&, const NetworkEdge&) = default;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

/// Undirected weighted graph with leaf clients. Parallel edges are allowed
/// (distinct labels); self-loops are not.
class Network {
 public:
  Network() = default;
  Network(std::vector<NetworkNode> nodes, std::vector<NetworkEdge> edges);

  const std::vector<NetworkNode>& nodes() const { return nodes_; }
  const std::vector<NetworkEdge>& edges() const { return edges_; }

  bool has_node(const std::string& id) const;
  bool is_client(const std::string& id) const;
  Index degree(const std::string& id) const;
  /// Edges incident to a node, in insertion order.
  std::vector<NetworkEdge> incident_edges(const std::string& id) const;
  /// Client node ids in insertion order.
  std::vector<std::string> clients() const;
  /// Non-client node ids in insertion order.
  std::vector<std::string> internal_nodes() const;
  const NetworkEdge& edge_by_label(const std::string& label) const;
  /// First edge joining a and b (either orientation); throws if absent.
  const NetworkEdge& find_edge(const std::string& a, const std::string& b) const;

  ValidationReport validate() const;
  /// Throws std::invalid_argument listing the violations, if any.
  void require_valid() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<NetworkNode> nodes_;
  std::vector<NetworkEdge> edges_;
};

/// Connected components over node ids; edges whose label appears in
/// excluded_labels are ignored.
std::vector<std::vector<std::string>> connected_components(
    const Network& net, const std::vector<std::string>& excluded_labels = {});

// Canonical instances.

/// Two clients u, v joined by one dim-d edge (the network is the channel).
Network single_edge_network(Index d);
/// Two clients u, v behind coding nodes U, V joined by a dim-d channel;
/// client edge dims default to d.
Network channel_network(Index d, Index client_dim_u = 0, Index client_dim_v = 0);
/// The butterfly: sources S1, S2 and sinks T1, T2 on coding nodes A1, A2, B,
/// C, D1, D2, every edge dim 2.
Network butterfly_network();
/// Internal 4-cycle A-B-C-D with edge dim d_internal and one client leaf per
/// corner with edge dim d_client.
Network square_network(Index d_internal, Index d_client);
/// Internal square A,B,C,D with dim-3 edges A-B, A-C, B-D, C-D and dim-2
/// client leaves a, b, c, d.
Network ternary_square_network();
/// One center with n client leaves, all edges dim d.
Network star_network(int n, Index d);

}  // namespace netfactor
