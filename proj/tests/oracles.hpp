// Independent reference implementations used to check the library: a naive
// nested-loop contraction that never touches the production engine's
// reshape/matmul path, plus random instance generators shared by the test
// suites.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "netfactor/contraction.hpp"
#include "netfactor/network.hpp"
#include "netfactor/rng.hpp"
#include "netfactor/tensor.hpp"
#include "netfactor/verify.hpp"

namespace netfactor::testing {

// Sums the plan entry by entry: for every combination of free and bonded
// index values, multiply one entry from each tensor.
inline Tensor naive_contract(const ContractionPlan& plan) {
  struct AxisSlot {
    size_t tensor;
    size_t axis;
  };
  // Variables: one per bond, one per free label.
  std::map<std::string, std::vector<AxisSlot>> occurrences;
  for (size_t t = 0; t < plan.tensors.size(); ++t) {
    const auto& axes = plan.tensors[t].axes();
    for (size_t a = 0; a < axes.size(); ++a)
      occurrences[axes[a].label].push_back({t, a});
  }

  // var id -> slots bound to it
  std::vector<std::vector<AxisSlot>> var_slots;
  std::vector<Index> var_dims;
  std::map<std::string, size_t> used;  // how many occurrences consumed per label

  auto bind = [&](const std::string& label) {
    AxisSlot slot = occurrences.at(label).at(used[label]++);
    return slot;
  };

  size_t n_bond_vars = 0;
  for (const auto& [x, y] : plan.bonds) {
    AxisSlot sx = bind(x);
    AxisSlot sy = bind(y);
    var_slots.push_back({sx, sy});
    var_dims.push_back(plan.tensors[sx.tensor].axes()[sx.axis].dim);
    ++n_bond_vars;
  }
  std::vector<Axis> out_axes;
  for (const std::string& label : plan.free) {
    AxisSlot s = bind(label);
    var_slots.push_back({s});
    Index dim = plan.tensors[s.tensor].axes()[s.axis].dim;
    var_dims.push_back(dim);
    out_axes.push_back({label, dim});
  }

  Domain domain = Domain::NonNegative;
  for (const Tensor& t : plan.tensors)
    if (t.domain() != Domain::NonNegative) domain = Domain::Complex;

  Tensor out = Tensor::zeros(out_axes, Domain::Complex);
  std::vector<Index> values(var_dims.size(), 0);
  std::vector<std::vector<Index>> idx(plan.tensors.size());
  for (size_t t = 0; t < plan.tensors.size(); ++t)
    idx[t].resize(static_cast<size_t>(plan.tensors[t].rank()));

  while (true) {
    for (size_t v = 0; v < var_slots.size(); ++v)
      for (const AxisSlot& s : var_slots[v]) idx[s.tensor][s.axis] = values[v];
    Complex term(1.0, 0.0);
    for (size_t t = 0; t < plan.tensors.size(); ++t)
      term *= plan.tensors[t].at(idx[t]);
    std::vector<Index> out_idx(values.begin() + static_cast<std::ptrdiff_t>(n_bond_vars),
                               values.end());
    out.set(out_idx, out.at(out_idx) + term);

    size_t v = var_dims.size();
    while (v > 0) {
      --v;
      if (++values[v] < var_dims[v]) break;
      values[v] = 0;
      if (v == 0) return out.retagged(domain);
    }
    if (var_dims.empty()) return out.retagged(domain);
  }
}

inline Tensor random_tensor(RandomStream& rng, std::vector<Axis> axes, Domain domain,
                            double scale = 1.0) {
  Index n = 1;
  for (const Axis& a : axes) n *= a.dim;
  Eigen::VectorXcd data(n);
  for (Index k = 0; k < n; ++k) {
    if (domain == Domain::NonNegative)
      data[k] = Complex(rng.uniform(0.0, scale), 0.0);
    else
      data[k] = Complex(rng.gaussian(), rng.gaussian()) * (scale / std::sqrt(2.0));
  }
  return Tensor(std::move(axes), std::move(data), domain);
}

// Random tree network: `internal` coding nodes joined by tree edges, plus
// client leaves keeping every coding node at degree >= 2. Edge dims drawn
// from {2, 3}.
inline Network random_tree_network(RandomStream& rng, int internal, int max_extra_clients = 1) {
  std::vector<NetworkNode> nodes;
  std::vector<NetworkEdge> edges;
  std::vector<int> degree(static_cast<size_t>(internal), 0);
  int label = 0;
  for (int i = 0; i < internal; ++i) {
    std::string id = "n" + std::to_string(i);
    nodes.push_back({id, false});
    if (i > 0) {
      int parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
      edges.push_back({"n" + std::to_string(parent), id, static_cast<Index>(2 + rng.below(2)),
                       "e" + std::to_string(label++)});
      ++degree[static_cast<size_t>(parent)];
      ++degree[static_cast<size_t>(i)];
    }
  }
  for (int i = 0; i < internal; ++i) {
    int needed = std::max(1, 2 - degree[static_cast<size_t>(i)]);
    int n_clients =
        needed + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_extra_clients + 1)));
    for (int c = 0; c < n_clients; ++c) {
      std::string id = "k" + std::to_string(i) + "_" + std::to_string(c);
      nodes.push_back({id, true});
      edges.push_back({"n" + std::to_string(i), id, static_cast<Index>(2 + rng.below(2)),
                       "e" + std::to_string(label++)});
    }
  }
  return Network(std::move(nodes), std::move(edges));
}

inline NodeAssignment random_assignment(RandomStream& rng, const Network& net,
                                        Domain domain, double scale = 1.0) {
  NodeAssignment asg;
  asg.domain = domain;
  for (const std::string& id : net.internal_nodes()) {
    std::vector<Axis> axes;
    for (const NetworkEdge& e : net.incident_edges(id)) axes.push_back({e.label, e.dim});
    asg.node_tensors.emplace(id, random_tensor(rng, std::move(axes), domain, scale));
  }
  return asg;
}

}  // namespace netfactor::testing
