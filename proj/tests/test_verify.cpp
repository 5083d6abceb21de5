#include <doctest.h>

#include "netfactor/contraction.hpp"
#include "netfactor/network.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"
#include "oracles.hpp"

using namespace netfactor;
using netfactor::testing::naive_contract;
using netfactor::testing::random_assignment;
using netfactor::testing::random_tree_network;

namespace {

DistributionTask crossing_task(Domain domain) {
  return cross_pairs_task({{"S1", "T1"}, {"S2", "T2"}}, {2, 2}, domain);
}

// The realized tensor recomputed through the nested-loop oracle instead of
// the production contraction engine.
Tensor oracle_realized(const Network& net, const NodeAssignment& assignment) {
  std::vector<Tensor> tensors;
  for (const auto& [id, t] : assignment.node_tensors) {
    std::vector<std::pair<std::string, std::string>> renames;
    for (const NetworkEdge& e : net.incident_edges(id)) {
      std::string other = (e.a == id) ? e.b : e.a;
      if (net.is_client(other)) renames.push_back({e.label, other});
    }
    tensors.push_back(t.relabeled(renames));
  }
  std::vector<std::pair<std::string, std::string>> bonds;
  for (const NetworkEdge& e : net.edges()) {
    bool a_client = net.is_client(e.a), b_client = net.is_client(e.b);
    if (!a_client && !b_client) bonds.push_back({e.label, e.label});
    if (a_client && b_client)
      tensors.push_back(Tensor::delta({{e.a, e.dim}, {e.b, e.dim}}));
  }
  return naive_contract(ContractionPlan{tensors, bonds, net.clients()});
}

}  // namespace

TEST_CASE("butterfly XOR assignment realizes the crossing task exactly") {
  VerifyReport report = verify_assignment(butterfly_network(),
                                          crossing_task(Domain::NonNegative),
                                          butterfly_xor_assignment());
  CHECK(report.matched);
  CHECK(report.residual <= 1e-12);
  CHECK(std::abs(report.scale - Complex(1.0, 0.0)) < 1e-12);
  CHECK(report.domain_violations.empty());
}

TEST_CASE("star center delta realizes GHZ") {
  for (int n : {3, 4}) {
    VerifyReport report = verify_assignment(star_network(n, 2),
                                            ghz_task(n, 2, Domain::NonNegative),
                                            star_ghz_assignment(n, 2));
    CHECK(report.matched);
    CHECK(report.residual <= 1e-12);
  }
}

TEST_CASE("the all-zero assignment never matches") {
  Network net = square_network(2, 2);
  NodeAssignment zeros;
  zeros.domain = Domain::NonNegative;
  for (const std::string& id : net.internal_nodes()) {
    std::vector<Axis> axes;
    for (const NetworkEdge& e : net.incident_edges(id)) axes.push_back({e.label, e.dim});
    zeros.node_tensors.emplace(id, Tensor::zeros(axes, Domain::NonNegative));
  }
  DistributionTask task = cross_pairs_task({{"a", "c"}, {"b", "d"}}, {2, 2},
                                           Domain::NonNegative);
  VerifyReport report = verify_assignment(net, task, zeros);
  CHECK_FALSE(report.matched);
}

TEST_CASE("bundled ternary-square assignment realizes the cross pairs (a,d),(b,c)") {
  Network net = ternary_square_network();
  DistributionTask task = cross_pairs_task({{"a", "d"}, {"b", "c"}}, {2, 2},
                                           Domain::Complex);

  SUBCASE("outcome bit 0 matches directly") {
    VerifyReport report =
        verify_assignment(net, task, ternary_square_cross_assignment(0));
    CHECK(report.matched);
    CHECK(report.residual <= 1e-12);
  }

  SUBCASE("outcome bit 1 matches only after the sign fix on client b") {
    VerifyReport raw = verify_assignment(net, task, ternary_square_cross_assignment(1));
    CHECK_FALSE(raw.matched);

    // Negate the b = 1 slice of the target, i.e. apply Z on client b.
    Tensor fixed = task.tensor();
    for (Index flat = 0; flat < fixed.size(); ++flat) {
      std::vector<Index> multi = fixed.multi_index(flat);
      Index b_axis = fixed.axis_index("b");
      if (multi[static_cast<size_t>(b_axis)] == 1)
        fixed.mutable_data()[flat] = -fixed.data()[flat];
    }
    DistributionTask z_fixed(task.clients(), fixed);
    VerifyReport report =
        verify_assignment(net, z_fixed, ternary_square_cross_assignment(1));
    CHECK(report.matched);
    CHECK(report.residual <= 1e-12);
  }
}

TEST_CASE("lifting preserves verification") {
  SUBCASE("butterfly XOR lifts to the quantum crossing task") {
    NodeAssignment lifted = lift_classical_assignment(butterfly_xor_assignment());
    CHECK(lifted.domain == Domain::Complex);
    VerifyReport report =
        verify_assignment(butterfly_network(), crossing_task(Domain::Complex), lifted);
    CHECK(report.matched);
    CHECK(report.residual <= 1e-12);
  }

  SUBCASE("lifting is entrywise identity, including on the bare channel") {
    NodeAssignment empty;
    empty.domain = Domain::NonNegative;
    NodeAssignment lifted_empty = lift_classical_assignment(empty);
    CHECK(lifted_empty.node_tensors.empty());
    CHECK(lifted_empty.domain == Domain::Complex);

    NodeAssignment chain;
    chain.domain = Domain::NonNegative;
    chain.node_tensors.emplace("U", Tensor::delta({{"iu", 2}, {"ch", 2}}));
    chain.node_tensors.emplace("V", Tensor::delta({{"ch", 2}, {"iv", 2}}));
    NodeAssignment lifted = lift_classical_assignment(chain);
    for (const auto& [id, t] : chain.node_tensors)
      CHECK(lifted.node_tensors.at(id).data() == t.data());
  }

  SUBCASE("random verified assignments lift with identical residual") {
    RandomStream rng(31);
    for (int trial = 0; trial < 25; ++trial) {
      Network net = random_tree_network(rng, 1 + static_cast<int>(rng.below(3)));
      NodeAssignment asg = random_assignment(rng, net, Domain::NonNegative);
      Tensor realized = realized_tensor(net, asg);
      if (realized.norm() == 0.0) continue;
      std::vector<TaskClient> clients;
      for (const std::string& c : net.clients())
        clients.push_back({c, net.incident_edges(c).front().dim});
      DistributionTask task(clients, realized);

      VerifyReport classical = verify_assignment(net, task, asg);
      REQUIRE(classical.matched);

      VerifyReport quantum = verify_assignment(net, task.retagged(Domain::Complex),
                                               lift_classical_assignment(asg));
      CHECK(quantum.matched);
      CHECK(quantum.residual == doctest::Approx(classical.residual).epsilon(1e-12));
    }
  }
}

TEST_CASE("soundness against the nested-loop oracle") {
  RandomStream rng(17);
  const double tol = 1e-8;
  for (int trial = 0; trial < 15; ++trial) {
    Network net = random_tree_network(rng, 1 + static_cast<int>(rng.below(3)));
    NodeAssignment asg = random_assignment(rng, net, Domain::Complex);
    Tensor realized = realized_tensor(net, asg);
    if (realized.norm() == 0.0) continue;
    std::vector<TaskClient> clients;
    for (const std::string& c : net.clients())
      clients.push_back({c, net.incident_edges(c).front().dim});
    DistributionTask task(clients, realized);

    VerifyReport report = verify_assignment(net, task, asg, tol);
    REQUIRE(report.matched);

    auto oracle_match =
        match_up_to_scale(oracle_realized(net, asg), task.tensor(), task.domain(), 10 * tol);
    CHECK(oracle_match.has_value());
  }
}

TEST_CASE("product tasks verify over disjoint unions") {
  Network star = star_network(3, 2);
  Network chain = channel_network(2, 2, 2);

  // Disjoint union of the two networks.
  std::vector<NetworkNode> nodes = star.nodes();
  std::vector<NetworkEdge> edges = star.edges();
  nodes.insert(nodes.end(), chain.nodes().begin(), chain.nodes().end());
  edges.insert(edges.end(), chain.edges().begin(), chain.edges().end());
  Network both(nodes, edges);
  REQUIRE(both.validate().ok());
  REQUIRE(both.validate().warnings.size() == 1);

  NodeAssignment asg = star_ghz_assignment(3, 2);
  asg.node_tensors.emplace("U", Tensor::delta({{"iu", 2}, {"ch", 2}}));
  asg.node_tensors.emplace("V", Tensor::delta({{"ch", 2}, {"iv", 2}}));

  // Product task: GHZ on the star clients times a delta between u and v.
  DistributionTask ghz = ghz_task(3, 2, Domain::NonNegative);
  Tensor product = contract(ContractionPlan{
      {ghz.tensor(), Tensor::delta({{"u", 2}, {"v", 2}})},
      {},
      {"c1", "c2", "c3", "u", "v"}});
  DistributionTask task(
      {{"c1", 2}, {"c2", 2}, {"c3", 2}, {"u", 2}, {"v", 2}}, product);

  VerifyReport report = verify_assignment(both, task, asg);
  CHECK(report.matched);
  CHECK(report.residual <= 1e-12);
}

TEST_CASE("structural mismatches are errors") {
  Network net = butterfly_network();
  DistributionTask task = crossing_task(Domain::NonNegative);
  NodeAssignment asg = butterfly_xor_assignment();

  SUBCASE("missing node tensor") {
    asg.node_tensors.erase("B");
    CHECK_THROWS_AS(verify_assignment(net, task, asg), std::invalid_argument);
  }

  SUBCASE("wrong axis labels") {
    Tensor bad = Tensor::delta({{"a1b", 2}, {"a2b", 2}, {"wrong", 2}});
    asg.node_tensors.insert_or_assign("B", bad);
    CHECK_THROWS_AS(verify_assignment(net, task, asg), std::invalid_argument);
  }

  SUBCASE("task client dim mismatch") {
    DistributionTask bad = cross_pairs_task({{"S1", "T1"}, {"S2", "T2"}}, {3, 3},
                                            Domain::NonNegative);
    CHECK_THROWS_AS(verify_assignment(net, bad, asg), std::invalid_argument);
  }

  SUBCASE("complex assignment against a non-negative task") {
    NodeAssignment lifted = lift_classical_assignment(asg);
    CHECK_THROWS_AS(verify_assignment(net, task, lifted), std::invalid_argument);
  }

  SUBCASE("invalid networks are rejected up front") {
    Network broken({{"S1", true}}, {});
    NodeAssignment empty;
    empty.domain = Domain::NonNegative;
    CHECK_THROWS_AS(verify_assignment(broken, task, empty), std::invalid_argument);
  }
}

TEST_CASE("client-to-client edges deliver the channel as-is") {
  Network net({{"u", true}, {"v", true}}, {{"u", "v", 3, "ch"}});
  NodeAssignment empty;
  empty.domain = Domain::NonNegative;
  DistributionTask task = cross_pairs_task({{"u", "v"}}, {3}, Domain::NonNegative);
  VerifyReport report = verify_assignment(net, task, empty);
  CHECK(report.matched);
  CHECK(report.residual <= 1e-12);
}
