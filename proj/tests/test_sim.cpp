#include <doctest.h>

#include <algorithm>
#include <set>

#include "netfactor/contraction.hpp"
#include "netfactor/network.hpp"
#include "netfactor/sim.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"
#include "oracles.hpp"

using namespace netfactor;
using netfactor::testing::random_assignment;
using netfactor::testing::random_tree_network;

namespace {

Tensor state_as_tensor(const PureState& state) {
  std::vector<Axis> axes;
  for (const Subsystem& s : state.subsystems()) axes.push_back({s.name, s.dim});
  return Tensor(axes, state.amplitudes(), Domain::Complex);
}

}  // namespace

TEST_CASE("network state of the bare channel is one pair") {
  PureState state = build_network_state(single_edge_network(2));
  REQUIRE(state.subsystems().size() == 2);
  REQUIRE(state.amplitudes().size() == 4);
  CHECK(state.amplitudes()[0] == Complex(1.0, 0.0));
  CHECK(state.amplitudes()[1] == Complex(0.0, 0.0));
  CHECK(state.amplitudes()[2] == Complex(0.0, 0.0));
  CHECK(state.amplitudes()[3] == Complex(1.0, 0.0));
}

TEST_CASE("network state of the square") {
  PureState state = build_network_state(square_network(2, 2));
  CHECK(state.subsystems().size() == 16);
  CHECK(state.amplitudes().size() == 1 << 16);
  CHECK(state.amplitudes().squaredNorm() == doctest::Approx(256.0));  // 2^8
}

TEST_CASE("network state of the ternary square mixes dims") {
  PureState state = build_network_state(ternary_square_network());
  std::multiset<Index> dims;
  for (const Subsystem& s : state.subsystems()) dims.insert(s.dim);
  CHECK(std::count(dims.begin(), dims.end(), 3) == 8);
  CHECK(std::count(dims.begin(), dims.end(), 2) == 8);
}

TEST_CASE("projecting the lifted butterfly XOR yields two crossing pairs") {
  NodeAssignment lifted = lift_classical_assignment(butterfly_xor_assignment());
  PureState client_state = project_assignment(butterfly_network(), lifted);
  DistributionTask task =
      cross_pairs_task({{"S1", "T1"}, {"S2", "T2"}}, {2, 2}, Domain::Complex);
  CHECK(fidelity(task_target_state(task), client_state) == doctest::Approx(1.0));
}

TEST_CASE("projecting the star delta yields GHZ") {
  NodeAssignment asg = star_ghz_assignment(3, 2);
  asg.domain = Domain::Complex;
  for (auto& [id, t] : asg.node_tensors) t = t.retagged(Domain::Complex);
  PureState client_state = project_assignment(star_network(3, 2), asg);
  CHECK(fidelity(task_target_state(ghz_task(3, 2, Domain::Complex)), client_state) ==
        doctest::Approx(1.0));
}

TEST_CASE("projection equals contraction on random trees") {
  RandomStream rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Network net = random_tree_network(rng, 1 + static_cast<int>(rng.below(3)));
    NodeAssignment asg = random_assignment(rng, net, Domain::Complex);
    PureState projected = project_assignment(net, asg);
    Tensor realized = realized_tensor(net, asg);
    CHECK(frobenius_distance(state_as_tensor(projected), realized) < 1e-10);
  }
}

TEST_CASE("computational measurement on half a pair splits evenly") {
  Network net = single_edge_network(2);
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(1, 2), p1 = Eigen::MatrixXcd::Zero(1, 2);
  p0(0, 0) = 1.0;
  p1(0, 1) = 1.0;
  std::vector<ProtocolStep> steps = {
      MeasureStep{"u", {"u.ch"}, {{"m", 1}}, "z", {{"0", p0}, {"1", p1}}}};
  std::vector<Branch> branches = run_protocol(net, steps);
  REQUIRE(branches.size() == 2);
  double total = 0.0;
  for (const Branch& b : branches) {
    CHECK(b.probability == doctest::Approx(0.5));
    total += b.probability;
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("rank-deficient projective families leave abort mass") {
  Network net = single_edge_network(2);
  Eigen::MatrixXcd p0 = Eigen::MatrixXcd::Zero(1, 2);
  p0(0, 0) = 1.0;
  std::vector<ProtocolStep> steps = {
      MeasureStep{"u", {"u.ch"}, {{"m", 1}}, "z", {{"0", p0}}}};
  std::vector<Branch> branches = run_protocol(net, steps);
  REQUIRE(branches.size() == 1);
  CHECK(branches.front().probability == doctest::Approx(0.5));
}

TEST_CASE("isometries preserve the norm") {
  Network net = single_edge_network(2);
  Eigen::MatrixXcd h(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  std::vector<ProtocolStep> steps = {IsometryStep{"u", {"u.ch"}, {{"u.ch", 2}}, h}};
  std::vector<Branch> branches = run_protocol(net, steps);
  REQUIRE(branches.size() == 1);
  CHECK(branches.front().state.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  Eigen::MatrixXcd skewed(2, 2);
  skewed << 1.0, 0.5, 0.0, 1.0;
  std::vector<ProtocolStep> bad = {IsometryStep{"u", {"u.ch"}, {{"u.ch", 2}}, skewed}};
  CHECK_THROWS_AS(run_protocol(net, bad), std::invalid_argument);
}

TEST_CASE("the scripted ternary protocol distributes the cross pairs deterministically") {
  Network net = ternary_square_network();
  std::vector<ProtocolStep> steps = ternary_cross_protocol();

  SUBCASE("intermediate support matches the four printed terms") {
    // Truncate just before the measurement. The not-yet-consumed D-d pair
    // still sits in product with the payload, so read the support of the
    // payload coordinates only.
    std::vector<ProtocolStep> prefix(steps.begin(), steps.end() - 3);
    std::vector<Branch> branches = run_protocol(net, prefix);
    REQUIRE(branches.size() == 1);
    PureState state = branches.front().state.reordered(
        {"A_a", "B_b", "C_c", "B_out", "C_out", "D.id", "d.id"});
    std::set<std::vector<Index>> support;
    Tensor t = state_as_tensor(state);
    for (Index flat = 0; flat < t.size(); ++flat)
      if (std::abs(t.data()[flat]) > 1e-12) {
        std::vector<Index> multi = t.multi_index(flat);
        support.insert({multi.begin(), multi.begin() + 5});
      }
    std::set<std::vector<Index>> expected = {
        {0, 0, 0, 0, 2}, {0, 1, 1, 2, 0}, {1, 0, 0, 1, 2}, {1, 1, 1, 2, 1}};
    CHECK(support == expected);
  }

  SUBCASE("both branches reach the target") {
    RunInfo info;
    std::vector<Branch> branches = run_protocol(net, steps, {}, &info);
    REQUIRE(branches.size() == 2);
    REQUIRE(info.normalizations.size() == 1);
    CHECK(info.normalizations.front().second == doctest::Approx(std::sqrt(2.0)));

    DistributionTask task =
        cross_pairs_task({{"a", "d"}, {"b", "c"}}, {2, 2}, Domain::Complex);
    PureState target = task_target_state(task);
    double total = 0.0;
    for (const Branch& b : branches) {
      total += b.probability;
      CHECK(b.probability == doctest::Approx(0.5).epsilon(1e-10));
      PureState client = relabel_to_clients(net, b.state);
      CHECK(fidelity(target, client) >= 1.0 - 1e-12);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("branch selection follows one outcome") {
    std::vector<Branch> branches = run_protocol(net, steps, {{"x", "1"}});
    REQUIRE(branches.size() == 1);
    CHECK(branches.front().outcomes.at("x") == "1");
  }
}

TEST_CASE("sending over a consumed or missing edge fails") {
  Network net = ternary_square_network();
  std::vector<ProtocolStep> steps = ternary_cross_protocol();
  steps.push_back(SendStep{"A_a", "A", "a"});  // pair already consumed
  CHECK_THROWS_AS(run_protocol(net, steps), std::invalid_argument);

  std::vector<ProtocolStep> missing = {SendStep{"nothing", "A", "B"}};
  CHECK_THROWS_AS(run_protocol(net, missing), std::invalid_argument);
}

TEST_CASE("branch probabilities stay within the unit budget") {
  RandomStream rng(29);
  Network net = single_edge_network(3);
  for (int trial = 0; trial < 10; ++trial) {
    // A random (sub-normalized) two-outcome family on one qutrit.
    Eigen::MatrixXcd m0(3, 3), m1(3, 3);
    for (Index r = 0; r < 3; ++r)
      for (Index c = 0; c < 3; ++c) {
        m0(r, c) = Complex(rng.gaussian(), rng.gaussian());
        m1(r, c) = Complex(rng.gaussian(), rng.gaussian());
      }
    std::vector<ProtocolStep> steps = {
        MeasureStep{"u", {"u.ch"}, {{"m", 3}}, "z", {{"0", m0}, {"1", m1}}}};
    std::vector<Branch> branches = run_protocol(net, steps);
    double total = 0.0;
    for (const Branch& b : branches) {
      CHECK(b.probability >= 0.0);
      total += b.probability;
    }
    CHECK(total <= 1.0 + 1e-10);
  }
}

TEST_CASE("lifted success probability") {
  SUBCASE("the butterfly XOR protocol accepts everything") {
    Network net = butterfly_network();
    LiftedSuccess result = lifted_success_probability(
        net, butterfly_xor_assignment(), {"S1", "S2"},
        {0.25, 0.25, 0.25, 0.25});
    CHECK(result.classical_p == doctest::Approx(1.0));
    CHECK(result.quantum_p == doctest::Approx(1.0));
  }

  SUBCASE("accepting a single input of a uniform binary source") {
    Network net = channel_network(2, 2, 2);
    NodeAssignment asg;
    asg.domain = Domain::NonNegative;
    Tensor gate = Tensor::zeros({{"iu", 2}, {"ch", 2}}, Domain::NonNegative);
    gate.set({0, 0}, 1.0);  // only input 0 goes through
    asg.node_tensors.emplace("U", gate);
    asg.node_tensors.emplace("V", Tensor::delta({{"ch", 2}, {"iv", 2}}));
    LiftedSuccess result = lifted_success_probability(net, asg, {"u"}, {0.5, 0.5});
    CHECK(result.classical_p == doctest::Approx(0.5));
    CHECK(result.quantum_p == doctest::Approx(0.5));
  }

  SUBCASE("random deterministic partial protocols agree across the lift") {
    RandomStream rng(37);
    int done = 0;
    while (done < 15) {
      Network net = random_tree_network(rng, 1 + static_cast<int>(rng.below(2)));
      std::vector<std::string> clients = net.clients();
      // First client is the source; orient the tree away from it.
      std::vector<std::string> sources = {clients.front()};

      // Deterministic partial tables: per node, map each input combo to a
      // random output combo or drop it.
      NodeAssignment asg;
      asg.domain = Domain::NonNegative;
      std::map<std::string, std::string> toward_source;  // node -> edge label
      // BFS orientation from the source.
      std::map<std::string, std::string> parent_edge;
      std::vector<std::string> frontier = {sources.front()};
      std::set<std::string> seen = {sources.front()};
      while (!frontier.empty()) {
        std::vector<std::string> next;
        for (const std::string& id : frontier)
          for (const NetworkEdge& e : net.incident_edges(id)) {
            std::string other = (e.a == id) ? e.b : e.a;
            if (seen.insert(other).second) {
              parent_edge[other] = e.label;
              next.push_back(other);
            }
          }
        frontier = std::move(next);
      }

      for (const std::string& id : net.internal_nodes()) {
        std::vector<Axis> in_axes, out_axes;
        for (const NetworkEdge& e : net.incident_edges(id)) {
          if (parent_edge.at(id) == e.label)
            in_axes.push_back({e.label, e.dim});
          else
            out_axes.push_back({e.label, e.dim});
        }
        std::vector<Axis> axes = in_axes;
        axes.insert(axes.end(), out_axes.begin(), out_axes.end());
        Tensor t = Tensor::zeros(axes, Domain::NonNegative);
        Index in_dim = 1, out_dim = 1;
        for (const Axis& a : in_axes) in_dim *= a.dim;
        for (const Axis& a : out_axes) out_dim *= a.dim;
        for (Index i = 0; i < in_dim; ++i) {
          if (rng.u01() < 0.25) continue;  // dropped input
          Index o = static_cast<Index>(rng.below(static_cast<std::uint64_t>(out_dim)));
          t.mutable_data()[i * out_dim + o] = 1.0;
        }
        if (t.is_zero()) t.mutable_data()[0] = 1.0;
        asg.node_tensors.emplace(id, t);
      }

      Index source_dim = net.incident_edges(sources.front()).front().dim;
      std::vector<double> dist(static_cast<size_t>(source_dim));
      double mass = 0.0;
      for (double& p : dist) {
        p = 0.05 + rng.u01();
        mass += p;
      }
      for (double& p : dist) p /= mass;

      LiftedSuccess result;
      try {
        result = lifted_success_probability(net, asg, sources, dist);
      } catch (const std::invalid_argument&) {
        continue;  // table composition was not a deterministic partial map
      }
      CHECK(result.classical_p == doctest::Approx(result.quantum_p).epsilon(1e-10));
      ++done;
    }
  }

  SUBCASE("non-0/1 entries are rejected") {
    Network net = channel_network(2, 2, 2);
    NodeAssignment asg;
    asg.domain = Domain::NonNegative;
    Tensor gate = Tensor::zeros({{"iu", 2}, {"ch", 2}}, Domain::NonNegative);
    gate.set({0, 0}, 0.7);
    asg.node_tensors.emplace("U", gate);
    asg.node_tensors.emplace("V", Tensor::delta({{"ch", 2}, {"iv", 2}}));
    CHECK_THROWS_AS(lifted_success_probability(net, asg, {"u"}, {0.5, 0.5}),
                    std::invalid_argument);
  }
}
