#include <doctest.h>

#include "netfactor/contraction.hpp"
#include "netfactor/io.hpp"
#include "netfactor/network.hpp"
#include "netfactor/sim.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"
#include "oracles.hpp"

using namespace netfactor;
using netfactor::testing::random_assignment;
using netfactor::testing::random_tree_network;

TEST_CASE("network documents round trip") {
  RandomStream rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    Network net = random_tree_network(rng, 1 + static_cast<int>(rng.below(3)));
    Network back = network_from_json_text(network_to_json_text(net));
    CHECK(net == back);
  }
}

TEST_CASE("task documents round trip") {
  DistributionTask tw = typewriter_task();
  DistributionTask back = task_from_json_text(task_to_json_text(tw));
  CHECK(back.domain() == Domain::NonNegative);
  CHECK(frobenius_distance(back.tensor(), tw.tensor()) == doctest::Approx(0.0));

  DistributionTask cross = cross_pairs_task({{"a", "d"}, {"b", "c"}}, {2, 2},
                                            Domain::Complex);
  DistributionTask cross_back = task_from_json_text(task_to_json_text(cross));
  CHECK(frobenius_distance(cross_back.tensor(), cross.tensor()) == doctest::Approx(0.0));
}

TEST_CASE("assignment documents round trip") {
  RandomStream rng(43);
  Network net = random_tree_network(rng, 2);
  NodeAssignment asg = random_assignment(rng, net, Domain::Complex);
  NodeAssignment back = assignment_from_json_text(assignment_to_json_text(asg));
  CHECK(back.domain == asg.domain);
  REQUIRE(back.node_tensors.size() == asg.node_tensors.size());
  for (const auto& [id, t] : asg.node_tensors) {
    REQUIRE(back.node_tensors.count(id));
    CHECK(frobenius_distance(back.node_tensors.at(id), t) < 1e-15);
  }
}

TEST_CASE("protocol documents round trip through the simulator") {
  std::vector<ProtocolStep> steps = ternary_cross_protocol();
  std::vector<ProtocolStep> back = protocol_from_json_text(protocol_to_json_text(steps));
  REQUIRE(back.size() == steps.size());

  Network net = ternary_square_network();
  std::vector<Branch> a = run_protocol(net, steps);
  std::vector<Branch> b = run_protocol(net, back);
  REQUIRE(a.size() == b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].probability == doctest::Approx(b[k].probability));
    CHECK(a[k].outcomes == b[k].outcomes);
    CHECK(fidelity(a[k].state, b[k].state) == doctest::Approx(1.0));
  }
}

TEST_CASE("schema violations raise ParseError") {
  CHECK_THROWS_AS(network_from_json_text("not json at all"), ParseError);
  CHECK_THROWS_AS(network_from_json_text("{\"nodes\": []}"), ParseError);
  CHECK_THROWS_AS(task_from_json_text(R"({"clients": [{"id": "u", "dim": 2}],
      "domain": "weird", "entries": []})"),
                  ParseError);
  // Negative entry under the non-negative domain.
  CHECK_THROWS_AS(task_from_json_text(R"({"clients": [{"id": "u", "dim": 2},
      {"id": "v", "dim": 2}], "domain": "nonneg",
      "entries": [{"index": [0, 0], "re": -1.0}]})"),
                  ParseError);
  // Entry index out of range.
  CHECK_THROWS_AS(task_from_json_text(R"({"clients": [{"id": "u", "dim": 2},
      {"id": "v", "dim": 2}], "domain": "nonneg",
      "entries": [{"index": [0, 5], "re": 1.0}]})"),
                  ParseError);
  CHECK_THROWS_AS(protocol_from_json_text(R"({"steps": [{"type": "warp"}]})"),
                  ParseError);
}

TEST_CASE("double formatting round trips") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 1e-300, 123456.789, 1.0 / 3.0,
                   std::sqrt(2.0), 2e300}) {
    double back = std::stod(format_double(v));
    CHECK(back == v);
  }
  CHECK(format_complex(Complex(1.0, 0.0)) == "1");
  CHECK(format_complex(Complex(0.5, -2.0)) == "0.5 - 2i");
}
