#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "netfactor/network.hpp"
#include "netfactor/sim.hpp"
#include "netfactor/task.hpp"
#include "netfactor/verify.hpp"

namespace netfactor {

/// Input that fails to parse or violates a document schema.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON document formats (schemas documented in the README):
//   network:    {"nodes": [{"id", "client"}], "edges": [{"a","b","dim","label"}]}
//   task:       {"clients": [{"id","dim"}], "domain", "entries": [{"index",re,im}]}
//   assignment: {"domain", "nodes": {id: {"axes": [{"label","dim"}], "entries": [...]}}}
//   protocol:   {"steps": [...]}, entries are sparse; omitted entries are zero.

Network read_network(const std::string& path);
void write_network(const Network& net, const std::string& path);
Network network_from_json_text(const std::string& text);
std::string network_to_json_text(const Network& net);

DistributionTask read_task(const std::string& path);
void write_task(const DistributionTask& task, const std::string& path);
DistributionTask task_from_json_text(const std::string& text);
std::string task_to_json_text(const DistributionTask& task);

NodeAssignment read_assignment(const std::string& path);
void write_assignment(const NodeAssignment& assignment, const std::string& path);
NodeAssignment assignment_from_json_text(const std::string& text);
std::string assignment_to_json_text(const NodeAssignment& assignment);

std::vector<ProtocolStep> read_protocol(const std::string& path);
void write_protocol(const std::vector<ProtocolStep>& steps, const std::string& path);
std::vector<ProtocolStep> protocol_from_json_text(const std::string& text);
std::string protocol_to_json_text(const std::vector<ProtocolStep>& steps);

/// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double value);
std::string format_complex(Complex value);

}  // namespace netfactor
