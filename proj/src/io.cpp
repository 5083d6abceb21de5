#include "netfactor/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace netfactor {

using nlohmann::json;

namespace {

json parse_document(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("document is not valid JSON");
  return doc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
}

json require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key))
    throw ParseError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

Index require_dim(const json& j) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw ParseError("'dim' must be a positive integer");
  return j.get<Index>();
}

std::vector<std::pair<std::vector<Index>, Complex>> parse_entries(const json& j) {
  if (!j.is_array()) throw ParseError("'entries' must be an array");
  std::vector<std::pair<std::vector<Index>, Complex>> entries;
  for (const json& e : j) {
    std::vector<Index> index;
    for (const json& v : require(e, "index")) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ParseError("entry index must be a non-negative integer");
      index.push_back(v.get<Index>());
    }
    double re = e.value("re", 0.0);
    double im = e.value("im", 0.0);
    entries.push_back({std::move(index), Complex(re, im)});
  }
  return entries;
}

json entries_to_json(const Tensor& t) {
  json entries = json::array();
  for (Index flat = 0; flat < t.size(); ++flat) {
    Complex v = t.data()[flat];
    if (v == Complex(0.0, 0.0)) continue;
    json e;
    e["index"] = t.multi_index(flat);
    e["re"] = v.real();
    if (v.imag() != 0.0) e["im"] = v.imag();
    entries.push_back(std::move(e));
  }
  return entries;
}

Tensor tensor_from_json(const json& j, Domain domain) {
  std::vector<Axis> axes;
  for (const json& a : require(j, "axes"))
    axes.push_back({require(a, "label").get<std::string>(), require_dim(require(a, "dim"))});
  try {
    return Tensor::from_entries(std::move(axes), parse_entries(require(j, "entries")),
                                domain);
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  } catch (const std::out_of_range& err) {
    throw ParseError(err.what());
  }
}

Domain parse_domain(const json& j) {
  try {
    return domain_from_string(j.get<std::string>());
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

}  // namespace

Network network_from_json_text(const std::string& text) {
  json doc = parse_document(text);
  std::vector<NetworkNode> nodes;
  for (const json& n : require(doc, "nodes"))
    nodes.push_back({require(n, "id").get<std::string>(), n.value("client", false)});
  std::vector<NetworkEdge> edges;
  for (const json& e : require(doc, "edges"))
    edges.push_back({require(e, "a").get<std::string>(), require(e, "b").get<std::string>(),
                     require_dim(require(e, "dim")), require(e, "label").get<std::string>()});
  return Network(std::move(nodes), std::move(edges));
}

std::string network_to_json_text(const Network& net) {
  json doc;
  doc["nodes"] = json::array();
  for (const NetworkNode& n : net.nodes())
    doc["nodes"].push_back({{"id", n.id}, {"client", n.is_client}});
  doc["edges"] = json::array();
  for (const NetworkEdge& e : net.edges())
    doc["edges"].push_back({{"a", e.a}, {"b", e.b}, {"dim", e.dim}, {"label", e.label}});
  return doc.dump(2) + "\n";
}

Network read_network(const std::string& path) {
  return network_from_json_text(slurp(path));
}

void write_network(const Network& net, const std::string& path) {
  spill(path, network_to_json_text(net));
}

DistributionTask task_from_json_text(const std::string& text) {
  json doc = parse_document(text);
  Domain domain = parse_domain(require(doc, "domain"));
  std::vector<TaskClient> clients;
  std::vector<Axis> axes;
  for (const json& c : require(doc, "clients")) {
    TaskClient client{require(c, "id").get<std::string>(), require_dim(require(c, "dim"))};
    axes.push_back({client.id, client.dim});
    clients.push_back(std::move(client));
  }
  try {
    Tensor t = Tensor::from_entries(std::move(axes), parse_entries(require(doc, "entries")),
                                    domain);
    return DistributionTask(std::move(clients), std::move(t));
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  } catch (const std::out_of_range& err) {
    throw ParseError(err.what());
  }
}

std::string task_to_json_text(const DistributionTask& task) {
  json doc;
  doc["clients"] = json::array();
  std::vector<std::string> order;
  for (const TaskClient& c : task.clients()) {
    doc["clients"].push_back({{"id", c.id}, {"dim", c.dim}});
    order.push_back(c.id);
  }
  doc["domain"] = to_string(task.domain());
  doc["entries"] = entries_to_json(task.tensor().transposed(order));
  return doc.dump(2) + "\n";
}

DistributionTask read_task(const std::string& path) {
  return task_from_json_text(slurp(path));
}

void write_task(const DistributionTask& task, const std::string& path) {
  spill(path, task_to_json_text(task));
}

NodeAssignment assignment_from_json_text(const std::string& text) {
  json doc = parse_document(text);
  NodeAssignment asg;
  asg.domain = parse_domain(require(doc, "domain"));
  json nodes = require(doc, "nodes");
  if (!nodes.is_object()) throw ParseError("'nodes' must map node ids to tensors");
  for (auto it = nodes.begin(); it != nodes.end(); ++it)
    asg.node_tensors.emplace(it.key(), tensor_from_json(it.value(), asg.domain));
  return asg;
}

std::string assignment_to_json_text(const NodeAssignment& assignment) {
  json doc;
  doc["domain"] = to_string(assignment.domain);
  json nodes = json::object();
  for (const auto& [id, t] : assignment.node_tensors) {
    json axes = json::array();
    for (const Axis& a : t.axes()) axes.push_back({{"label", a.label}, {"dim", a.dim}});
    nodes[id] = {{"axes", std::move(axes)}, {"entries", entries_to_json(t)}};
  }
  doc["nodes"] = std::move(nodes);
  return doc.dump(2) + "\n";
}

NodeAssignment read_assignment(const std::string& path) {
  return assignment_from_json_text(slurp(path));
}

void write_assignment(const NodeAssignment& assignment, const std::string& path) {
  spill(path, assignment_to_json_text(assignment));
}

namespace {

Eigen::VectorXcd vector_from_entries(const json& j, Index size) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
  for (const json& e : j) {
    json idx = require(e, "index");
    Index flat;
    if (idx.is_array()) {
      if (idx.size() != 1) throw ParseError("vector entries take a single index");
      flat = idx.at(0).get<Index>();
    } else {
      flat = idx.get<Index>();
    }
    if (flat < 0 || flat >= size) throw ParseError("vector entry index out of range");
    v[flat] = Complex(e.value("re", 0.0), e.value("im", 0.0));
  }
  return v;
}

json vector_to_entries(const Eigen::VectorXcd& v) {
  json entries = json::array();
  for (Index k = 0; k < v.size(); ++k) {
    if (v[k] == Complex(0.0, 0.0)) continue;
    json e;
    e["index"] = k;
    e["re"] = v[k].real();
    if (v[k].imag() != 0.0) e["im"] = v[k].imag();
    entries.push_back(std::move(e));
  }
  return entries;
}

Eigen::MatrixXcd matrix_from_entries(const json& j, Index rows, Index cols) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (const json& e : j) {
    Index r = require(e, "out").get<Index>();
    Index c = require(e, "in").get<Index>();
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ParseError("matrix entry index out of range");
    m(r, c) = Complex(e.value("re", 0.0), e.value("im", 0.0));
  }
  return m;
}

json matrix_to_entries(const Eigen::MatrixXcd& m) {
  json entries = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) == Complex(0.0, 0.0)) continue;
      json e;
      e["out"] = r;
      e["in"] = c;
      e["re"] = m(r, c).real();
      if (m(r, c).imag() != 0.0) e["im"] = m(r, c).imag();
      entries.push_back(std::move(e));
    }
  return entries;
}

std::vector<std::pair<std::string, Index>> parse_subsystem_list(const json& j) {
  std::vector<std::pair<std::string, Index>> out;
  for (const json& s : j)
    out.push_back({require(s, "name").get<std::string>(), require_dim(require(s, "dim"))});
  return out;
}

json subsystem_list_to_json(const std::vector<std::pair<std::string, Index>>& subs) {
  json out = json::array();
  for (const auto& [name, dim] : subs) out.push_back({{"name", name}, {"dim", dim}});
  return out;
}

Index product_of_dims(const std::vector<std::pair<std::string, Index>>& subs) {
  Index n = 1;
  for (const auto& [name, dim] : subs) n *= dim;
  return n;
}

}  // namespace

std::vector<ProtocolStep> protocol_from_json_text(const std::string& text) {
  json doc = parse_document(text);
  std::vector<ProtocolStep> steps;
  for (const json& s : require(doc, "steps")) {
    std::string type = require(s, "type").get<std::string>();
    if (type == "prepare") {
      PrepareStep step;
      step.node = require(s, "node").get<std::string>();
      step.subsystems = parse_subsystem_list(require(s, "subsystems"));
      step.amplitudes =
          vector_from_entries(require(s, "entries"), product_of_dims(step.subsystems));
      steps.push_back(std::move(step));
    } else if (type == "isometry") {
      IsometryStep step;
      step.node = require(s, "node").get<std::string>();
      for (const json& name : require(s, "inputs"))
        step.inputs.push_back(name.get<std::string>());
      step.outputs = parse_subsystem_list(require(s, "outputs"));
      Index rows = product_of_dims(step.outputs);
      Index cols = require(s, "input_dim").get<Index>();
      step.matrix = matrix_from_entries(require(s, "entries"), rows, cols);
      steps.push_back(std::move(step));
    } else if (type == "measure") {
      MeasureStep step;
      step.node = require(s, "node").get<std::string>();
      for (const json& name : require(s, "inputs"))
        step.inputs.push_back(name.get<std::string>());
      step.outputs = parse_subsystem_list(require(s, "outputs"));
      step.outcome_name = require(s, "outcome").get<std::string>();
      Index rows = product_of_dims(step.outputs);
      Index cols = require(s, "input_dim").get<Index>();
      for (const json& op : require(s, "operators"))
        step.operators.push_back({require(op, "label").get<std::string>(),
                                  matrix_from_entries(require(op, "entries"), rows, cols)});
      steps.push_back(std::move(step));
    } else if (type == "send") {
      steps.push_back(SendStep{require(s, "subsystem").get<std::string>(),
                               require(s, "from").get<std::string>(),
                               require(s, "to").get<std::string>()});
    } else if (type == "phasefix") {
      PhaseFixStep step;
      step.subsystem = require(s, "subsystem").get<std::string>();
      json diag = require(s, "diagonal");
      step.diagonal = Eigen::VectorXcd::Zero(static_cast<Index>(diag.size()));
      for (size_t k = 0; k < diag.size(); ++k) {
        const json& d = diag.at(k);
        step.diagonal[static_cast<Index>(k)] =
            Complex(d.value("re", 0.0), d.value("im", 0.0));
      }
      if (s.contains("when")) {
        const json& w = s.at("when");
        step.condition = {require(w, "outcome").get<std::string>(),
                          require(w, "value").get<std::string>()};
      }
      steps.push_back(std::move(step));
    } else {
      throw ParseError("unknown protocol step type '" + type + "'");
    }
  }
  return steps;
}

std::string protocol_to_json_text(const std::vector<ProtocolStep>& steps) {
  json list = json::array();
  for (const ProtocolStep& step : steps) {
    json s;
    if (const auto* p = std::get_if<PrepareStep>(&step)) {
      s["type"] = "prepare";
      s["node"] = p->node;
      s["subsystems"] = subsystem_list_to_json(p->subsystems);
      s["entries"] = vector_to_entries(p->amplitudes);
    } else if (const auto* p = std::get_if<IsometryStep>(&step)) {
      s["type"] = "isometry";
      s["node"] = p->node;
      s["inputs"] = p->inputs;
      s["outputs"] = subsystem_list_to_json(p->outputs);
      s["input_dim"] = p->matrix.cols();
      s["entries"] = matrix_to_entries(p->matrix);
    } else if (const auto* p = std::get_if<MeasureStep>(&step)) {
      s["type"] = "measure";
      s["node"] = p->node;
      s["inputs"] = p->inputs;
      s["outputs"] = subsystem_list_to_json(p->outputs);
      s["outcome"] = p->outcome_name;
      s["input_dim"] = p->operators.empty() ? 0 : p->operators.front().second.cols();
      json ops = json::array();
      for (const auto& [label, m] : p->operators)
        ops.push_back({{"label", label}, {"entries", matrix_to_entries(m)}});
      s["operators"] = std::move(ops);
    } else if (const auto* p = std::get_if<SendStep>(&step)) {
      s["type"] = "send";
      s["subsystem"] = p->subsystem;
      s["from"] = p->from;
      s["to"] = p->to;
    } else if (const auto* p = std::get_if<PhaseFixStep>(&step)) {
      s["type"] = "phasefix";
      s["subsystem"] = p->subsystem;
      json diag = json::array();
      for (Index k = 0; k < p->diagonal.size(); ++k) {
        json d;
        d["re"] = p->diagonal[k].real();
        if (p->diagonal[k].imag() != 0.0) d["im"] = p->diagonal[k].imag();
        diag.push_back(std::move(d));
      }
      s["diagonal"] = std::move(diag);
      if (p->condition)
        s["when"] = {{"outcome", p->condition->first}, {"value", p->condition->second}};
    }
    list.push_back(std::move(s));
  }
  json doc;
  doc["steps"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<ProtocolStep> read_protocol(const std::string& path) {
  return protocol_from_json_text(slurp(path));
}

void write_protocol(const std::vector<ProtocolStep>& steps, const std::string& path) {
  spill(path, protocol_to_json_text(steps));
}

std::string format_double(double value) {
  char buf[64];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == value) break;
  }
  return buf;
}

std::string format_complex(Complex value) {
  if (value.imag() == 0.0) return format_double(value.real());
  std::string s = format_double(value.real());
  s += (value.imag() < 0.0) ? " - " : " + ";
  s += format_double(std::abs(value.imag()));
  s += "i";
  return s;
}

}  // namespace netfactor
