#include "netfactor/task.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "netfactor/contraction.hpp"

namespace netfactor {

DistributionTask::DistributionTask(std::vector<TaskClient> clients, Tensor tensor)
    : clients_(std::move(clients)), tensor_(std::move(tensor)) {
  if (clients_.empty()) throw std::invalid_argument("task has no clients");
  if (tensor_.rank() != static_cast<Index>(clients_.size()))
    throw std::invalid_argument("task tensor rank does not match client count");
  for (const TaskClient& c : clients_) {
    if (!tensor_.has_axis(c.id))
      throw std::invalid_argument("task tensor missing axis for client '" + c.id + "'");
    if (tensor_.dim(c.id) != c.dim)
      throw std::invalid_argument("task tensor dim mismatch for client '" + c.id + "'");
  }
  if (tensor_.is_zero())
    throw std::invalid_argument("task tensor is identically zero");
}

DistributionTask DistributionTask::retagged(Domain domain) const {
  return DistributionTask(clients_, tensor_.retagged(domain));
}

DistributionTask cross_pairs_task(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const std::vector<Index>& dims, Domain domain) {
  if (pairs.empty()) throw std::invalid_argument("cross task needs at least one pair");
  if (dims.size() != pairs.size())
    throw std::invalid_argument("one dim per pair required");

  std::set<std::string> seen;
  std::vector<TaskClient> clients;
  std::vector<Tensor> deltas;
  for (size_t p = 0; p < pairs.size(); ++p) {
    const auto& [x, y] = pairs[p];
    if (!seen.insert(x).second) throw std::invalid_argument("client '" + x + "' in two pairs");
    if (!seen.insert(y).second) throw std::invalid_argument("client '" + y + "' in two pairs");
    clients.push_back({x, dims[p]});
    clients.push_back({y, dims[p]});
    deltas.push_back(Tensor::delta({{x, dims[p]}, {y, dims[p]}}));
  }

  // Outer product of the per-pair deltas.
  std::vector<std::string> free;
  for (const TaskClient& c : clients) free.push_back(c.id);
  Tensor tensor = contract(ContractionPlan{std::move(deltas), {}, std::move(free)});
  return DistributionTask(std::move(clients), tensor.retagged(domain));
}

DistributionTask subset_state_task(std::vector<TaskClient> clients,
                                   const std::vector<std::vector<Index>>& support,
                                   Domain domain) {
  if (support.empty()) throw std::invalid_argument("empty support set");
  std::vector<Axis> axes;
  for (const TaskClient& c : clients) axes.push_back({c.id, c.dim});
  Tensor t = Tensor::zeros(std::move(axes), Domain::NonNegative);
  for (const auto& s : support) t.set(s, Complex(1.0, 0.0));
  return DistributionTask(std::move(clients), t.retagged(domain));
}

DistributionTask ghz_task(int n, Index d, Domain domain) {
  if (n < 2 || d < 2) throw std::invalid_argument("GHZ needs n >= 2 and d >= 2");
  std::vector<TaskClient> clients;
  for (int i = 1; i <= n; ++i) clients.push_back({"c" + std::to_string(i), d});
  std::vector<std::vector<Index>> support;
  for (Index v = 0; v < d; ++v) support.push_back(std::vector<Index>(static_cast<size_t>(n), v));
  return subset_state_task(std::move(clients), support, domain);
}

DistributionTask w_task(int n, Domain domain) {
  if (n < 2) throw std::invalid_argument("W needs n >= 2");
  std::vector<TaskClient> clients;
  for (int i = 1; i <= n; ++i) clients.push_back({"c" + std::to_string(i), 2});
  std::vector<std::vector<Index>> support;
  for (int i = 0; i < n; ++i) {
    std::vector<Index> s(static_cast<size_t>(n), 0);
    s[static_cast<size_t>(i)] = 1;
    support.push_back(std::move(s));
  }
  return subset_state_task(std::move(clients), support, domain);
}

DistributionTask typewriter_task() {
  const double rows[4][4] = {{1, 1, 0, 0}, {0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 0, 1}};
  Tensor t = Tensor::zeros({{"u", 4}, {"v", 4}}, Domain::NonNegative);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) t.set({i, j}, Complex(rows[i][j], 0.0));
  return DistributionTask({{"u", 4}, {"v", 4}}, std::move(t));
}

DistributionTask task_from_matrix(const Tensor& m, Domain domain) {
  if (m.rank() != 2)
    throw std::invalid_argument("task_from_matrix needs a rank-2 tensor");
  std::vector<TaskClient> clients = {{m.axes()[0].label, m.axes()[0].dim},
                                     {m.axes()[1].label, m.axes()[1].dim}};
  return DistributionTask(std::move(clients), m.retagged(domain));
}

}  // namespace netfactor
