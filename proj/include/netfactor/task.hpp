#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netfactor/tensor.hpp"

namespace netfactor {

struct TaskClient {
  std::string id;
  Index dim = 2;

  friend bool operator==(const TaskClient&, const TaskClient&) = default;
};

/// A distribution task: the target correlation over an ordered client list,
/// stored unnormalized as a tensor with one axis per client (labels are the
/// client ids). Achievability is always read up to scale.
class DistributionTask {
 public:
  DistributionTask() = default;
  DistributionTask(std::vector<TaskClient> clients, Tensor tensor);

  const std::vector<TaskClient>& clients() const { return clients_; }
  const Tensor& tensor() const { return tensor_; }
  Domain domain() const { return tensor_.domain(); }

  DistributionTask retagged(Domain domain) const;

  friend bool operator==(const DistributionTask&, const DistributionTask&) = default;

 private:
  std::vector<TaskClient> clients_;
  Tensor tensor_;
};

/// Product of Kronecker deltas, one per client pair: simultaneous EPR
/// distribution (quantum) or parallel identity channels (classical). The
/// pairs must partition the client set; dims[i] is the dim of pair i.
DistributionTask cross_pairs_task(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const std::vector<Index>& dims, Domain domain);

/// 0/1 tensor with unit entries on the given support strings.
DistributionTask subset_state_task(std::vector<TaskClient> clients,
                                   const std::vector<std::vector<Index>>& support,
                                   Domain domain);
/// Support on the all-equal strings; client ids default to c1..cn.
DistributionTask ghz_task(int n, Index d, Domain domain);
/// Support on the Hamming-weight-1 binary strings; client ids c1..cn.
DistributionTask w_task(int n, Domain domain);

/// The 4-letter noisy typewriter correlation between clients u and v,
/// stored unnormalized: rows (1,1,0,0),(0,1,1,0),(0,0,1,1),(1,0,0,1).
DistributionTask typewriter_task();

/// Wraps a rank-2 tensor as a two-client task (clients named by the axes).
DistributionTask task_from_matrix(const Tensor& m, Domain domain);

}  // namespace netfactor
