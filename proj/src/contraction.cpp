#include "netfactor/contraction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace netfactor {

ContractionPlan ContractionPlan::infer_free(
    std::vector<Tensor> tensors,
    std::vector<std::pair<std::string, std::string>> bonds) {
  std::set<std::string> bonded;
  for (const auto& [x, y] : bonds) {
    bonded.insert(x);
    bonded.insert(y);
  }
  std::vector<std::string> free;
  for (const Tensor& t : tensors)
    for (const Axis& a : t.axes())
      if (!bonded.count(a.label)) free.push_back(a.label);
  std::sort(free.begin(), free.end());
  return ContractionPlan{std::move(tensors), std::move(bonds), std::move(free)};
}

namespace {

// Working tensor for the contraction engine: axes are integer ids. Bond ids
// occur exactly twice across the whole plan, free ids exactly once.
struct WorkTensor {
  std::vector<int> ids;
  std::vector<Axis> axes;  // labels unused here, dims drive the layout
  Eigen::VectorXcd data;
};

Index product_dims(const WorkTensor& t) {
  Index n = 1;
  for (const Axis& a : t.axes) n *= a.dim;
  return n;
}

// Sums out any axis id occurring twice within one tensor (partial trace).
WorkTensor self_trace(WorkTensor t) {
  for (size_t i = 0; i < t.ids.size(); ++i) {
    size_t j = i + 1;
    for (; j < t.ids.size(); ++j)
      if (t.ids[j] == t.ids[i]) break;
    if (j == t.ids.size()) continue;
    // Permute axes i, j to the front and trace them.
    std::vector<Index> perm;
    perm.push_back(static_cast<Index>(i));
    perm.push_back(static_cast<Index>(j));
    for (size_t k = 0; k < t.ids.size(); ++k)
      if (k != i && k != j) perm.push_back(static_cast<Index>(k));
    Eigen::VectorXcd moved = permute_flat(t.data, t.axes, perm);
    Index d = t.axes[i].dim;
    Index rest = t.data.size() / (d * d);
    Eigen::VectorXcd traced = Eigen::VectorXcd::Zero(rest);
    for (Index a = 0; a < d; ++a)
      traced += moved.segment((a * d + a) * rest, rest);
    WorkTensor out;
    for (size_t k = 2; k < perm.size(); ++k) {
      out.ids.push_back(t.ids[static_cast<size_t>(perm[k])]);
      out.axes.push_back(t.axes[static_cast<size_t>(perm[k])]);
    }
    out.data = std::move(traced);
    return self_trace(std::move(out));
  }
  return t;
}

// Contracts two tensors over all shared axis ids via a matrix product.
WorkTensor pairwise_contract(const WorkTensor& a, const WorkTensor& b) {
  std::vector<int> shared;
  for (int id : a.ids)
    if (std::find(b.ids.begin(), b.ids.end(), id) != b.ids.end())
      shared.push_back(id);

  auto split = [&](const WorkTensor& t, bool shared_first) {
    std::vector<Index> perm;
    std::vector<Index> keep;
    for (size_t k = 0; k < t.ids.size(); ++k) {
      if (std::find(shared.begin(), shared.end(), t.ids[k]) != shared.end())
        continue;
      keep.push_back(static_cast<Index>(k));
    }
    std::vector<Index> sh;
    for (int id : shared) {
      for (size_t k = 0; k < t.ids.size(); ++k)
        if (t.ids[k] == id) {
          sh.push_back(static_cast<Index>(k));
          break;
        }
    }
    if (shared_first) {
      perm = sh;
      perm.insert(perm.end(), keep.begin(), keep.end());
    } else {
      perm = keep;
      perm.insert(perm.end(), sh.begin(), sh.end());
    }
    return perm;
  };

  std::vector<Index> pa = split(a, false);
  std::vector<Index> pb = split(b, true);
  Eigen::VectorXcd da = permute_flat(a.data, a.axes, pa);
  Eigen::VectorXcd db = permute_flat(b.data, b.axes, pb);

  Index bond_size = 1;
  for (int id : shared) {
    for (size_t k = 0; k < a.ids.size(); ++k)
      if (a.ids[k] == id) bond_size *= a.axes[k].dim;
  }
  Index rows = da.size() / bond_size;
  Index cols = db.size() / bond_size;

  using RowMajor =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> ma(da.data(), rows, bond_size);
  Eigen::Map<const RowMajor> mb(db.data(), bond_size, cols);
  RowMajor mc = ma * mb;

  WorkTensor out;
  size_t na_keep = a.ids.size() - shared.size();
  for (size_t k = 0; k < na_keep; ++k) {
    out.ids.push_back(a.ids[static_cast<size_t>(pa[k])]);
    out.axes.push_back(a.axes[static_cast<size_t>(pa[k])]);
  }
  for (size_t k = shared.size(); k < b.ids.size(); ++k) {
    out.ids.push_back(b.ids[static_cast<size_t>(pb[k])]);
    out.axes.push_back(b.axes[static_cast<size_t>(pb[k])]);
  }
  out.data = Eigen::Map<Eigen::VectorXcd>(mc.data(), mc.size());
  return self_trace(std::move(out));
}

}  // namespace

Tensor contract(const ContractionPlan& plan) {
  if (plan.tensors.empty())
    throw std::invalid_argument("contraction plan has an empty tensor list");

  // Locate every axis occurrence by label.
  std::map<std::string, std::vector<std::pair<size_t, size_t>>> occ;  // label -> (tensor, axis)
  for (size_t t = 0; t < plan.tensors.size(); ++t) {
    const auto& axes = plan.tensors[t].axes();
    for (size_t a = 0; a < axes.size(); ++a)
      occ[axes[a].label].push_back({t, a});
  }

  // Assign ids: bonds get a shared id on both axes, free labels their own.
  std::vector<std::vector<int>> ids(plan.tensors.size());
  for (size_t t = 0; t < plan.tensors.size(); ++t)
    ids[t].assign(plan.tensors[t].axes().size(), -1);

  int next_id = 0;
  auto claim = [&](const std::string& label) -> std::pair<size_t, size_t> {
    auto it = occ.find(label);
    if (it == occ.end())
      throw std::invalid_argument("bond label '" + label + "' not found");
    for (auto [t, a] : it->second)
      if (ids[t][a] < 0) return {t, a};
    throw std::invalid_argument("bond label '" + label + "' already claimed by another bond");
  };

  for (const auto& [x, y] : plan.bonds) {
    auto [tx, ax] = claim(x);
    ids[tx][ax] = next_id;
    auto [ty, ay] = claim(y);
    ids[ty][ay] = next_id;
    const Axis& axx = plan.tensors[tx].axes()[ax];
    const Axis& axy = plan.tensors[ty].axes()[ay];
    if (axx.dim != axy.dim)
      throw std::invalid_argument("dimension mismatch on bond (" + x + ", " + y + ")");
    ++next_id;
  }
  const int n_bonds = next_id;

  // Free labels: each must occur exactly once among the unbonded axes and
  // exactly once in plan.free.
  std::map<std::string, int> free_id;
  std::set<std::string> free_seen;
  for (const std::string& label : plan.free) {
    if (!free_seen.insert(label).second)
      throw std::invalid_argument("duplicate free label '" + label + "'");
    free_id[label] = next_id++;
  }
  std::map<int, Axis> free_axis;
  for (size_t t = 0; t < plan.tensors.size(); ++t) {
    const auto& axes = plan.tensors[t].axes();
    for (size_t a = 0; a < axes.size(); ++a) {
      if (ids[t][a] >= 0) continue;
      auto it = free_id.find(axes[a].label);
      if (it == free_id.end())
        throw std::invalid_argument("unbonded label '" + axes[a].label +
                                    "' missing from the free list");
      if (free_axis.count(it->second))
        throw std::invalid_argument("duplicate free label '" + axes[a].label + "'");
      ids[t][a] = it->second;
      free_axis[it->second] = axes[a];
    }
  }
  for (const auto& [label, id] : free_id)
    if (!free_axis.count(id))
      throw std::invalid_argument("free label '" + label + "' not present in any tensor");

  Domain out_domain = Domain::NonNegative;
  std::vector<WorkTensor> work;
  for (size_t t = 0; t < plan.tensors.size(); ++t) {
    if (plan.tensors[t].domain() != Domain::NonNegative) out_domain = Domain::Complex;
    WorkTensor w;
    w.ids = ids[t];
    w.axes = plan.tensors[t].axes();
    w.data = plan.tensors[t].data();
    work.push_back(self_trace(std::move(w)));
  }

  // Greedy pairwise schedule: among pairs sharing a bond, contract the one
  // with the smallest result; fall back to the smallest outer product.
  while (work.size() > 1) {
    size_t best_i = 0, best_j = 1;
    Index best_cost = std::numeric_limits<Index>::max();
    bool found_bonded = false;
    for (size_t i = 0; i < work.size(); ++i) {
      for (size_t j = i + 1; j < work.size(); ++j) {
        Index shared_size = 1;
        bool shares = false;
        for (size_t k = 0; k < work[i].ids.size(); ++k) {
          int id = work[i].ids[k];
          if (id < n_bonds &&
              std::find(work[j].ids.begin(), work[j].ids.end(), id) != work[j].ids.end()) {
            shares = true;
            shared_size *= work[i].axes[k].dim;
          }
        }
        Index cost = product_dims(work[i]) / shared_size * (product_dims(work[j]) / shared_size);
        if (shares && (!found_bonded || cost < best_cost)) {
          found_bonded = true;
          best_cost = cost;
          best_i = i;
          best_j = j;
        } else if (!found_bonded && cost < best_cost) {
          best_cost = cost;
          best_i = i;
          best_j = j;
        }
      }
    }
    WorkTensor merged = pairwise_contract(work[best_i], work[best_j]);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(best_j));
    work[best_i] = std::move(merged);
  }

  // Order the result by the requested free label order.
  WorkTensor& result = work.front();
  std::vector<Index> perm;
  std::vector<Axis> out_axes;
  for (const std::string& label : plan.free) {
    int id = free_id.at(label);
    auto it = std::find(result.ids.begin(), result.ids.end(), id);
    perm.push_back(static_cast<Index>(it - result.ids.begin()));
    Axis ax = free_axis.at(id);
    ax.label = label;
    out_axes.push_back(ax);
  }
  Eigen::VectorXcd data = permute_flat(result.data, result.axes, perm);
  return Tensor(std::move(out_axes), std::move(data), out_domain);
}

double frobenius_distance(const Tensor& a, const Tensor& b) {
  Tensor ca = a.canonicalized();
  Tensor cb = b.canonicalized();
  if (ca.axes() != cb.axes())
    throw std::invalid_argument("frobenius_distance: shape mismatch");
  return (ca.data() - cb.data()).norm();
}

ScaleFit compute_scale_fit(const Tensor& candidate, const Tensor& target,
                           Domain domain) {
  Tensor c = candidate.canonicalized();
  Tensor t = target.canonicalized();
  if (c.axes() != t.axes())
    throw std::invalid_argument("match_up_to_scale: shape mismatch");
  double tnorm2 = t.data().squaredNorm();
  if (tnorm2 == 0.0)
    throw std::invalid_argument("match_up_to_scale: zero target tensor");

  Complex scale = t.data().dot(c.data()) / tnorm2;
  if (domain == Domain::NonNegative) scale = Complex(scale.real(), 0.0);
  double residual = (c.data() - scale * t.data()).norm() / std::sqrt(tnorm2);

  bool admissible;
  if (domain == Domain::NonNegative) {
    admissible = scale.real() > 0.0;
  } else {
    admissible = scale != Complex(0.0, 0.0);
  }
  return ScaleFit{scale, residual, admissible};
}

std::optional<ScaleMatch> match_up_to_scale(const Tensor& candidate,
                                            const Tensor& target,
                                            Domain domain, double tol) {
  ScaleFit fit = compute_scale_fit(candidate, target, domain);
  if (!fit.admissible || fit.residual > tol) return std::nullopt;
  return ScaleMatch{fit.scale, fit.residual};
}

}  // namespace netfactor
