#include "netfactor/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace netfactor {

const char* to_string(Domain d) {
  return d == Domain::Complex ? "complex" : "nonneg";
}

Domain domain_from_string(const std::string& s) {
  if (s == "complex") return Domain::Complex;
  if (s == "nonneg") return Domain::NonNegative;
  throw std::invalid_argument("unknown scalar domain: " + s);
}

namespace {

Index checked_size(const std::vector<Axis>& axes) {
  Index n = 1;
  std::set<std::string> seen;
  for (const Axis& a : axes) {
    if (a.label.empty()) throw std::invalid_argument("empty axis label");
    if (a.dim < 1) throw std::invalid_argument("axis '" + a.label + "' has non-positive dim");
    if (!seen.insert(a.label).second)
      throw std::invalid_argument("duplicate axis label '" + a.label + "'");
    n *= a.dim;
  }
  return n;
}

void check_domain(const Eigen::VectorXcd& data, Domain domain) {
  if (domain != Domain::NonNegative) return;
  for (Index k = 0; k < data.size(); ++k) {
    if (data[k].imag() != 0.0 || data[k].real() < 0.0)
      throw std::invalid_argument("entry outside the non-negative real domain");
  }
}

}  // namespace

Tensor::Tensor(std::vector<Axis> axes, Eigen::VectorXcd data, Domain domain)
    : axes_(std::move(axes)), data_(std::move(data)), domain_(domain) {
  if (checked_size(axes_) != data_.size())
    throw std::invalid_argument("tensor data length does not match axis dims");
  check_domain(data_, domain_);
}

Tensor Tensor::zeros(std::vector<Axis> axes, Domain domain) {
  Index n = checked_size(axes);
  return Tensor(std::move(axes), Eigen::VectorXcd::Zero(n), domain);
}

Tensor Tensor::delta(std::vector<Axis> axes) {
  if (axes.empty()) throw std::invalid_argument("delta needs at least one axis");
  Index d = axes.front().dim;
  for (const Axis& a : axes)
    if (a.dim != d) throw std::invalid_argument("delta axes must share one dim");
  Tensor t = zeros(std::move(axes), Domain::NonNegative);
  std::vector<Index> idx(t.rank());
  for (Index i = 0; i < d; ++i) {
    std::fill(idx.begin(), idx.end(), i);
    t.set(idx, Complex(1.0, 0.0));
  }
  return t;
}

Tensor Tensor::from_entries(
    std::vector<Axis> axes,
    const std::vector<std::pair<std::vector<Index>, Complex>>& entries,
    Domain domain) {
  Tensor t = zeros(std::move(axes), Domain::Complex);
  for (const auto& [multi, value] : entries) t.set(multi, value);
  return t.retagged(domain);
}

bool Tensor::has_axis(const std::string& label) const {
  return std::any_of(axes_.begin(), axes_.end(),
                     [&](const Axis& a) { return a.label == label; });
}

Index Tensor::axis_index(const std::string& label) const {
  for (Index i = 0; i < rank(); ++i)
    if (axes_[static_cast<size_t>(i)].label == label) return i;
  throw std::invalid_argument("no axis labeled '" + label + "'");
}

Index Tensor::dim(const std::string& label) const {
  return axes_[static_cast<size_t>(axis_index(label))].dim;
}

Index Tensor::flat_index(std::span<const Index> multi) const {
  if (static_cast<Index>(multi.size()) != rank())
    throw std::invalid_argument("multi-index arity mismatch");
  Index flat = 0;
  for (size_t i = 0; i < multi.size(); ++i) {
    if (multi[i] < 0 || multi[i] >= axes_[i].dim)
      throw std::out_of_range("index out of range on axis '" + axes_[i].label + "'");
    flat = flat * axes_[i].dim + multi[i];
  }
  return flat;
}

std::vector<Index> Tensor::multi_index(Index flat) const {
  std::vector<Index> multi(static_cast<size_t>(rank()));
  for (Index i = rank() - 1; i >= 0; --i) {
    multi[static_cast<size_t>(i)] = flat % axes_[static_cast<size_t>(i)].dim;
    flat /= axes_[static_cast<size_t>(i)].dim;
  }
  return multi;
}

Complex Tensor::at(std::span<const Index> multi) const {
  return data_[flat_index(multi)];
}

Complex Tensor::at(std::initializer_list<Index> multi) const {
  return at(std::span<const Index>(multi.begin(), multi.size()));
}

void Tensor::set(std::span<const Index> multi, Complex value) {
  data_[flat_index(multi)] = value;
}

void Tensor::set(std::initializer_list<Index> multi, Complex value) {
  set(std::span<const Index>(multi.begin(), multi.size()), value);
}

Tensor Tensor::retagged(Domain domain) const {
  return Tensor(axes_, data_, domain);
}

Tensor Tensor::scaled(Complex factor) const {
  Domain d = domain_;
  if (factor.imag() != 0.0 || factor.real() < 0.0) d = Domain::Complex;
  return Tensor(axes_, factor * data_, d);
}

Tensor Tensor::relabeled(
    const std::vector<std::pair<std::string, std::string>>& renames) const {
  std::vector<Axis> axes = axes_;
  for (Axis& a : axes)
    for (const auto& [from, to] : renames)
      if (a.label == from) {
        a.label = to;
        break;
      }
  return Tensor(std::move(axes), data_, domain_);
}

Tensor Tensor::transposed(std::span<const std::string> order) const {
  if (static_cast<Index>(order.size()) != rank())
    throw std::invalid_argument("transpose order arity mismatch");
  std::vector<Index> perm;
  perm.reserve(order.size());
  for (const std::string& label : order) perm.push_back(axis_index(label));
  std::vector<Index> sorted = perm;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < rank(); ++i)
    if (sorted[static_cast<size_t>(i)] != i)
      throw std::invalid_argument("transpose order is not a permutation");
  std::vector<Axis> axes;
  axes.reserve(order.size());
  for (Index p : perm) axes.push_back(axes_[static_cast<size_t>(p)]);
  return Tensor(std::move(axes), permute_flat(data_, axes_, perm), domain_);
}

Tensor Tensor::canonicalized() const {
  std::vector<std::string> order;
  order.reserve(axes_.size());
  for (const Axis& a : axes_) order.push_back(a.label);
  std::sort(order.begin(), order.end());
  return transposed(order);
}

bool Tensor::same_shape(const Tensor& other) const {
  return canonicalized().axes() == other.canonicalized().axes();
}

bool operator==(const Tensor& a, const Tensor& b) {
  return a.axes_ == b.axes_ && a.domain_ == b.domain_ && a.data_ == b.data_;
}

std::vector<Index> row_major_strides(std::span<const Axis> axes) {
  std::vector<Index> strides(axes.size(), 1);
  for (size_t i = axes.size(); i-- > 1;)
    strides[i - 1] = strides[i] * axes[i].dim;
  return strides;
}

Eigen::VectorXcd permute_flat(const Eigen::VectorXcd& data,
                              std::span<const Axis> axes,
                              std::span<const Index> perm) {
  const size_t rank = axes.size();
  if (rank == 0) return data;
  std::vector<Index> old_strides = row_major_strides(axes);
  // Stride in the old layout of each new axis, plus the new dims.
  std::vector<Index> stride_of_new(rank), dim_of_new(rank);
  for (size_t i = 0; i < rank; ++i) {
    stride_of_new[i] = old_strides[static_cast<size_t>(perm[i])];
    dim_of_new[i] = axes[static_cast<size_t>(perm[i])].dim;
  }
  Eigen::VectorXcd out(data.size());
  std::vector<Index> idx(rank, 0);
  Index src = 0;
  for (Index dst = 0; dst < data.size(); ++dst) {
    out[dst] = data[src];
    for (size_t i = rank; i-- > 0;) {
      if (++idx[i] < dim_of_new[i]) {
        src += stride_of_new[i];
        break;
      }
      idx[i] = 0;
      src -= stride_of_new[i] * (dim_of_new[i] - 1);
    }
  }
  return out;
}

Eigen::MatrixXcd to_matrix(const Tensor& t) {
  if (t.rank() != 2) throw std::invalid_argument("to_matrix needs a rank-2 tensor");
  Index rows = t.axes()[0].dim, cols = t.axes()[1].dim;
  Eigen::MatrixXcd m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = t.data()[r * cols + c];
  return m;
}

Tensor from_matrix(const Eigen::MatrixXcd& m, const std::string& row_label,
                   const std::string& col_label, Domain domain) {
  Eigen::VectorXcd data(m.size());
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) data[r * m.cols() + c] = m(r, c);
  return Tensor({{row_label, m.rows()}, {col_label, m.cols()}}, std::move(data), domain);
}

}  // namespace netfactor
