#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace netfactor {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Scalar domain a tensor lives in. NonNegative restricts every entry to the
/// semiring (R+, +, *): zero imaginary part and non-negative real part.
enum class Domain { Complex, NonNegative };

const char* to_string(Domain d);
Domain domain_from_string(const std::string& s);

struct Axis {
  std::string label;
  Index dim = 0;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Dense multi-index array with labeled axes, stored row-major over the axis
/// order. Axis labels within one tensor are distinct; the domain tag is an
/// invariant of the data (checked on construction).
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<Axis> axes, Eigen::VectorXcd data, Domain domain);

  static Tensor zeros(std::vector<Axis> axes, Domain domain);
  /// Generalized Kronecker delta: entry 1 where all indices coincide.
  /// All axes must share one dimension. Tagged NonNegative.
  static Tensor delta(std::vector<Axis> axes);
  /// Builds a tensor from a sparse entry list; omitted entries are zero.
  static Tensor from_entries(
      std::vector<Axis> axes,
      const std::vector<std::pair<std::vector<Index>, Complex>>& entries,
      Domain domain);

  Index rank() const { return static_cast<Index>(axes_.size()); }
  Index size() const { return data_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Eigen::VectorXcd& data() const { return data_; }
  Eigen::VectorXcd& mutable_data() { return data_; }
  Domain domain() const { return domain_; }

  bool has_axis(const std::string& label) const;
  Index axis_index(const std::string& label) const;  // throws if absent
  Index dim(const std::string& label) const;

  Index flat_index(std::span<const Index> multi) const;
  std::vector<Index> multi_index(Index flat) const;

  Complex at(std::span<const Index> multi) const;
  Complex at(std::initializer_list<Index> multi) const;
  void set(std::span<const Index> multi, Complex value);
  void set(std::initializer_list<Index> multi, Complex value);

  double norm() const { return data_.norm(); }
  bool is_zero() const { return data_.isZero(0.0); }

  /// Same data under a new domain tag; NonNegative re-checks the invariant.
  Tensor retagged(Domain domain) const;
  Tensor scaled(Complex factor) const;
  /// Renames axes; labels not present in the map are kept.
  Tensor relabeled(const std::vector<std::pair<std::string, std::string>>& renames) const;
  /// Permutes axes into the given label order (must be a permutation).
  Tensor transposed(std::span<const std::string> order) const;
  /// Axes sorted by label; the canonical form used for comparisons.
  Tensor canonicalized() const;

  /// True when both tensors have identical axis labels and dims after
  /// canonical ordering.
  bool same_shape(const Tensor& other) const;

  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  std::vector<Axis> axes_;
  Eigen::VectorXcd data_;
  Domain domain_ = Domain::Complex;
};

/// Row-major strides for a dim list.
std::vector<Index> row_major_strides(std::span<const Axis> axes);

/// Reorders the flat data of a row-major array under an axis permutation;
/// perm[i] is the position in the old axis order of the i-th new axis.
Eigen::VectorXcd permute_flat(const Eigen::VectorXcd& data,
                              std::span<const Axis> axes,
                              std::span<const Index> perm);

/// Rank-2 tensor as an Eigen matrix (axis 0 rows, axis 1 columns).
Eigen::MatrixXcd to_matrix(const Tensor& t);
/// Wraps a matrix as a rank-2 tensor with the given axis labels.
Tensor from_matrix(const Eigen::MatrixXcd& m, const std::string& row_label,
                   const std::string& col_label, Domain domain);

}  // namespace netfactor
