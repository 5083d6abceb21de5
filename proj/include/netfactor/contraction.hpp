#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "netfactor/tensor.hpp"

namespace netfactor {

/// A multi-tensor contraction. Each bond names two axes to be summed against
/// each other; a bond of the form (l, l) pairs the two occurrences of label l
/// across the tensor list. Non-bonded labels must be globally unique and make
/// up the free axes of the result.
struct ContractionPlan {
  std::vector<Tensor> tensors;
  std::vector<std::pair<std::string, std::string>> bonds;
  std::vector<std::string> free;  // axis order of the result

  /// Plan with the free labels inferred (sorted lexicographically).
  static ContractionPlan infer_free(
      std::vector<Tensor> tensors,
      std::vector<std::pair<std::string, std::string>> bonds);
};

/// Sums every bonded index pair and returns the tensor over the free labels.
/// Output domain is NonNegative iff every input is NonNegative. Pairwise
/// schedule: greedy smallest-intermediate-first.
Tensor contract(const ContractionPlan& plan);

/// sqrt(sum |a_k - b_k|^2) after canonical axis ordering; shapes must match.
double frobenius_distance(const Tensor& a, const Tensor& b);

struct ScaleFit {
  Complex scale;
  double residual;  // |candidate - scale * target| / |target|
  bool admissible;  // scale valid for the requested domain
};

/// Least-squares fit of candidate against scale * target. Admissibility:
/// nonzero scale for Domain::Complex, strictly positive real scale for
/// Domain::NonNegative. The target must not be identically zero.
ScaleFit compute_scale_fit(const Tensor& candidate, const Tensor& target,
                           Domain domain);

struct ScaleMatch {
  Complex scale;
  double residual;
};

/// Empty when the fit fails the tolerance or the scale is inadmissible.
std::optional<ScaleMatch> match_up_to_scale(const Tensor& candidate,
                                            const Tensor& target,
                                            Domain domain, double tol);

}  // namespace netfactor
