#pragma once

#include <vector>

#include "dgt/fields.hpp"

namespace dgt {

inline constexpr double kDefaultPseudoLabelThreshold = 0.9;

struct PseudoLabels {
  std::vector<ClassId> classes;   // 0 = rejected
  std::vector<double> confidence;  // max semantic probability per point
  double threshold = kDefaultPseudoLabelThreshold;

  std::size_t size() const { return classes.size(); }
};

// Confidence-thresholded argmax. A point is accepted only when its maximum
// semantic probability is strictly greater than `threshold`; argmax ties go
// to the lowest class id. The unlabeled column (kWithUnlabeled layout) never
// wins the argmax.
PseudoLabels generate_pseudo_labels(
    const ProbabilityField& probs,
    double threshold = kDefaultPseudoLabelThreshold);

}  // namespace dgt
