#include "dgt/pseudo_label.hpp"

#include <stdexcept>

namespace dgt {

PseudoLabels generate_pseudo_labels(const ProbabilityField& probs,
                                    double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("pseudo-label threshold must lie in [0, 1]");
  }
  const std::size_t first =
      probs.layout() == ClassLayout::kWithUnlabeled ? 1 : 0;
  PseudoLabels out;
  out.threshold = threshold;
  out.classes.assign(probs.rows(), kUnlabeled);
  out.confidence.assign(probs.rows(), 0.0);
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto row = probs.row(i);
    if (row.size() <= first) continue;
    std::size_t best = first;
    for (std::size_t k = first + 1; k < row.size(); ++k) {
      if (row[k] > row[best]) best = k;
    }
    out.confidence[i] = row[best];
    if (row[best] > threshold) out.classes[i] = probs.class_of_column(best);
  }
  return out;
}

}  // namespace dgt
