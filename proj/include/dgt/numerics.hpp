#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dgt/fields.hpp"
#include "dgt/pseudo_label.hpp"

namespace dgt {

inline constexpr double kDefaultEmaAlpha = 0.99;
inline constexpr std::uint64_t kDefaultEmaInterval = 100;
inline constexpr double kDefaultAdversarialWeight = 0.001;
inline constexpr double kDefaultConsistencyWeight = 0.001;

// Mean of -log P[i, y_i] over points whose label differs from
// `ignore_class`. Throws DataError when every point is ignored.
double cross_entropy_loss(const ProbabilityField& probs,
                          std::span<const ClassId> labels,
                          ClassId ignore_class = kUnlabeled);

// Element-wise -p log p with 0 log 0 = 0.
RowMatrix self_information_map(const ProbabilityField& probs);

// kNegatedAbsolute: -mean |D - label| (unsquared distance, negated).
// kStandard: mean (D - label)^2, the conventional least-squares GAN form.
enum class AdversarialForm { kNegatedAbsolute, kStandard };

inline constexpr double kSourceDomainLabel = 0.0;
inline constexpr double kTargetDomainLabel = 1.0;

double lsgan_adv_loss(std::span<const double> d_target,
                      AdversarialForm form = AdversarialForm::kNegatedAbsolute);
double lsgan_disc_loss(std::span<const double> d_source,
                       std::span<const double> d_target,
                       AdversarialForm form = AdversarialForm::kNegatedAbsolute);

// Class centroids of source features. Row k - 1 holds class k.
struct Prototypes {
  RowMatrix means;
  std::vector<std::uint64_t> counts;

  std::size_t class_count() const { return counts.size(); }
  bool valid(ClassId k) const {
    return k >= 1 && k <= counts.size() && counts[k - 1] > 0;
  }
  std::span<const double> prototype(ClassId k) const {
    return means.row(k - 1);
  }
};

Prototypes empty_prototypes(std::size_t class_count, std::size_t dims);

// One-shot per-class mean. Label 0 rows are skipped.
Prototypes compute_prototypes(const FeatureField& features,
                              std::span<const ClassId> source_labels,
                              std::size_t class_count);

// Running mean: folds a new source batch into existing prototypes.
Prototypes update_prototypes(const Prototypes& current,
                             const FeatureField& features,
                             std::span<const ClassId> source_labels);

// M_i = 1 - cos(G(x_i), prototype of its pseudo class) for accepted points,
// 1 for rejected points and for zero-norm features or prototypes.
std::vector<double> alignment_weights(const FeatureField& features,
                                      const PseudoLabels& pseudo,
                                      const Prototypes& prototypes);

// Category-level reweighted adversarial loss: each class appearing in
// `pseudo_labels` (class 0 included) contributes the mean of M_i * dist_i
// over its points, where dist_i is |D_i| (negated absolute) or D_i^2 (standard); the
// absolute form is negated.
double reweighted_adv_loss(std::span<const double> d_target,
                           std::span<const double> weights,
                           std::span<const ClassId> pseudo_labels,
                           AdversarialForm form = AdversarialForm::kNegatedAbsolute);

struct EmaState {
  std::vector<double> teacher;
  double alpha = kDefaultEmaAlpha;
  std::uint64_t interval = kDefaultEmaInterval;
  std::uint64_t last_update_iter = 0;

  void validate() const;
  friend bool operator==(const EmaState&, const EmaState&) = default;
};

// Applies teacher <- alpha * teacher + (1 - alpha) * student when at least
// `interval` iterations passed since the last update; otherwise returns the
// state unchanged.
EmaState ema_update(const EmaState& state, std::span<const double> student,
                    std::uint64_t iter);

// Mean over translated points of KL(P_translated || P_teacher[map[i]]).
double sac_consistency_loss(const ProbabilityField& p_translated,
                            const ProbabilityField& p_teacher_raw,
                            std::span<const std::uint32_t> kept_index_map);

// Log-free variant kept for auditing: -(1/N) sum_i sum_k P * (P / P_tea).
double sac_log_free(const ProbabilityField& p_translated,
                         const ProbabilityField& p_teacher_raw,
                         std::span<const std::uint32_t> kept_index_map);

inline double total_adv_loss(double ce_source, double adv_reweighted,
                             double gamma1 = kDefaultAdversarialWeight) {
  return ce_source + gamma1 * adv_reweighted;
}

inline double total_st_loss(double ce_source_translated, double ce_mixed,
                            double sac,
                            double gamma2 = kDefaultConsistencyWeight) {
  return ce_source_translated + ce_mixed + gamma2 * sac;
}

}  // namespace dgt
