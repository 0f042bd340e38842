#include "dgt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "dgt/error.hpp"

namespace dgt {

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

RowMatrix::RowMatrix(std::size_t rows, std::size_t cols,
                     std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw std::invalid_argument("matrix value count does not match shape");
  }
}

ProbabilityField::ProbabilityField(RowMatrix values, ClassLayout layout)
    : values_(std::move(values)), layout_(layout) {
  if (values_.cols() == 0 && values_.rows() > 0) {
    throw DataError("probability field has no columns");
  }
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    double sum = 0.0;
    for (double p : values_.row(i)) {
      if (!(p >= 0.0) || !std::isfinite(p)) {
        throw DataError("malformed probability row " + std::to_string(i) +
                        ": negative or non-finite entry");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw DataError("malformed probability row " + std::to_string(i) +
                      ": sums to " + std::to_string(sum));
    }
  }
}

ClassId ProbabilityField::class_of_column(std::size_t column) const {
  return static_cast<ClassId>(layout_ == ClassLayout::kSemanticOnly ? column + 1
                                                                    : column);
}

std::ptrdiff_t ProbabilityField::column_of_class(ClassId id) const {
  const auto column = static_cast<std::ptrdiff_t>(id) -
                      (layout_ == ClassLayout::kSemanticOnly ? 1 : 0);
  if (column < 0 || column >= static_cast<std::ptrdiff_t>(cols())) return -1;
  return column;
}

void validate_features(const FeatureField& features) {
  for (double v : features.values()) {
    if (!std::isfinite(v)) throw DataError("non-finite feature entry");
  }
}

double cross_entropy_loss(const ProbabilityField& probs,
                          std::span<const ClassId> labels,
                          ClassId ignore_class) {
  if (labels.size() != probs.rows()) {
    throw std::invalid_argument("label count does not match probability rows");
  }
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == ignore_class) continue;
    const auto column = probs.column_of_class(labels[i]);
    if (column < 0) {
      throw DataError("label " + std::to_string(labels[i]) +
                      " has no probability column");
    }
    sum -= std::log(std::max(probs.row(i)[column], kProbabilityFloor));
    ++counted;
  }
  if (counted == 0) throw DataError("no labeled points");
  return sum / static_cast<double>(counted);
}

RowMatrix self_information_map(const ProbabilityField& probs) {
  RowMatrix out(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const auto in = probs.row(i);
    auto dst = out.row(i);
    for (std::size_t k = 0; k < in.size(); ++k) {
      dst[k] = in[k] > 0.0 ? -in[k] * std::log(in[k]) : 0.0;
    }
  }
  return out;
}

namespace {

double domain_distance(double d, double label, AdversarialForm form) {
  const double diff = d - label;
  return form == AdversarialForm::kStandard ? diff * diff : std::abs(diff);
}

double mean_distance(std::span<const double> d, double label,
                     AdversarialForm form) {
  if (d.empty()) throw std::invalid_argument("empty discriminator field");
  double sum = 0.0;
  for (double v : d) {
    if (!std::isfinite(v)) throw DataError("non-finite discriminator output");
    sum += domain_distance(v, label, form);
  }
  return sum / static_cast<double>(d.size());
}

double signed_loss(double magnitude, AdversarialForm form) {
  return form == AdversarialForm::kNegatedAbsolute ? -magnitude : magnitude;
}

}  // namespace

double lsgan_adv_loss(std::span<const double> d_target, AdversarialForm form) {
  return signed_loss(mean_distance(d_target, kSourceDomainLabel, form), form);
}

double lsgan_disc_loss(std::span<const double> d_source,
                       std::span<const double> d_target,
                       AdversarialForm form) {
  return signed_loss(mean_distance(d_source, kSourceDomainLabel, form), form) +
         signed_loss(mean_distance(d_target, kTargetDomainLabel, form), form);
}

Prototypes empty_prototypes(std::size_t class_count, std::size_t dims) {
  return Prototypes{RowMatrix(class_count, dims),
                    std::vector<std::uint64_t>(class_count, 0)};
}

namespace {

void check_labels(const FeatureField& features,
                  std::span<const ClassId> labels, std::size_t class_count) {
  if (labels.size() != features.rows()) {
    throw std::invalid_argument("label count does not match feature rows");
  }
  for (ClassId k : labels) {
    if (k > class_count) {
      throw std::invalid_argument("label " + std::to_string(k) +
                                  " exceeds class count " +
                                  std::to_string(class_count));
    }
  }
  validate_features(features);
}

}  // namespace

Prototypes compute_prototypes(const FeatureField& features,
                              std::span<const ClassId> source_labels,
                              std::size_t class_count) {
  return update_prototypes(empty_prototypes(class_count, features.cols()),
                           features, source_labels);
}

Prototypes update_prototypes(const Prototypes& current,
                             const FeatureField& features,
                             std::span<const ClassId> source_labels) {
  const std::size_t classes = current.class_count();
  if (features.rows() > 0 && features.cols() != current.means.cols()) {
    throw std::invalid_argument("feature width does not match prototypes");
  }
  check_labels(features, source_labels, classes);

  const std::size_t dims = current.means.cols();
  RowMatrix batch_sums(classes, dims);
  std::vector<std::uint64_t> batch_counts(classes, 0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const ClassId k = source_labels[i];
    if (k == kUnlabeled) continue;
    auto sum = batch_sums.row(k - 1);
    const auto f = features.row(i);
    for (std::size_t j = 0; j < dims; ++j) sum[j] += f[j];
    ++batch_counts[k - 1];
  }

  Prototypes out = current;
  for (std::size_t c = 0; c < classes; ++c) {
    if (batch_counts[c] == 0) continue;
    const auto old_n = static_cast<double>(current.counts[c]);
    const auto new_n = static_cast<double>(current.counts[c] + batch_counts[c]);
    auto mean = out.means.row(c);
    const auto sum = batch_sums.row(c);
    for (std::size_t j = 0; j < dims; ++j) {
      mean[j] = (mean[j] * old_n + sum[j]) / new_n;
    }
    out.counts[c] += batch_counts[c];
  }
  return out;
}

std::vector<double> alignment_weights(const FeatureField& features,
                                      const PseudoLabels& pseudo,
                                      const Prototypes& prototypes) {
  if (pseudo.size() != features.rows()) {
    throw std::invalid_argument("pseudo-label count does not match features");
  }
  validate_features(features);
  std::vector<double> weights(features.rows(), 1.0);
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const ClassId k = pseudo.classes[i];
    if (k == kUnlabeled) continue;
    if (!prototypes.valid(k)) {
      throw DataError("no valid source prototype for pseudo class " +
                      std::to_string(k));
    }
    const auto f = features.row(i);
    const auto proto = prototypes.prototype(k);
    if (proto.size() != f.size()) {
      throw std::invalid_argument("feature width does not match prototypes");
    }
    double dot = 0.0;
    double ff = 0.0;
    double pp = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      dot += f[j] * proto[j];
      ff += f[j] * f[j];
      pp += proto[j] * proto[j];
    }
    if (ff == 0.0 || pp == 0.0) continue;
    const double cosine = dot / (std::sqrt(ff) * std::sqrt(pp));
    weights[i] = std::clamp(1.0 - cosine, 0.0, 2.0);
  }
  return weights;
}

double reweighted_adv_loss(std::span<const double> d_target,
                           std::span<const double> weights,
                           std::span<const ClassId> pseudo_labels,
                           AdversarialForm form) {
  if (d_target.empty()) throw std::invalid_argument("empty batch");
  if (weights.size() != d_target.size() ||
      pseudo_labels.size() != d_target.size()) {
    throw std::invalid_argument("inconsistent batch lengths");
  }
  struct ClassSum {
    double weighted = 0.0;
    std::uint64_t count = 0;
  };
  std::map<ClassId, ClassSum> per_class;
  for (std::size_t i = 0; i < d_target.size(); ++i) {
    if (!std::isfinite(d_target[i])) {
      throw DataError("non-finite discriminator output");
    }
    auto& acc = per_class[pseudo_labels[i]];
    acc.weighted +=
        weights[i] * domain_distance(d_target[i], kSourceDomainLabel, form);
    ++acc.count;
  }
  double total = 0.0;
  for (const auto& [k, acc] : per_class) {
    total += acc.weighted / static_cast<double>(acc.count);
  }
  return signed_loss(total, form);
}

void EmaState::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("EMA alpha must lie in [0, 1]");
  }
  if (interval < 1) throw std::invalid_argument("EMA interval must be >= 1");
}

EmaState ema_update(const EmaState& state, std::span<const double> student,
                    std::uint64_t iter) {
  state.validate();
  if (student.size() != state.teacher.size()) {
    throw std::invalid_argument("student/teacher parameter length mismatch");
  }
  if (iter < state.last_update_iter ||
      iter - state.last_update_iter < state.interval) {
    return state;
  }
  EmaState out = state;
  for (std::size_t i = 0; i < student.size(); ++i) {
    out.teacher[i] = state.alpha * state.teacher[i] +
                     (1.0 - state.alpha) * student[i];
  }
  out.last_update_iter = iter;
  return out;
}

namespace {

void check_alignment(const ProbabilityField& translated,
                     const ProbabilityField& teacher,
                     std::span<const std::uint32_t> map) {
  if (map.size() != translated.rows()) {
    throw std::invalid_argument("index map length does not match rows");
  }
  if (translated.cols() != teacher.cols() && translated.rows() > 0) {
    throw std::invalid_argument("class count mismatch between fields");
  }
  for (auto idx : map) {
    if (idx >= teacher.rows()) {
      throw std::out_of_range("index map entry " + std::to_string(idx) +
                              " out of range for " +
                              std::to_string(teacher.rows()) + " teacher rows");
    }
  }
  if (translated.rows() == 0) throw std::invalid_argument("empty field");
}

}  // namespace

double sac_consistency_loss(const ProbabilityField& p_translated,
                            const ProbabilityField& p_teacher_raw,
                            std::span<const std::uint32_t> kept_index_map) {
  check_alignment(p_translated, p_teacher_raw, kept_index_map);
  double total = 0.0;
  for (std::size_t i = 0; i < p_translated.rows(); ++i) {
    const auto p = p_translated.row(i);
    const auto q = p_teacher_raw.row(kept_index_map[i]);
    double kl = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] == 0.0) continue;
      kl += p[k] * (std::log(std::max(p[k], kProbabilityFloor)) -
                    std::log(std::max(q[k], kProbabilityFloor)));
    }
    total += std::max(kl, 0.0);
  }
  return total / static_cast<double>(p_translated.rows());
}

double sac_log_free(const ProbabilityField& p_translated,
                         const ProbabilityField& p_teacher_raw,
                         std::span<const std::uint32_t> kept_index_map) {
  check_alignment(p_translated, p_teacher_raw, kept_index_map);
  double total = 0.0;
  for (std::size_t i = 0; i < p_translated.rows(); ++i) {
    const auto p = p_translated.row(i);
    const auto q = p_teacher_raw.row(kept_index_map[i]);
    for (std::size_t k = 0; k < p.size(); ++k) {
      total += p[k] * (p[k] / std::max(q[k], kProbabilityFloor));
    }
  }
  return -total / static_cast<double>(p_translated.rows());
}

}  // namespace dgt
