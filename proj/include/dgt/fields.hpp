#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dgt/scan.hpp"

namespace dgt {

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kRowSumTolerance = 1e-6;

// Dense row-major matrix of doubles.
class RowMatrix {
 public:
  RowMatrix() = default;
  RowMatrix(std::size_t rows, std::size_t cols);
  RowMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }
  double operator()(std::size_t i, std::size_t j) const {
    return values_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[i * cols_ + j];
  }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const RowMatrix&, const RowMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

// How probability columns map to class ids.
//   kWithUnlabeled: column c is class c (column 0 is the unlabeled class).
//   kSemanticOnly:  column c is class c + 1.
enum class ClassLayout { kWithUnlabeled, kSemanticOnly };

// Per-point class probabilities. Every row is non-negative and sums to 1
// within kRowSumTolerance; the constructor throws DataError otherwise.
class ProbabilityField {
 public:
  ProbabilityField() = default;
  ProbabilityField(RowMatrix values,
                   ClassLayout layout = ClassLayout::kWithUnlabeled);

  std::size_t rows() const { return values_.rows(); }
  std::size_t cols() const { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  const RowMatrix& matrix() const { return values_; }
  ClassLayout layout() const { return layout_; }

  ClassId class_of_column(std::size_t column) const;
  // Column holding `id`, or -1 when the layout has no column for it.
  std::ptrdiff_t column_of_class(ClassId id) const;

 private:
  RowMatrix values_;
  ClassLayout layout_ = ClassLayout::kWithUnlabeled;
};

// Per-point embeddings; entries must be finite.
using FeatureField = RowMatrix;
void validate_features(const FeatureField& features);

}  // namespace dgt
