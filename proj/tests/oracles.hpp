#pragma once

// Brute-force reference computations used only by tests. Each one follows
// the defining formula directly (one-hot sums, per-class scans, explicit
// enumeration) rather than the library's code path.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace dgt::oracle {

constexpr double kFloor = 1e-12;

// rows: N x C probabilities; column c is class (c + offset).
inline double cross_entropy(const std::vector<std::vector<double>>& probs,
                            const std::vector<int>& labels, int offset) {
  double total = 0;
  int counted = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] == 0) continue;
    double row = 0;
    for (std::size_t c = 0; c < probs[i].size(); ++c) {
      const double onehot = static_cast<int>(c) + offset == labels[i] ? 1.0 : 0.0;
      row += onehot * std::log(std::max(probs[i][c], kFloor));
    }
    total -= row;
    ++counted;
  }
  return total / counted;
}

inline double self_information(double p) { return p == 0 ? 0.0 : -p * std::log(p); }

inline double kl_mean(const std::vector<std::vector<double>>& p,
                      const std::vector<std::vector<double>>& q,
                      const std::vector<std::uint32_t>& map) {
  double total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& qi = q[map[i]];
    for (std::size_t k = 0; k < p[i].size(); ++k) {
      total += p[i][k] * std::log(std::max(p[i][k], kFloor) / std::max(qi[k], kFloor));
    }
  }
  return total / static_cast<double>(p.size());
}

// Per-class mean of features; classes 1..K. Returns (means, counts).
inline std::pair<std::vector<std::vector<double>>, std::vector<int>> prototypes(
    const std::vector<std::vector<double>>& features, const std::vector<int>& labels,
    int classes) {
  std::vector<std::vector<double>> means(classes);
  std::vector<int> counts(classes, 0);
  const std::size_t d = features.empty() ? 0 : features[0].size();
  for (int k = 1; k <= classes; ++k) {
    std::vector<double> acc(d, 0.0);
    int n = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (labels[i] != k) continue;
      for (std::size_t j = 0; j < d; ++j) acc[j] += features[i][j];
      ++n;
    }
    if (n > 0) {
      for (auto& v : acc) v /= n;
    }
    means[k - 1] = acc;
    counts[k - 1] = n;
  }
  return {means, counts};
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    dot += a[j] * b[j];
    na += a[j] * a[j];
    nb += b[j] * b[j];
  }
  return dot / std::sqrt(na * nb);
}

// Sum over classes 0..max of (1/N_k) sum_{label=k} M_i |D_i|, negated.
inline double reweighted_negated(const std::vector<double>& d, const std::vector<double>& m,
                                 const std::vector<int>& labels) {
  const int max_class = *std::max_element(labels.begin(), labels.end());
  double total = 0;
  for (int k = 0; k <= max_class; ++k) {
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (labels[i] != k) continue;
      sum += m[i] * std::sqrt(d[i] * d[i]);
      ++n;
    }
    if (n > 0) total += sum / n;
  }
  return -total;
}

// Globally optimal 1-D 2-means by trying every split of the sorted sample.
inline std::pair<double, double> optimal_two_means(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double best = std::numeric_limits<double>::infinity();
  std::pair<double, double> centers;
  for (std::size_t split = 1; split < v.size(); ++split) {
    double m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < split; ++i) m1 += v[i];
    for (std::size_t i = split; i < v.size(); ++i) m2 += v[i];
    m1 /= split;
    m2 /= (v.size() - split);
    double sse = 0;
    for (std::size_t i = 0; i < split; ++i) sse += (v[i] - m1) * (v[i] - m1);
    for (std::size_t i = split; i < v.size(); ++i) sse += (v[i] - m2) * (v[i] - m2);
    if (sse < best) {
      best = sse;
      centers = {m1, m2};
    }
  }
  return centers;
}

}  // namespace dgt::oracle
