#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/features.hpp"
#include "stylo/forest.hpp"

namespace stylo {

// counts[t][c] = documents of true class t classified as c.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::vector<std::string> classes);
  ConfusionMatrix(std::vector<std::string> classes, std::vector<std::vector<std::uint64_t>> counts);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::vector<std::vector<std::uint64_t>>& counts() const noexcept { return counts_; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts_[truth][predicted]; }
  std::uint64_t total() const noexcept;
  std::size_t index_of(std::string_view label) const;

  void add(std::string_view truth, std::string_view predicted);

  // `true_class,<classes...>` header then one row per true class.
  std::string to_csv() const;
  static ConfusionMatrix from_csv(std::string_view text);

 private:
  std::vector<std::string> classes_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

struct ClassMetrics {
  double recall = 0.0;     // per true class
  double precision = 0.0;  // per predicted class
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<std::string> classes;
  std::vector<ClassMetrics> per_class;
};

Metrics metrics(const ConfusionMatrix& cm);

struct CvSummary {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation (n - 1)
};

CvSummary summarize_folds(std::vector<double> fold_accuracies);

// Leave-one-out: fold i trains on every other row with seed derived from (seed, i).
ConfusionMatrix loocv(const FeatureMatrix& m, const TrainConfig& config);

// Rows shuffled with the seeded generator and dealt into k folds whose sizes differ by
// at most one; returns per-fold accuracy with mean and sample SD.
CvSummary kfold(const FeatureMatrix& m, std::size_t k, const TrainConfig& config);

// Fold membership used by kfold (exposed for inspection).
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed);

// Percentage to one decimal place, rounding half away from zero ("95.4%").
std::string format_percent(double fraction);

// Plain-text table: confusion counts, then accuracy, recall, precision and F1 rows.
std::string render_report(const ConfusionMatrix& cm, std::string_view title = {});
std::string metrics_csv(const Metrics& m);
std::string cv_summary_csv(const CvSummary& s);

}  // namespace stylo
