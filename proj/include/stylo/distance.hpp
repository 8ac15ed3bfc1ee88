#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/features.hpp"

namespace stylo {

// Largest possible value of sjs_distance (natural logarithm).
inline const double kMaxSjsDistance = 0.83255461115769775635;  // sqrt(ln 2)

// Square root of the symmetric Jensen-Shannon divergence (natural log):
//   d^2 = 1/2 * sum_i x_i log(2x_i/(x_i+y_i)) + y_i log(2y_i/(x_i+y_i))
// with 0 log 0 = 0. Both inputs must be probability vectors (sum 1 within tolerance).
double sjs_distance(std::span<const double> x, std::span<const double> y, double tolerance = 1e-9);

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  DistanceMatrix(std::vector<std::string> doc_ids, std::vector<std::string> labels,
                 std::vector<double> values);

  std::size_t size() const noexcept { return doc_ids_.size(); }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  // Square CSV; the first row and column carry doc ids (corner cell "doc_id").
  std::string to_csv() const;
  // Labels are not part of the CSV and come back empty.
  static DistanceMatrix from_csv(std::string_view text);

 private:
  std::vector<std::string> doc_ids_;
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

// Pairwise sjs_distance over matrix rows. Throws InvalidArgument naming the offending
// document when a row is not a probability vector.
DistanceMatrix distance_matrix(const FeatureMatrix& m);

}  // namespace stylo
