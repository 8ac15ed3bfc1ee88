#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stylo/features.hpp"

namespace stylo {

// Defaults follow the usual random-forest classification settings:
// floor(sqrt(p)) candidate features per split, grow to purity, bootstrap n of n.
struct TrainConfig {
  std::size_t n_trees = 1000;
  std::size_t mtry = 0;  // 0 selects floor(sqrt(p))
  std::size_t min_node_size = 1;
  bool bootstrap = true;
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // 0 uses every hardware thread; results do not depend on it

  std::size_t effective_mtry(std::size_t p) const;
  void validate(std::size_t p) const;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // samples with value <= threshold go left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::vector<std::uint32_t> counts;  // in-bag class counts, leaves only

  bool is_leaf() const noexcept { return feature < 0; }
};

// Nodes are stored in preorder; the root is nodes.front().
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& leaf_for(std::span<const double> row) const;
  // Majority class of the reached leaf; ties go to the lowest class index.
  std::size_t predict(std::span<const double> row) const;

 private:
  std::vector<TreeNode> nodes_;
};

struct Prediction {
  std::string label;
  std::size_t class_index = 0;
  std::vector<double> votes;  // fraction of trees per class, aligned with classes()
};

class RandomForestModel {
 public:
  RandomForestModel() = default;
  RandomForestModel(std::vector<std::string> classes, std::size_t features,
                    std::vector<DecisionTree> trees, std::vector<double> importance,
                    TrainConfig config);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t feature_count() const noexcept { return features_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  // Mean decrease in Gini impurity, normalised to sum to 1 (all zero if no tree split).
  const std::vector<double>& importance() const noexcept { return importance_; }
  const TrainConfig& config() const noexcept { return config_; }

  // Plurality vote; ties go to the lexicographically smallest label.
  Prediction predict(std::span<const double> row) const;

  // Versioned text format: header, classes, config, importance, then per tree a
  // preorder list of `S <feature> <threshold>` and `L <counts...>` lines.
  std::string serialize() const;
  static RandomForestModel deserialize(std::string_view text);

 private:
  std::vector<std::string> classes_;
  std::size_t features_ = 0;
  std::vector<DecisionTree> trees_;
  std::vector<double> importance_;
  TrainConfig config_;
};

// Trains on the given rows of `m` (all rows when `rows` is empty). Throws
// InvalidArgument for an empty selection and DegenerateInput for fewer than two classes.
RandomForestModel train(const FeatureMatrix& m, const TrainConfig& config,
                        std::span<const std::size_t> rows = {});

// Feature keys with their importance, highest first; ties keep key order.
std::vector<std::pair<FeatureKey, double>> ranked_importance(const RandomForestModel& model,
                                                             std::span<const FeatureKey> keys);

}  // namespace stylo
