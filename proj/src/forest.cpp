#include "stylo/forest.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cassert>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include "stylo/error.hpp"
#include "stylo/random.hpp"

namespace stylo {

namespace {

constexpr std::string_view kMagic = "stylo-random-forest v1";

// Training data in column-major layout with class indexes.
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t classes = 0;
  std::vector<double> columns;  // columns[f * n + i]
  std::vector<std::uint32_t> y;

  double value(std::size_t f, std::size_t i) const { return columns[f * n + i]; }
};

// n - sum(k^2)/n, i.e. n times the Gini impurity. Integer sums keep it reproducible.
double scaled_gini(std::span<const std::uint32_t> counts, std::uint64_t n) {
  if (n == 0) return 0.0;
  std::uint64_t sumsq = 0;
  for (auto c : counts) sumsq += std::uint64_t{c} * c;
  return static_cast<double>(n) - static_cast<double>(sumsq) / static_cast<double>(n);
}

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, const TrainConfig& config, std::size_t mtry, std::uint64_t seed)
      : data_(data), config_(config), mtry_(mtry), rng_(seed), importance_(data.p, 0.0) {}

  DecisionTree build() {
    std::vector<std::uint32_t> samples(data_.n);
    if (config_.bootstrap) {
      for (auto& s : samples) s = static_cast<std::uint32_t>(rng_.below(data_.n));
    } else {
      std::iota(samples.begin(), samples.end(), 0u);
    }
    in_bag_ = samples.size();
    feature_pool_.resize(data_.p);
    grow(samples);
    return DecisionTree(std::move(nodes_));
  }

  std::vector<double> take_importance() { return std::move(importance_); }

 private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = 0.0;
  };

  std::vector<std::uint32_t> class_counts(std::span<const std::uint32_t> samples) const {
    std::vector<std::uint32_t> counts(data_.classes, 0);
    for (auto s : samples) ++counts[data_.y[s]];
    return counts;
  }

  void grow(std::vector<std::uint32_t>& samples) {
    const auto idx = nodes_.size();
    nodes_.emplace_back();
    auto counts = class_counts(samples);
    const std::size_t present =
        static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    if (present <= 1 || samples.size() < 2 || samples.size() < config_.min_node_size) {
      nodes_[idx].counts = std::move(counts);
      return;
    }
    const double parent = scaled_gini(counts, samples.size());
    const Split best = find_split(samples, counts, parent);
    if (best.feature < 0) {
      nodes_[idx].counts = std::move(counts);
      return;
    }
    assert(best.score <= parent);
    importance_[static_cast<std::size_t>(best.feature)] +=
        (parent - best.score) / static_cast<double>(in_bag_);

    std::vector<std::uint32_t> left, right;
    for (auto s : samples) {
      (data_.value(static_cast<std::size_t>(best.feature), s) <= best.threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[idx].feature = best.feature;
    nodes_[idx].threshold = best.threshold;
    nodes_[idx].left = static_cast<std::uint32_t>(idx + 1);
    grow(left);
    nodes_[idx].right = static_cast<std::uint32_t>(nodes_.size());
    grow(right);
  }

  Split find_split(std::span<const std::uint32_t> samples, std::span<const std::uint32_t> counts,
                   double parent) {
    // Sample mtry features without replacement, then scan them in index order so that
    // equal scores resolve to the lowest feature index.
    std::iota(feature_pool_.begin(), feature_pool_.end(), 0u);
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::swap(feature_pool_[i], feature_pool_[i + rng_.below(data_.p - i)]);
    }
    std::vector<std::uint32_t> chosen(feature_pool_.begin(),
                                      feature_pool_.begin() + static_cast<std::ptrdiff_t>(mtry_));
    std::sort(chosen.begin(), chosen.end());

    const std::uint64_t n = samples.size();
    const double min_gain = 1e-12 * static_cast<double>(n);
    Split best;
    best.score = parent - min_gain;
    std::vector<std::pair<double, std::uint32_t>> column(n);
    std::vector<std::uint32_t> left(data_.classes), right(data_.classes);
    for (auto f : chosen) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {data_.value(f, samples[i]), data_.y[samples[i]]};
      }
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (column.front().first == column.back().first) continue;
      std::fill(left.begin(), left.end(), 0u);
      std::copy(counts.begin(), counts.end(), right.begin());
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left[column[i].second];
        --right[column[i].second];
        const double lo = column[i].first, hi = column[i + 1].first;
        if (lo == hi) continue;
        const double score = scaled_gini(left, i + 1) + scaled_gini(right, n - i - 1);
        if (score < best.score) {
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best = {static_cast<std::int32_t>(f), mid, score};
        }
      }
    }
    return best;
  }

  const Dataset& data_;
  const TrainConfig& config_;
  std::size_t mtry_;
  Rng rng_;
  std::vector<TreeNode> nodes_;
  std::vector<double> importance_;
  std::vector<std::uint32_t> feature_pool_;
  std::size_t in_bag_ = 0;
};

std::size_t majority(std::span<const std::uint32_t> counts) {
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

std::size_t TrainConfig::effective_mtry(std::size_t p) const {
  if (mtry != 0) return mtry;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(p)))));
}

void TrainConfig::validate(std::size_t p) const {
  if (n_trees < 1) throw InvalidArgument("n_trees must be at least 1");
  if (min_node_size < 1) throw InvalidArgument("min_node_size must be at least 1");
  if (p == 0) throw InvalidArgument("feature matrix has no columns");
  const auto m = effective_mtry(p);
  if (m < 1 || m > p) {
    throw InvalidArgument("mtry must be in 1.." + std::to_string(p) + ", got " + std::to_string(m));
  }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> row) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[row[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left
                                                                                   : node->right];
  }
  return *node;
}

std::size_t DecisionTree::predict(std::span<const double> row) const {
  return majority(leaf_for(row).counts);
}

RandomForestModel::RandomForestModel(std::vector<std::string> classes, std::size_t features,
                                     std::vector<DecisionTree> trees,
                                     std::vector<double> importance, TrainConfig config)
    : classes_(std::move(classes)),
      features_(features),
      trees_(std::move(trees)),
      importance_(std::move(importance)),
      config_(config) {
  if (importance_.size() != features_) throw InvalidArgument("importance length must equal p");
  for (const auto& t : trees_) {
    if (t.nodes().empty()) throw InvalidArgument("tree without nodes");
    for (const auto& n : t.nodes()) {
      if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= features_) {
        throw InvalidArgument("tree references a feature index out of range");
      }
      if (n.is_leaf() && n.counts.size() != classes_.size()) {
        throw InvalidArgument("leaf class counts do not match class count");
      }
    }
  }
}

Prediction RandomForestModel::predict(std::span<const double> row) const {
  if (row.size() != features_) {
    throw InvalidArgument("row has " + std::to_string(row.size()) + " features, model expects " +
                          std::to_string(features_));
  }
  std::vector<std::uint32_t> votes(classes_.size(), 0);
  for (const auto& t : trees_) ++votes[t.predict(row)];
  Prediction p;
  p.class_index = majority(votes);
  p.label = classes_[p.class_index];
  p.votes.reserve(votes.size());
  for (auto v : votes) p.votes.push_back(static_cast<double>(v) / static_cast<double>(trees_.size()));
  return p;
}

RandomForestModel train(const FeatureMatrix& m, const TrainConfig& config,
                        std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(m.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  if (rows.empty()) throw InvalidArgument("cannot train on an empty matrix");
  config.validate(m.cols());

  std::map<std::string, std::uint32_t> class_index;
  for (auto r : rows) class_index.emplace(m.labels().at(r), 0);
  if (class_index.size() < 2) {
    throw DegenerateInput("training data has a single class '" + class_index.begin()->first + "'");
  }
  std::vector<std::string> classes;
  for (auto& [label, idx] : class_index) {
    idx = static_cast<std::uint32_t>(classes.size());
    classes.push_back(label);
  }

  Dataset data;
  data.n = rows.size();
  data.p = m.cols();
  data.classes = classes.size();
  data.columns.resize(data.n * data.p);
  for (std::size_t i = 0; i < data.n; ++i) {
    const auto row = m.row(rows[i]);
    for (std::size_t f = 0; f < data.p; ++f) data.columns[f * data.n + i] = row[f];
    data.y.push_back(class_index.at(m.labels()[rows[i]]));
  }

  const std::size_t mtry = config.effective_mtry(data.p);
  std::vector<DecisionTree> trees(config.n_trees);
  std::vector<std::vector<double>> per_tree(config.n_trees);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < config.n_trees; t = next++) {
      TreeBuilder builder(data, config, mtry, derive_seed(config.seed, t));
      trees[t] = builder.build();
      per_tree[t] = builder.take_importance();
    }
  };
  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::size_t>(threads, 1, config.n_trees);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  // Summed in tree order so the result is independent of scheduling.
  std::vector<double> importance(data.p, 0.0);
  for (const auto& imp : per_tree) {
    for (std::size_t f = 0; f < data.p; ++f) importance[f] += imp[f];
  }
  const double total = std::accumulate(importance.begin(), importance.end(), 0.0);
  if (total > 0) {
    for (auto& v : importance) v /= total;
  }
  return RandomForestModel(std::move(classes), data.p, std::move(trees), std::move(importance),
                           config);
}

std::vector<std::pair<FeatureKey, double>> ranked_importance(const RandomForestModel& model,
                                                             std::span<const FeatureKey> keys) {
  if (keys.size() != model.feature_count()) {
    throw InvalidArgument("expected " + std::to_string(model.feature_count()) + " keys, got " +
                          std::to_string(keys.size()));
  }
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& imp = model.importance();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return imp[a] > imp[b]; });
  std::vector<std::pair<FeatureKey, double>> ranked;
  ranked.reserve(order.size());
  for (auto i : order) ranked.emplace_back(keys[i], imp[i]);
  return ranked;
}

// ---- persistence ----

std::string RandomForestModel::serialize() const {
  std::string out;
  out += kMagic;
  out += '\n';
  out += fmt::format("classes {}\n", classes_.size());
  for (const auto& c : classes_) out += c + '\n';
  out += fmt::format("features {}\n", features_);
  out += fmt::format("config {} {} {} {} {}\n", config_.n_trees, config_.mtry, config_.min_node_size,
                     config_.bootstrap ? 1 : 0, config_.seed);
  out += "importance";
  for (double v : importance_) out += fmt::format(" {}", v);
  out += '\n';
  out += fmt::format("trees {}\n", trees_.size());
  for (const auto& t : trees_) {
    out += fmt::format("tree {}\n", t.nodes().size());
    for (const auto& n : t.nodes()) {
      if (n.is_leaf()) {
        out += 'L';
        for (auto c : n.counts) out += fmt::format(" {}", c);
        out += '\n';
      } else {
        out += fmt::format("S {} {}\n", n.feature, n.threshold);
      }
    }
  }
  return out;
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next() {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of model file", line_ + 1);
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    auto line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_;
    return line;
  }

  std::vector<std::string_view> fields(std::string_view keyword, std::size_t min_fields) {
    auto line = next();
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto sp = line.find(' ', start);
      if (sp == std::string_view::npos) sp = line.size();
      if (sp > start) out.push_back(line.substr(start, sp - start));
      start = sp + 1;
    }
    if (out.empty() || (!keyword.empty() && out.front() != keyword) || out.size() < min_fields) {
      fail("expected '" + std::string(keyword) + "'");
    }
    return out;
  }

  template <class T>
  T number(std::string_view s) {
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      const std::string tmp(s);
      char* end = nullptr;
      v = std::strtod(tmp.c_str(), &end);
      if (end != tmp.c_str() + tmp.size()) fail("bad number '" + tmp + "'");
    } else {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) fail("bad integer '" + std::string(s) + "'");
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

RandomForestModel RandomForestModel::deserialize(std::string_view text) {
  LineReader in(text);
  if (in.next() != kMagic) throw ParseError("not a stylo random forest model", 1);
  const auto nclasses = in.number<std::size_t>(in.fields("classes", 2)[1]);
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < nclasses; ++i) classes.emplace_back(in.next());
  const auto p = in.number<std::size_t>(in.fields("features", 2)[1]);
  const auto cfg = in.fields("config", 6);
  TrainConfig config;
  config.n_trees = in.number<std::size_t>(cfg[1]);
  config.mtry = in.number<std::size_t>(cfg[2]);
  config.min_node_size = in.number<std::size_t>(cfg[3]);
  config.bootstrap = cfg[4] == "1";
  config.seed = in.number<std::uint64_t>(cfg[5]);
  const auto imp_fields = in.fields("importance", 1);
  if (imp_fields.size() != p + 1) in.fail("importance needs one value per feature");
  std::vector<double> importance;
  for (std::size_t i = 1; i < imp_fields.size(); ++i) importance.push_back(in.number<double>(imp_fields[i]));
  const auto ntrees = in.number<std::size_t>(in.fields("trees", 2)[1]);

  std::vector<DecisionTree> trees;
  trees.reserve(ntrees);
  for (std::size_t t = 0; t < ntrees; ++t) {
    const auto nnodes = in.number<std::size_t>(in.fields("tree", 2)[1]);
    std::vector<TreeNode> nodes(nnodes);
    std::size_t cursor = 0;
    // Rebuild child links from the preorder listing.
    auto read = [&](auto&& self) -> std::uint32_t {
      if (cursor >= nnodes) in.fail("tree has fewer nodes than declared");
      const auto idx = static_cast<std::uint32_t>(cursor++);
      const auto f = in.fields("", 1);
      if (f[0] == "L") {
        for (std::size_t i = 1; i < f.size(); ++i) nodes[idx].counts.push_back(in.number<std::uint32_t>(f[i]));
      } else if (f[0] == "S" && f.size() == 3) {
        nodes[idx].feature = in.number<std::int32_t>(f[1]);
        nodes[idx].threshold = in.number<double>(f[2]);
        nodes[idx].left = self(self);
        nodes[idx].right = self(self);
      } else {
        in.fail("expected a node line");
      }
      return idx;
    };
    read(read);
    if (cursor != nnodes) in.fail("tree has more nodes than its listing");
    trees.emplace_back(std::move(nodes));
  }
  return RandomForestModel(std::move(classes), p, std::move(trees), std::move(importance), config);
}

}  // namespace stylo
