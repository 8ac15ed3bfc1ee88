#include <doctest.h>

#include <cmath>
#include <numeric>

#include "stylo/error.hpp"
#include "stylo/forest.hpp"
#include "stylo/random.hpp"

using namespace stylo;

namespace {

std::vector<FeatureKey> keys_for(std::size_t p) {
  std::vector<FeatureKey> keys;
  for (std::size_t j = 0; j < p; ++j) {
    keys.push_back(FeatureKey::make(FeatureFamily::FunctionWord, {"f" + std::to_string(j)}));
  }
  return keys;
}

// Feature 0 is 0 for class A and 1 for class B; the rest is uniform noise.
FeatureMatrix separable(std::size_t per_class, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::string> ids, labels;
  std::vector<double> values;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const bool b = i % 2;
    ids.push_back("d" + std::to_string(i));
    labels.push_back(b ? "B" : "A");
    values.push_back(b ? 1.0 : 0.0);
    for (std::size_t j = 1; j < p; ++j) values.push_back(rng.uniform());
  }
  return FeatureMatrix(keys_for(p), ids, labels, values);
}

TrainConfig small(std::size_t trees, std::uint64_t seed = 3) {
  TrainConfig c;
  c.n_trees = trees;
  c.seed = seed;
  return c;
}

// Class counts reaching each node (sum of leaf counts below it).
std::vector<std::uint64_t> node_counts(const DecisionTree& t, std::size_t idx, std::size_t classes,
                                       std::vector<std::vector<std::uint64_t>>& all) {
  const auto& n = t.nodes()[idx];
  std::vector<std::uint64_t> c(classes, 0);
  if (n.is_leaf()) {
    for (std::size_t k = 0; k < classes; ++k) c[k] = n.counts[k];
  } else {
    const auto l = node_counts(t, n.left, classes, all);
    const auto r = node_counts(t, n.right, classes, all);
    for (std::size_t k = 0; k < classes; ++k) c[k] = l[k] + r[k];
  }
  all[idx] = c;
  return c;
}

double gini(const std::vector<std::uint64_t>& c) {
  const double n = static_cast<double>(std::accumulate(c.begin(), c.end(), std::uint64_t{0}));
  double g = 1;
  for (auto k : c) g -= (k / n) * (k / n);
  return g;
}

}  // namespace

TEST_CASE("TrainConfig defaults and validation") {
  const TrainConfig c;
  CHECK(c.n_trees == 1000);
  CHECK(c.min_node_size == 1);
  CHECK(c.bootstrap);
  CHECK(c.effective_mtry(955) == 30);
  CHECK(c.effective_mtry(3) == 1);
  TrainConfig bad;
  bad.mtry = 5;
  CHECK_THROWS_AS(bad.validate(4), InvalidArgument);
  bad = {};
  bad.n_trees = 0;
  CHECK_THROWS_AS(bad.validate(4), InvalidArgument);
}

TEST_CASE("train: separable data") {
  const auto m = separable(20, 4, 1);
  auto cfg = small(200);
  cfg.mtry = 4;
  const auto model = train(m, cfg);
  for (std::size_t i = 0; i < m.rows(); ++i) CHECK(model.predict(m.row(i)).label == m.labels()[i]);
  CHECK(model.importance()[0] > 0.9);
  const auto ranked = ranked_importance(model, m.keys());
  CHECK(ranked.front().first == m.keys()[0]);
  double total = 0;
  for (const auto& [k, v] : ranked) total += v;
  CHECK(std::abs(total - 1.0) < 1e-9);
}

TEST_CASE("train: default mtry on data separable with a margin") {
  const auto m = separable(30, 10, 2);
  const auto model = train(m, small(100));
  std::size_t errors = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) errors += model.predict(m.row(i)).label != m.labels()[i];
  CHECK(errors == 0);
  CHECK(ranked_importance(model, m.keys()).front().first == m.keys()[0]);
}

TEST_CASE("train: constant features get zero importance") {
  std::vector<double> values;
  std::vector<std::string> ids, labels;
  for (int i = 0; i < 20; ++i) {
    ids.push_back("d" + std::to_string(i));
    labels.push_back(i < 10 ? "X" : "Y");
    values.insert(values.end(), {0.25, i < 10 ? 0.1 + 0.01 * i : 0.6 + 0.01 * i, 0.75});
  }
  const FeatureMatrix m(keys_for(3), ids, labels, values);
  const auto model = train(m, small(50));
  CHECK(model.importance()[0] == 0.0);
  CHECK(model.importance()[2] == 0.0);
  CHECK(model.importance()[1] == doctest::Approx(1.0));
  const auto ranked = ranked_importance(model, m.keys());
  CHECK(ranked[0].first == m.keys()[1]);
  CHECK(ranked[1].first == m.keys()[0]);  // tie keeps key order
  CHECK_THROWS_AS(ranked_importance(model, keys_for(2)), InvalidArgument);
}

TEST_CASE("train: precondition errors") {
  const FeatureMatrix one_class(keys_for(1), {"a", "b"}, {"X", "X"}, {0.0, 1.0});
  CHECK_THROWS_AS(train(one_class, small(5)), DegenerateInput);
  const FeatureMatrix empty(keys_for(1), {}, {}, {});
  CHECK_THROWS_AS(train(empty, small(5)), InvalidArgument);
}

TEST_CASE("train: determinism across runs and thread counts") {
  const auto m = separable(15, 6, 9);
  auto cfg = small(64, 11);
  const auto a = train(m, cfg);
  const auto b = train(m, cfg);
  cfg.threads = 4;
  const auto c = train(m, cfg);
  CHECK(a.serialize() == b.serialize());
  CHECK(a.serialize() == c.serialize());
  cfg.seed = 12;
  CHECK(train(m, cfg).serialize() != a.serialize());
}

TEST_CASE("predict") {
  const auto m = separable(10, 3, 4);
  SUBCASE("single tree forest follows the tree") {
    const auto model = train(m, small(1));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto p = model.predict(m.row(i));
      CHECK(p.class_index == model.trees()[0].predict(m.row(i)));
      CHECK(p.votes[p.class_index] == 1.0);
    }
  }
  SUBCASE("vote fractions sum to one") {
    const auto model = train(m, small(1000));
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto v = model.predict(m.row(i)).votes;
      CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) < 1e-12);
    }
  }
  SUBCASE("length mismatch") {
    const auto model = train(m, small(3));
    CHECK_THROWS_AS(model.predict(std::vector<double>{1.0}), InvalidArgument);
  }
  SUBCASE("forest ties go to the smallest label") {
    TreeNode a, b;
    a.counts = {1, 0};
    b.counts = {0, 1};
    const RandomForestModel model({"A", "B"}, 1, {DecisionTree({a}), DecisionTree({b})}, {0.0}, {});
    CHECK(model.predict(std::vector<double>{0.0}).label == "A");
    TreeNode tie;
    tie.counts = {2, 2};
    const RandomForestModel leaf_tie({"A", "B"}, 1, {DecisionTree({tie})}, {0.0}, {});
    CHECK(leaf_tie.predict(std::vector<double>{0.0}).label == "A");
  }
}

TEST_CASE("monotone transform of a column leaves the forest's structure unchanged") {
  const auto m = separable(12, 4, 21);
  std::vector<double> values = m.values();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double& v = values[i * m.cols() + 2];
    v = std::exp(3 * v) + v * v * v;
  }
  const FeatureMatrix t(m.keys(), m.doc_ids(), m.labels(), values);
  const auto a = train(m, small(40, 5));
  const auto b = train(t, small(40, 5));
  for (std::size_t k = 0; k < a.trees().size(); ++k) {
    const auto& na = a.trees()[k].nodes();
    const auto& nb = b.trees()[k].nodes();
    REQUIRE(na.size() == nb.size());
    for (std::size_t j = 0; j < na.size(); ++j) {
      CHECK(na[j].feature == nb[j].feature);
      CHECK(na[j].counts == nb[j].counts);
      CHECK(na[j].left == nb[j].left);
    }
  }
  for (std::size_t i = 0; i < m.rows(); ++i) CHECK(a.predict(m.row(i)).label == b.predict(t.row(i)).label);
  CHECK(a.importance() == b.importance());
}

TEST_CASE("splits never increase impurity") {
  const auto m = separable(25, 5, 8);
  std::vector<double> noisy = m.values();
  Rng rng(1);
  for (std::size_t i = 0; i < m.rows(); ++i) noisy[i * m.cols()] = rng.uniform();  // destroy the clean split
  const FeatureMatrix hard(m.keys(), m.doc_ids(), m.labels(), noisy);
  const auto model = train(hard, small(30));
  for (const auto& tree : model.trees()) {
    std::vector<std::vector<std::uint64_t>> counts(tree.nodes().size());
    node_counts(tree, 0, 2, counts);
    for (std::size_t j = 0; j < tree.nodes().size(); ++j) {
      const auto& n = tree.nodes()[j];
      if (n.is_leaf()) continue;
      const auto& l = counts[n.left];
      const auto& r = counts[n.right];
      const double nl = static_cast<double>(l[0] + l[1]), nr = static_cast<double>(r[0] + r[1]);
      CHECK((nl * gini(l) + nr * gini(r)) / (nl + nr) < gini(counts[j]));
    }
  }
}

TEST_CASE("model persistence round trip") {
  const auto m = separable(8, 3, 13);
  const auto model = train(m, small(10));
  const auto text = model.serialize();
  CHECK(text.rfind("stylo-random-forest v1\n", 0) == 0);
  const auto back = RandomForestModel::deserialize(text);
  CHECK(back.serialize() == text);
  CHECK(back.classes() == model.classes());
  for (std::size_t i = 0; i < m.rows(); ++i) CHECK(back.predict(m.row(i)).votes == model.predict(m.row(i)).votes);
  CHECK_THROWS_AS(RandomForestModel::deserialize("garbage\n"), ParseError);
  CHECK_THROWS_AS(RandomForestModel::deserialize(text.substr(0, text.size() / 2)), ParseError);
}
