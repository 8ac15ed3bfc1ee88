#include "stylo/eval.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"
#include "stylo/random.hpp"

namespace stylo {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)),
      counts_(classes_.size(), std::vector<std::uint64_t>(classes_.size(), 0)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : classes_(std::move(classes)), counts_(std::move(counts)) {
  if (counts_.size() != classes_.size()) throw InvalidArgument("confusion matrix must be square");
  for (const auto& r : counts_) {
    if (r.size() != classes_.size()) throw InvalidArgument("confusion matrix must be square");
  }
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& r : counts_) t = std::accumulate(r.begin(), r.end(), t);
  return t;
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw InvalidArgument("unknown class '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::string_view truth, std::string_view predicted) {
  ++counts_[index_of(truth)][index_of(predicted)];
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  csv::Row header{"true_class"};
  header.insert(header.end(), classes_.begin(), classes_.end());
  csv::write_row(out, header);
  for (std::size_t t = 0; t < classes_.size(); ++t) {
    csv::Row row{classes_[t]};
    for (auto c : counts_[t]) row.push_back(std::to_string(c));
    csv::write_row(out, row);
  }
  return out.str();
}

ConfusionMatrix ConfusionMatrix::from_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "true_class") {
    throw ParseError("confusion CSV must start with 'true_class'", 1);
  }
  std::vector<std::string> classes(rows[0].begin() + 1, rows[0].end());
  if (rows.size() != classes.size() + 1) throw ParseError("confusion CSV is not square", 0);
  std::vector<std::vector<std::uint64_t>> counts;
  for (std::size_t t = 0; t < classes.size(); ++t) {
    const auto& r = rows[t + 1];
    if (r.size() != classes.size() + 1 || r[0] != classes[t]) {
      throw ParseError("confusion CSV row does not match header", t + 2);
    }
    std::vector<std::uint64_t> line;
    for (std::size_t c = 1; c < r.size(); ++c) {
      try {
        line.push_back(std::stoull(r[c]));
      } catch (const std::exception&) {
        throw ParseError("bad count '" + r[c] + "'", t + 2);
      }
    }
    counts.push_back(std::move(line));
  }
  return ConfusionMatrix(std::move(classes), std::move(counts));
}

Metrics metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw InvalidArgument("confusion matrix is empty");
  const std::size_t k = cm.classes().size();
  Metrics m;
  m.classes = cm.classes();
  std::uint64_t trace = 0;
  for (std::size_t c = 0; c < k; ++c) trace += cm.at(c, c);
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);
  for (std::size_t c = 0; c < k; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    ClassMetrics cls;
    const auto hit = static_cast<double>(cm.at(c, c));
    if (row) cls.recall = hit / static_cast<double>(row); else cls.degenerate = true;
    if (col) cls.precision = hit / static_cast<double>(col); else cls.degenerate = true;
    if (cls.precision + cls.recall > 0) {
      cls.f1 = 2 * cls.precision * cls.recall / (cls.precision + cls.recall);
    } else {
      cls.degenerate = true;
    }
    m.per_class.push_back(cls);
  }
  return m;
}

CvSummary summarize_folds(std::vector<double> fold_accuracies) {
  CvSummary s;
  s.fold_accuracies = std::move(fold_accuracies);
  const auto n = s.fold_accuracies.size();
  if (n == 0) return s;
  s.mean = std::accumulate(s.fold_accuracies.begin(), s.fold_accuracies.end(), 0.0) /
           static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double a : s.fold_accuracies) ss += (a - s.mean) * (a - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

namespace {

std::vector<std::string> sorted_labels(const FeatureMatrix& m) {
  std::vector<std::string> labels = m.labels();
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace

ConfusionMatrix loocv(const FeatureMatrix& m, const TrainConfig& config) {
  const std::size_t n = m.rows();
  if (n < 2) throw InvalidArgument("LOOCV needs at least 2 documents");
  ConfusionMatrix cm(sorted_labels(m));
  if (cm.classes().size() < 2) throw DegenerateInput("LOOCV needs at least 2 classes");
  std::vector<std::size_t> train_rows;
  train_rows.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    train_rows.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) train_rows.push_back(j);
    }
    TrainConfig fold = config;
    fold.seed = derive_seed(config.seed, i);
    RandomForestModel model;
    try {
      model = train(m, fold, train_rows);
    } catch (const DegenerateInput& e) {
      throw DegenerateInput(fmt::format("LOOCV fold {} (held out '{}'): {}", i, m.doc_ids()[i], e.what()));
    }
    cm.add(m.labels()[i], model.predict(m.row(i)).label);
  }
  return cm;
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n) {
    throw InvalidArgument(fmt::format("fold count must satisfy 2 <= k <= n (k={}, n={})", k, n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

CvSummary kfold(const FeatureMatrix& m, std::size_t k, const TrainConfig& config) {
  const auto folds = kfold_partition(m.rows(), k, config.seed);
  std::vector<double> accuracies;
  std::vector<std::size_t> train_rows;
  for (std::size_t f = 0; f < k; ++f) {
    train_rows.clear();
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_rows.insert(train_rows.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    TrainConfig fold = config;
    fold.seed = derive_seed(config.seed, f);
    RandomForestModel model;
    try {
      model = train(m, fold, train_rows);
    } catch (const DegenerateInput& e) {
      throw DegenerateInput(fmt::format("fold {}: {}", f, e.what()));
    }
    std::size_t correct = 0;
    for (auto i : folds[f]) {
      if (model.predict(m.row(i)).label == m.labels()[i]) ++correct;
    }
    accuracies.push_back(static_cast<double>(correct) / static_cast<double>(folds[f].size()));
  }
  return summarize_folds(std::move(accuracies));
}

std::string format_percent(double fraction) {
  const double tenths = std::round(fraction * 1000.0 + std::copysign(1e-9, fraction));
  return fmt::format("{:.1f}%", tenths / 10.0);
}

std::string render_report(const ConfusionMatrix& cm, std::string_view title) {
  const auto m = metrics(cm);
  std::size_t label_w = std::string_view("Classified class").size();
  std::size_t col_w = 8;
  for (const auto& c : cm.classes()) {
    label_w = std::max(label_w, c.size());
    col_w = std::max(col_w, c.size() + 2);
  }
  std::string out;
  if (!title.empty()) out += fmt::format("{}\n", title);
  out += fmt::format("{:<{}}  {}\n", "True class", label_w, "Classified class");
  out += fmt::format("{:<{}}", "", label_w);
  for (const auto& c : cm.classes()) out += fmt::format("  {:>{}}", c, col_w);
  out += '\n';
  for (std::size_t t = 0; t < cm.classes().size(); ++t) {
    out += fmt::format("{:<{}}", cm.classes()[t], label_w);
    for (auto c : cm.counts()[t]) out += fmt::format("  {:>{}}", c, col_w);
    out += '\n';
  }
  out += fmt::format("{:<{}}  {:>{}}\n", "Accuracy", label_w, format_percent(m.accuracy), col_w);
  auto line = [&](std::string_view name, auto field) {
    out += fmt::format("{:<{}}", name, label_w);
    for (const auto& c : m.per_class) out += fmt::format("  {:>{}}", format_percent(c.*field), col_w);
    out += '\n';
  };
  line("Recall", &ClassMetrics::recall);
  line("Precision", &ClassMetrics::precision);
  line("F1 score", &ClassMetrics::f1);
  return out;
}

std::string metrics_csv(const Metrics& m) {
  std::ostringstream out;
  csv::Row header{"measure"};
  header.insert(header.end(), m.classes.begin(), m.classes.end());
  csv::write_row(out, header);
  csv::Row acc{"accuracy", format_percent(m.accuracy)};
  acc.resize(header.size());
  csv::write_row(out, acc);
  auto row = [&](const char* name, double ClassMetrics::*field) {
    csv::Row r{name};
    for (const auto& c : m.per_class) r.push_back(format_percent(c.*field));
    csv::write_row(out, r);
  };
  row("recall", &ClassMetrics::recall);
  row("precision", &ClassMetrics::precision);
  row("f1", &ClassMetrics::f1);
  return out.str();
}

std::string cv_summary_csv(const CvSummary& s) {
  std::ostringstream out;
  csv::write_row(out, {"fold", "accuracy"});
  for (std::size_t i = 0; i < s.fold_accuracies.size(); ++i) {
    csv::write_row(out, {std::to_string(i + 1), csv::format_double(s.fold_accuracies[i])});
  }
  csv::write_row(out, {"mean", csv::format_double(s.mean)});
  csv::write_row(out, {"sd", csv::format_double(s.sd)});
  return out.str();
}

}  // namespace stylo
