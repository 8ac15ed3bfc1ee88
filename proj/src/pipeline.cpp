#include "stylo/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "stylo/csv.hpp"
#include "stylo/distance.hpp"
#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/forest.hpp"
#include "stylo/io.hpp"
#include "stylo/mds.hpp"
#include "stylo/random.hpp"

namespace stylo {

namespace fs = std::filesystem;

namespace {

// Collects outputs and deletes them unless commit() is reached.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

  fs::path write(const std::string& name, std::string_view content) {
    auto path = dir_ / name;
    written_.push_back(path);
    io::write_file(path, content);
    return path;
  }
  void track(fs::path path) { written_.push_back(std::move(path)); }
  const fs::path& dir() const noexcept { return dir_; }

  std::vector<fs::path> commit() {
    committed_ = true;
    return written_;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::string with_context(FeatureSet set, std::string_view stage, const std::exception& e) {
  return fmt::format("[{} {}] {}", feature_set_name(set), stage, e.what());
}

template <class Fn>
void for_each_set(const RunConfig& config, std::string_view stage, Fn&& fn) {
  for (auto set : config.feature_sets) {
    try {
      fn(set);
    } catch (const ParseError&) {
      throw;
    } catch (const DegenerateInput& e) {
      throw DegenerateInput(with_context(set, stage, e));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(with_context(set, stage, e));
    }
  }
}

TrainConfig train_config(const RunConfig& config) {
  TrainConfig t;
  t.n_trees = config.n_trees;
  t.seed = config.seed;
  t.threads = config.threads;
  return t;
}

std::string importance_csv(const RandomForestModel& model, const FeatureMatrix& m, std::size_t top) {
  const auto ranked = ranked_importance(model, m.keys());
  std::ostringstream out;
  csv::write_row(out, {"rank", "key", "importance"});
  for (std::size_t i = 0; i < ranked.size() && i < top; ++i) {
    csv::write_row(out, {std::to_string(i + 1), ranked[i].first.serialize(),
                         csv::format_double(ranked[i].second)});
  }
  return out.str();
}

}  // namespace

fs::path corpus_dir(const fs::path& out_dir) { return out_dir / "corpus"; }
fs::path sampled_dir(const fs::path& out_dir) { return out_dir / "sampled"; }

std::map<std::string, LabelSummary> summarize(const Corpus& corpus) {
  std::map<std::string, LabelSummary> out;
  for (const auto& d : corpus.documents()) {
    auto& s = out[d.label];
    const auto chars = d.char_count();
    s.min_chars = s.documents ? std::min(s.min_chars, chars) : chars;
    s.max_chars = std::max(s.max_chars, chars);
    s.total_chars += chars;
    s.sentences += d.sentences.size();
    ++s.documents;
  }
  return out;
}

Corpus ingest(const fs::path& manifest, const fs::path& out_dir) {
  Corpus corpus = load_manifest(manifest);
  save_archive(corpus, corpus_dir(out_dir));
  return corpus;
}

Corpus prepare_corpus(const RunConfig& config) {
  const auto dir = corpus_dir(config.out_dir);
  if (!fs::exists(dir / "index.csv")) {
    throw IoError("no ingested corpus at " + dir.string() + " (run `ingest` first)");
  }
  Corpus corpus = load_archive(dir);
  if (config.target_chars == 0) return corpus;
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    docs.push_back(
        sample_to_length(corpus.documents()[i], config.target_chars, derive_seed(config.seed, i)));
  }
  return Corpus(std::move(docs));
}

std::string artifact_stem(std::string_view mode, FeatureSet set, std::uint64_t seed) {
  return fmt::format("{}_{}_seed{}", mode, feature_set_name(set), seed);
}

std::vector<fs::path> write_sampled(const RunConfig& config) {
  const Corpus corpus = prepare_corpus(config);
  const auto dir = sampled_dir(config.out_dir);
  save_archive(corpus, dir);
  return {dir / "index.csv"};
}

std::vector<fs::path> write_features(const RunConfig& config) {
  const Corpus corpus = prepare_corpus(config);
  OutputSet out(config.out_dir);
  for_each_set(config, "features", [&](FeatureSet set) {
    const auto m = build_matrix(corpus, set, config.features);
    out.write(artifact_stem("features", set, config.seed) + ".csv", m.to_csv());
  });
  return out.commit();
}

std::vector<fs::path> write_distances(const RunConfig& config) {
  const Corpus corpus = prepare_corpus(config);
  OutputSet out(config.out_dir);
  for_each_set(config, "dist", [&](FeatureSet set) {
    const auto d = distance_matrix(build_matrix(corpus, set, config.features));
    out.write(artifact_stem("dist", set, config.seed) + ".csv", d.to_csv());
  });
  return out.commit();
}

std::vector<fs::path> run_pipeline(const RunConfig& config, PipelineMode mode) {
  Corpus corpus = prepare_corpus(config);
  OutputSet out(config.out_dir);
  if (mode == PipelineMode::Mds) {
    for_each_set(config, "mds", [&](FeatureSet set) {
      const auto stem = artifact_stem("mds", set, config.seed);
      const auto d = distance_matrix(build_matrix(corpus, set, config.features));
      out.write(stem + "_dist.csv", d.to_csv());
      const auto e = classical_mds(d, config.mds_dims);
      const auto svg = out.dir() / (stem + ".svg");
      out.track(svg);
      out.track(fs::path(svg).replace_extension(".csv"));
      ScatterOptions opts;
      opts.title = fmt::format("Classical MDS, d_SJS, features: {}", feature_set_name(set));
      emit_scatter(e, e.labels, svg, opts);
      std::ostringstream eig;
      csv::write_row(eig, {"index", "eigenvalue"});
      for (std::size_t i = 0; i < e.eigenvalues.size(); ++i) {
        csv::write_row(eig, {std::to_string(i + 1), csv::format_double(e.eigenvalues[i])});
      }
      out.write(stem + "_eigenvalues.csv", eig.str());
    });
    return out.commit();
  }

  if (!config.merge_labels.empty()) corpus = corpus.relabeled(config.merge_labels);
  const auto tc = train_config(config);
  for_each_set(config, "cv", [&](FeatureSet set) {
    const auto stem = artifact_stem("cv", set, config.seed);
    const auto m = build_matrix(corpus, set, config.features);
    const auto cm = loocv(m, tc);
    out.write(stem + "_confusion.csv", cm.to_csv());
    out.write(stem + "_report.txt",
              render_report(cm, fmt::format("LOOCV random forest ({} trees), features: {}",
                                             tc.n_trees, feature_set_name(set))));
    out.write(stem + "_metrics.csv", metrics_csv(metrics(cm)));
    const auto k = std::min(config.folds, m.rows());
    out.write(stem + "_kfold.csv", cv_summary_csv(kfold(m, k, tc)));
    out.write(stem + "_importance.csv", importance_csv(train(m, tc), m, config.top_importance));
  });
  return out.commit();
}

}  // namespace stylo
