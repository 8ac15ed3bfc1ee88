#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stylo/corpus.hpp"
#include "stylo/features.hpp"

namespace stylo {

struct RunConfig {
  std::filesystem::path out_dir = "out";
  std::vector<FeatureSet> feature_sets{std::begin(kAllFeatureSets), std::end(kAllFeatureSets)};
  FeatureOptions features;
  std::size_t target_chars = 1000;  // 0 keeps whole documents
  std::uint64_t seed = 1;
  std::size_t n_trees = 1000;
  std::size_t folds = 10;
  std::size_t mds_dims = 2;
  std::size_t top_importance = 20;
  std::size_t threads = 1;
  // Applied before classification only, e.g. {GPT35 -> GPT, GPT4 -> GPT}.
  std::map<std::string, std::string> merge_labels;
};

enum class PipelineMode { Mds, Cv };

std::filesystem::path corpus_dir(const std::filesystem::path& out_dir);
std::filesystem::path sampled_dir(const std::filesystem::path& out_dir);

struct LabelSummary {
  std::size_t documents = 0;
  std::size_t sentences = 0;
  std::size_t min_chars = 0;
  std::size_t max_chars = 0;
  std::size_t total_chars = 0;
};

std::map<std::string, LabelSummary> summarize(const Corpus& corpus);

// Parses every manifest entry and stores the corpus archive under <out>/corpus.
Corpus ingest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

// Loads <out>/corpus and samples each document to target_chars (document i uses the
// seed derived from (seed, i)).
Corpus prepare_corpus(const RunConfig& config);

// "<mode>_<features>_seed<seed>"
std::string artifact_stem(std::string_view mode, FeatureSet set, std::uint64_t seed);

// Each writer returns the files it created. On failure files written by the call are
// removed before the exception propagates.
std::vector<std::filesystem::path> write_sampled(const RunConfig& config);
std::vector<std::filesystem::path> write_features(const RunConfig& config);
std::vector<std::filesystem::path> write_distances(const RunConfig& config);
std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, PipelineMode mode);

}  // namespace stylo
