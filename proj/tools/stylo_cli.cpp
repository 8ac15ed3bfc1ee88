// Command-line front end: ingest -> sample -> features -> dist/mds and cv -> report.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"
#include "stylo/eval.hpp"
#include "stylo/io.hpp"
#include "stylo/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string manifest;
  std::vector<std::string> features{"sweep"};
  std::string mode = "mds";
  std::vector<std::string> merge;
  std::vector<std::string> comma_surfaces;
  std::vector<std::string> function_pos;
  std::vector<std::string> particle_tags;
  stylo::RunConfig run;
};

std::vector<stylo::FeatureSet> parse_sets(const std::vector<std::string>& names) {
  std::vector<stylo::FeatureSet> sets;
  for (const auto& n : names) {
    if (n == "sweep") {
      for (auto s : stylo::kAllFeatureSets) sets.push_back(s);
    } else {
      sets.push_back(stylo::parse_feature_set(n));
    }
  }
  std::vector<stylo::FeatureSet> unique;
  for (auto s : sets) {
    if (std::find(unique.begin(), unique.end(), s) == unique.end()) unique.push_back(s);
  }
  return unique;
}

stylo::RunConfig resolve(const Options& o) {
  auto cfg = o.run;
  cfg.feature_sets = parse_sets(o.features);
  if (!o.comma_surfaces.empty()) cfg.features.tags.comma_surfaces = {o.comma_surfaces.begin(), o.comma_surfaces.end()};
  if (!o.function_pos.empty()) cfg.features.tags.function_pos = {o.function_pos.begin(), o.function_pos.end()};
  if (!o.particle_tags.empty()) cfg.features.tags.particle_tags = {o.particle_tags.begin(), o.particle_tags.end()};
  for (const auto& m : o.merge) {
    const auto eq = m.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == m.size()) {
      throw stylo::InvalidArgument("--merge expects FROM=TO, got '" + m + "'");
    }
    cfg.merge_labels[m.substr(0, eq)] = m.substr(eq + 1);
  }
  return cfg;
}

void print_written(const std::vector<fs::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

void print_summary(const stylo::Corpus& corpus) {
  std::cout << fmt::format("{} documents, {} labels\n", corpus.size(), corpus.labels().size());
  std::cout << fmt::format("{:<16} {:>6} {:>10} {:>10} {:>10} {:>10}\n", "label", "docs", "sentences",
                           "min chars", "mean chars", "max chars");
  for (const auto& [label, s] : stylo::summarize(corpus)) {
    std::cout << fmt::format("{:<16} {:>6} {:>10} {:>10} {:>10.1f} {:>10}\n", label, s.documents,
                             s.sentences, s.min_chars,
                             static_cast<double>(s.total_chars) / static_cast<double>(s.documents),
                             s.max_chars);
  }
}

void report(const stylo::RunConfig& cfg) {
  std::vector<fs::path> confusions;
  if (fs::is_directory(cfg.out_dir)) {
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
      const auto name = entry.path().filename().string();
      if (name.starts_with("cv_") && name.ends_with("_confusion.csv")) confusions.push_back(entry.path());
    }
  }
  if (confusions.empty()) throw stylo::IoError("no cv results in " + cfg.out_dir.string() + " (run `cv` first)");
  std::sort(confusions.begin(), confusions.end());
  for (const auto& path : confusions) {
    const auto name = path.filename().string();
    const auto stem = name.substr(0, name.size() - std::string_view("_confusion.csv").size());
    const auto cm = stylo::ConfusionMatrix::from_csv(stylo::io::read_file(path));
    std::cout << stylo::render_report(cm, stem);
    const auto kfold_path = cfg.out_dir / (stem + "_kfold.csv");
    if (fs::exists(kfold_path)) {
      double mean = 0, sd = 0;
      for (const auto& row : stylo::csv::parse(stylo::io::read_file(kfold_path))) {
        if (row.size() == 2 && row[0] == "mean") mean = std::stod(row[1]);
        if (row.size() == 2 && row[0] == "sd") sd = std::stod(row[1]);
      }
      std::cout << fmt::format("k-fold mean accuracy {} (SD = {})\n", stylo::format_percent(mean),
                               stylo::format_percent(sd));
    }
    const auto imp_path = cfg.out_dir / (stem + "_importance.csv");
    if (fs::exists(imp_path)) {
      const auto rows = stylo::csv::parse(stylo::io::read_file(imp_path));
      std::cout << "top variables by importance:\n";
      for (std::size_t i = 1; i < rows.size() && i <= 5; ++i) {
        if (rows[i].size() == 3) std::cout << fmt::format("  {:>2}. {}  {}\n", rows[i][0], rows[i][1], rows[i][2]);
      }
    }
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stylometric analysis of tagged Japanese text: d_SJS distances, classical MDS, "
               "random-forest cross-validation"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "Flat key=value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  auto& r = o.run;
  std::string out_dir = r.out_dir.string();
  app.add_option("--manifest", o.manifest, "CSV manifest with columns path,id,label (ingest)");
  app.add_option("--out", out_dir, "Output directory (holds corpus/ and all artifacts)");
  app.add_option("--features", o.features,
                 "Feature configurations: pos2, particle2, comma, function, all (combined), or sweep "
                 "(all five)")
      ->check(CLI::IsMember({"pos2", "particle2", "comma", "function", "all", "sweep"}))
      ->delimiter(',');
  app.add_option("--tag-depth", r.features.tag_depth, "POS levels used in POS bigrams")
      ->check(CLI::Range(1, 4));
  app.add_option("--target-chars", r.target_chars, "Sample each document to this many characters (0 = whole document)");
  app.add_option("--seed", r.seed, "Seed for sampling, forests and fold assignment");
  app.add_option("--trees", r.n_trees, "Trees per random forest")->check(CLI::PositiveNumber);
  app.add_option("--folds", r.folds, "k for the k-fold reference run")->check(CLI::Range(2, 1 << 20));
  app.add_option("--mode", o.mode, "Pipeline mode for `run`")->check(CLI::IsMember({"mds", "cv"}));
  app.add_option("--dims", r.mds_dims, "MDS dimensions")->check(CLI::Range(2, 1 << 20));
  app.add_option("--top", r.top_importance, "Variables listed in the importance output");
  app.add_option("--threads", r.threads, "Worker threads for forest training (0 = all cores)");
  app.add_option("--merge", o.merge, "Relabel before classification, FROM=TO (repeatable)")->delimiter(',');
  app.add_option("--comma-surfaces", o.comma_surfaces, "Comma surfaces (default 、 , ，)")->delimiter(' ');
  app.add_option("--function-pos", o.function_pos, "Level-1 POS tags counted as function words")->delimiter(',');
  app.add_option("--particle-tags", o.particle_tags, "Level-1 POS tags treated as particles")->delimiter(',');

  auto* ingest = app.add_subcommand("ingest", "Parse tagged files listed in --manifest into <out>/corpus");
  auto* sample = app.add_subcommand("sample", "Write the sampled corpus to <out>/sampled");
  auto* features = app.add_subcommand("features", "Write feature matrices (CSV)");
  auto* dist = app.add_subcommand("dist", "Write d_SJS distance matrices (CSV)");
  auto* mds = app.add_subcommand("mds", "Distances, classical MDS coordinates and SVG scatter plots");
  auto* cv = app.add_subcommand("cv", "LOOCV confusion matrices, metrics, k-fold summary, importance");
  auto* rep = app.add_subcommand("report", "Print the cv results found in --out as tables");
  auto* run = app.add_subcommand("run", "Run the pipeline in --mode");

  CLI11_PARSE(app, argc, argv);

  try {
    r.out_dir = out_dir;
    const auto cfg = resolve(o);
    if (ingest->parsed()) {
      if (o.manifest.empty()) throw stylo::InvalidArgument("ingest needs --manifest");
      const auto corpus = stylo::ingest(o.manifest, cfg.out_dir);
      print_summary(corpus);
      std::cout << "archive: " << stylo::corpus_dir(cfg.out_dir).string() << '\n';
    } else if (sample->parsed()) {
      print_written(stylo::write_sampled(cfg));
      print_summary(stylo::load_archive(stylo::sampled_dir(cfg.out_dir)));
    } else if (features->parsed()) {
      print_written(stylo::write_features(cfg));
    } else if (dist->parsed()) {
      print_written(stylo::write_distances(cfg));
    } else if (mds->parsed()) {
      print_written(stylo::run_pipeline(cfg, stylo::PipelineMode::Mds));
    } else if (cv->parsed()) {
      print_written(stylo::run_pipeline(cfg, stylo::PipelineMode::Cv));
    } else if (run->parsed()) {
      const auto mode = o.mode == "cv" ? stylo::PipelineMode::Cv : stylo::PipelineMode::Mds;
      print_written(stylo::run_pipeline(cfg, mode));
    } else if (rep->parsed()) {
      report(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
