#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text) noexcept;

// One line of morphological-tagger output.
struct TaggedToken {
  std::string surface;
  // The raw comma-separated feature fields, kept verbatim for re-serialization.
  std::vector<std::string> features;
  // Leading non-"*" feature fields, at most four, coarse to fine.
  std::vector<std::string> pos_path;
  std::optional<std::string> base_form;

  // Builds a token from a surface and its raw feature fields. Throws InvalidArgument
  // if the invariants (non-empty surface, at least one POS level) do not hold.
  static TaggedToken from_features(std::string surface, std::vector<std::string> features);

  const std::string& pos(std::size_t level) const;  // level 0 = coarsest
  std::string pos_prefix(std::size_t depth, std::string_view sep = "-") const;
};

class Sentence {
 public:
  explicit Sentence(std::vector<TaggedToken> tokens);

  const std::vector<TaggedToken>& tokens() const noexcept { return tokens_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t char_count() const noexcept { return char_count_; }

 private:
  std::vector<TaggedToken> tokens_;
  std::size_t char_count_ = 0;
};

struct Document {
  std::string id;
  std::string label;
  std::vector<Sentence> sentences;

  std::size_t char_count() const noexcept;
  std::size_t token_count() const noexcept;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws InvalidArgument on duplicate ids or empty labels.
  explicit Corpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::set<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }

  // Returns a copy with labels rewritten through the mapping; unmapped labels are kept.
  Corpus relabeled(const std::map<std::string, std::string>& mapping) const;

 private:
  std::vector<Document> documents_;
  std::set<std::string> labels_;
};

// Parses `SURFACE<TAB>F1,F2,...` lines; `EOS` closes a sentence, blank lines are skipped.
// Throws ParseError with the 1-based line number on a malformed line.
Document parse_tagged(std::string_view content, std::string id, std::string label);

// Inverse of parse_tagged for well-formed input.
std::string serialize_tagged(const Document& doc);

// Picks sentences uniformly without replacement until the picked characters first
// reach target_chars, then returns them in document order.
Document sample_to_length(const Document& doc, std::size_t target_chars, std::uint64_t seed);

struct ManifestEntry {
  std::filesystem::path path;
  std::string id;
  std::string label;
};

// CSV with header `path,id,label`. Relative paths resolve against base_dir.
std::vector<ManifestEntry> parse_manifest(std::string_view content,
                                          const std::filesystem::path& base_dir);

Corpus load_manifest(const std::filesystem::path& manifest_path);

// Archive layout: <dir>/index.csv (`id,label,file`) and <dir>/docs/<n>.tagged.
void save_archive(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_archive(const std::filesystem::path& dir);

}  // namespace stylo
