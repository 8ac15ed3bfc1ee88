#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/corpus.hpp"

namespace stylo {

enum class FeatureFamily : std::uint8_t {
  PosBigram,
  ParticleBigram,
  CommaPosition,
  FunctionWord,
};

std::string_view family_name(FeatureFamily f) noexcept;  // e.g. "POS_BIGRAM"
FeatureFamily parse_family_name(std::string_view name);

struct FeatureKey {
  FeatureFamily family{};
  std::vector<std::string> parts;

  // Validates the part count for the family and that no part is empty.
  static FeatureKey make(FeatureFamily family, std::vector<std::string> parts);

  // `FAMILY|part1|part2`
  std::string serialize() const;
  static FeatureKey parse(std::string_view text);

  auto operator<=>(const FeatureKey&) const = default;
};

// Reserved components.
inline constexpr std::string_view kSentenceStart = "^";     // comma with no preceding token
inline constexpr std::string_view kNonFunctionWords = "*";  // residual mass of function-word rates

// Raw event counts for one document. `denominators` holds, per family present, the
// normaliser used to turn counts into relative frequencies. For every family except
// FUNCTION_WORD it equals the family's count sum; for FUNCTION_WORD it is the
// document's token count, so the frequencies are rates over the whole text.
struct FeatureVector {
  std::string doc_id;
  std::map<FeatureKey, std::uint64_t> counts;
  std::map<FeatureFamily, std::uint64_t> denominators;

  std::uint64_t total() const noexcept;
  std::uint64_t family_total(FeatureFamily f) const noexcept;
};

struct TagSet {
  std::set<std::string> particle_tags{"助詞", "particle"};
  std::set<std::string> comma_surfaces{"、", ",", "，"};
  std::set<std::string> function_pos{"助詞",     "助動詞",   "接続詞", "副詞",
                                     "接頭詞",   "接頭辞",   "particle", "auxiliary verb",
                                     "conjunction", "adverb", "prefix"};
};

// Adjacent POS pairs within each sentence; components are the POS path cut to tag_depth
// levels and joined with "-".
FeatureVector pos_bigrams(const Document& doc, std::size_t tag_depth);

// Pairs of consecutive particles within a sentence, skipping intervening non-particles.
// Components are "subtype:surface".
FeatureVector particle_bigrams(const Document& doc,
                               const std::set<std::string>& particle_tags = TagSet{}.particle_tags);

// Surface of the token right before each comma ("^" at sentence start).
FeatureVector comma_positions(const Document& doc,
                              const std::set<std::string>& comma_surfaces = TagSet{}.comma_surfaces);

// "surface/tag" counts of function-word tokens over all tokens.
FeatureVector function_word_rates(const Document& doc,
                                  const std::set<std::string>& function_pos = TagSet{}.function_pos);

// Merges vectors of distinct families for the same document. Throws InvalidArgument on a
// repeated family or mismatched doc ids.
FeatureVector combine(std::span<const FeatureVector> parts);

enum class FeatureSet : std::uint8_t { PosBigram, ParticleBigram, CommaPosition, FunctionWord, All };

std::string_view feature_set_name(FeatureSet s) noexcept;  // pos2, particle2, comma, function, all
FeatureSet parse_feature_set(std::string_view name);
std::vector<FeatureFamily> families_of(FeatureSet s);
inline constexpr FeatureSet kAllFeatureSets[] = {FeatureSet::PosBigram, FeatureSet::ParticleBigram,
                                                 FeatureSet::CommaPosition, FeatureSet::FunctionWord,
                                                 FeatureSet::All};

struct FeatureOptions {
  std::size_t tag_depth = 2;
  TagSet tags;
};

FeatureVector extract(const Document& doc, FeatureSet set, const FeatureOptions& options = {});

// Corpus-wide relative frequencies, one row per document over the sorted key union.
//
// Each family block is divided by its denominator. When several families are combined
// every non-empty block is further scaled by 1/(number of non-empty blocks in the row),
// so rows stay probability vectors while each block keeps its internal proportions.
// A row with no events at all is left zero and flagged degenerate.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<FeatureKey> keys, std::vector<std::string> doc_ids,
                std::vector<std::string> labels, std::vector<double> values);

  std::size_t rows() const noexcept { return doc_ids_.size(); }
  std::size_t cols() const noexcept { return keys_.size(); }
  std::span<const double> row(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }

  const std::vector<FeatureKey>& keys() const noexcept { return keys_; }
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  bool degenerate(std::size_t i) const;

  // Rows subset in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> indexes) const;

  // Header `doc_id,label,<serialized keys>`; one line per document.
  std::string to_csv() const;

 private:
  std::vector<FeatureKey> keys_;
  std::vector<std::string> doc_ids_;
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

FeatureMatrix build_matrix(std::span<const FeatureVector> vectors,
                           std::span<const std::string> labels,
                           std::span<const FeatureFamily> families);

FeatureMatrix build_matrix(const Corpus& corpus, FeatureSet set, const FeatureOptions& options = {});

}  // namespace stylo
