#include "stylo/features.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"

namespace stylo {

namespace {

constexpr std::array<std::string_view, 4> kFamilyNames{"POS_BIGRAM", "PARTICLE_BIGRAM",
                                                       "COMMA_POSITION", "FUNCTION_WORD"};
constexpr std::array<std::string_view, 5> kSetNames{"pos2", "particle2", "comma", "function", "all"};

std::size_t expected_parts(FeatureFamily f) {
  return (f == FeatureFamily::PosBigram || f == FeatureFamily::ParticleBigram) ? 2 : 1;
}

void bump(FeatureVector& v, FeatureFamily f, std::vector<std::string> parts) {
  ++v.counts[FeatureKey::make(f, std::move(parts))];
}

}  // namespace

std::string_view family_name(FeatureFamily f) noexcept {
  return kFamilyNames[static_cast<std::size_t>(f)];
}

FeatureFamily parse_family_name(std::string_view name) {
  for (std::size_t i = 0; i < kFamilyNames.size(); ++i) {
    if (kFamilyNames[i] == name) return static_cast<FeatureFamily>(i);
  }
  throw InvalidArgument("unknown feature family '" + std::string(name) + "'");
}

FeatureKey FeatureKey::make(FeatureFamily family, std::vector<std::string> parts) {
  if (parts.size() != expected_parts(family)) {
    throw InvalidArgument(std::string(family_name(family)) + " key needs " +
                          std::to_string(expected_parts(family)) + " part(s)");
  }
  for (const auto& p : parts) {
    if (p.empty()) throw InvalidArgument("feature key component is empty");
  }
  return FeatureKey{family, std::move(parts)};
}

std::string FeatureKey::serialize() const {
  std::string out(family_name(family));
  for (const auto& p : parts) {
    out += '|';
    out += p;
  }
  return out;
}

FeatureKey FeatureKey::parse(std::string_view text) {
  const auto bar = text.find('|');
  if (bar == std::string_view::npos) throw InvalidArgument("feature key without '|'");
  const auto family = parse_family_name(text.substr(0, bar));
  std::vector<std::string> parts;
  auto rest = text.substr(bar + 1);
  if (expected_parts(family) == 1) {
    parts.emplace_back(rest);
  } else {
    // Bigram components never start a new '|' group mid-way, so split at the last one.
    const auto split = rest.rfind('|');
    if (split == std::string_view::npos) throw InvalidArgument("bigram key needs two parts");
    parts.emplace_back(rest.substr(0, split));
    parts.emplace_back(rest.substr(split + 1));
  }
  return make(family, std::move(parts));
}

std::uint64_t FeatureVector::total() const noexcept {
  std::uint64_t t = 0;
  for (const auto& [k, c] : counts) t += c;
  return t;
}

std::uint64_t FeatureVector::family_total(FeatureFamily f) const noexcept {
  std::uint64_t t = 0;
  for (const auto& [k, c] : counts) {
    if (k.family == f) t += c;
  }
  return t;
}

FeatureVector pos_bigrams(const Document& doc, std::size_t tag_depth) {
  if (tag_depth < 1 || tag_depth > 4) throw InvalidArgument("tag_depth must be in 1..4");
  FeatureVector v{doc.id, {}, {{FeatureFamily::PosBigram, 0}}};
  std::uint64_t pairs = 0;
  for (const auto& s : doc.sentences) {
    const auto& toks = s.tokens();
    for (std::size_t i = 1; i < toks.size(); ++i) {
      bump(v, FeatureFamily::PosBigram,
           {toks[i - 1].pos_prefix(tag_depth), toks[i].pos_prefix(tag_depth)});
      ++pairs;
    }
  }
  v.denominators[FeatureFamily::PosBigram] = pairs;
  return v;
}

FeatureVector particle_bigrams(const Document& doc, const std::set<std::string>& particle_tags) {
  FeatureVector v{doc.id, {}, {{FeatureFamily::ParticleBigram, 0}}};
  std::uint64_t pairs = 0;
  for (const auto& s : doc.sentences) {
    std::string previous;
    for (const auto& t : s.tokens()) {
      if (!particle_tags.contains(t.pos(0))) continue;
      const auto& subtype = t.pos_path.size() > 1 ? t.pos(1) : t.pos(0);
      std::string current = subtype + ":" + t.surface;
      if (!previous.empty()) {
        bump(v, FeatureFamily::ParticleBigram, {previous, current});
        ++pairs;
      }
      previous = std::move(current);
    }
  }
  v.denominators[FeatureFamily::ParticleBigram] = pairs;
  return v;
}

FeatureVector comma_positions(const Document& doc, const std::set<std::string>& comma_surfaces) {
  FeatureVector v{doc.id, {}, {{FeatureFamily::CommaPosition, 0}}};
  std::uint64_t commas = 0;
  for (const auto& s : doc.sentences) {
    const auto& toks = s.tokens();
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!comma_surfaces.contains(toks[i].surface)) continue;
      bump(v, FeatureFamily::CommaPosition,
           {i == 0 ? std::string(kSentenceStart) : toks[i - 1].surface});
      ++commas;
    }
  }
  v.denominators[FeatureFamily::CommaPosition] = commas;
  return v;
}

FeatureVector function_word_rates(const Document& doc, const std::set<std::string>& function_pos) {
  FeatureVector v{doc.id, {}, {{FeatureFamily::FunctionWord, doc.token_count()}}};
  for (const auto& s : doc.sentences) {
    for (const auto& t : s.tokens()) {
      if (function_pos.contains(t.pos(0))) {
        bump(v, FeatureFamily::FunctionWord, {t.surface + "/" + t.pos(0)});
      }
    }
  }
  return v;
}

FeatureVector combine(std::span<const FeatureVector> parts) {
  FeatureVector out;
  if (parts.empty()) return out;
  out.doc_id = parts.front().doc_id;
  for (const auto& p : parts) {
    if (p.doc_id != out.doc_id) {
      throw InvalidArgument("cannot combine vectors of '" + out.doc_id + "' and '" + p.doc_id + "'");
    }
    for (const auto& [family, denom] : p.denominators) {
      if (!out.denominators.emplace(family, denom).second) {
        throw InvalidArgument("family " + std::string(family_name(family)) +
                              " appears twice in combine");
      }
    }
    for (const auto& [key, count] : p.counts) out.counts[key] += count;
  }
  return out;
}

std::string_view feature_set_name(FeatureSet s) noexcept {
  return kSetNames[static_cast<std::size_t>(s)];
}

FeatureSet parse_feature_set(std::string_view name) {
  for (std::size_t i = 0; i < kSetNames.size(); ++i) {
    if (kSetNames[i] == name) return static_cast<FeatureSet>(i);
  }
  throw InvalidArgument("unknown feature configuration '" + std::string(name) +
                        "' (expected pos2, particle2, comma, function or all)");
}

std::vector<FeatureFamily> families_of(FeatureSet s) {
  if (s == FeatureSet::All) {
    return {FeatureFamily::PosBigram, FeatureFamily::ParticleBigram, FeatureFamily::CommaPosition,
            FeatureFamily::FunctionWord};
  }
  return {static_cast<FeatureFamily>(s)};
}

FeatureVector extract(const Document& doc, FeatureSet set, const FeatureOptions& options) {
  auto one = [&](FeatureFamily f) {
    switch (f) {
      case FeatureFamily::PosBigram:
        return pos_bigrams(doc, options.tag_depth);
      case FeatureFamily::ParticleBigram:
        return particle_bigrams(doc, options.tags.particle_tags);
      case FeatureFamily::CommaPosition:
        return comma_positions(doc, options.tags.comma_surfaces);
      case FeatureFamily::FunctionWord:
        break;
    }
    return function_word_rates(doc, options.tags.function_pos);
  };
  std::vector<FeatureVector> parts;
  for (auto f : families_of(set)) parts.push_back(one(f));
  return parts.size() == 1 ? std::move(parts.front()) : combine(parts);
}

FeatureMatrix::FeatureMatrix(std::vector<FeatureKey> keys, std::vector<std::string> doc_ids,
                             std::vector<std::string> labels, std::vector<double> values)
    : keys_(std::move(keys)),
      doc_ids_(std::move(doc_ids)),
      labels_(std::move(labels)),
      values_(std::move(values)) {
  if (labels_.size() != doc_ids_.size()) throw InvalidArgument("labels and doc ids differ in length");
  if (values_.size() != doc_ids_.size() * keys_.size()) {
    throw InvalidArgument("matrix values do not match rows x columns");
  }
}

std::span<const double> FeatureMatrix::row(std::size_t i) const {
  if (i >= rows()) throw InvalidArgument("row index out of range");
  return std::span<const double>(values_).subspan(i * cols(), cols());
}

bool FeatureMatrix::degenerate(std::size_t i) const {
  const auto r = row(i);
  return std::all_of(r.begin(), r.end(), [](double x) { return x == 0.0; });
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indexes) const {
  std::vector<std::string> ids, labels;
  std::vector<double> values;
  values.reserve(indexes.size() * cols());
  for (auto i : indexes) {
    const auto r = row(i);
    ids.push_back(doc_ids_[i]);
    labels.push_back(labels_[i]);
    values.insert(values.end(), r.begin(), r.end());
  }
  return FeatureMatrix(keys_, std::move(ids), std::move(labels), std::move(values));
}

std::string FeatureMatrix::to_csv() const {
  std::ostringstream out;
  csv::Row header{"doc_id", "label"};
  for (const auto& k : keys_) header.push_back(k.serialize());
  csv::write_row(out, header);
  for (std::size_t i = 0; i < rows(); ++i) {
    csv::Row line{doc_ids_[i], labels_[i]};
    for (double x : row(i)) line.push_back(csv::format_double(x));
    csv::write_row(out, line);
  }
  return out.str();
}

FeatureMatrix build_matrix(std::span<const FeatureVector> vectors,
                           std::span<const std::string> labels,
                           std::span<const FeatureFamily> families) {
  if (vectors.size() != labels.size()) throw InvalidArgument("one label per feature vector required");
  const bool rates = std::find(families.begin(), families.end(), FeatureFamily::FunctionWord) !=
                     families.end();

  std::set<FeatureKey> key_set;
  for (const auto& v : vectors) {
    for (const auto& [k, c] : v.counts) {
      if (std::find(families.begin(), families.end(), k.family) != families.end()) key_set.insert(k);
    }
    const auto fw = v.denominators.find(FeatureFamily::FunctionWord);
    if (rates && fw != v.denominators.end() &&
        v.family_total(FeatureFamily::FunctionWord) < fw->second) {
      key_set.insert(FeatureKey::make(FeatureFamily::FunctionWord, {std::string(kNonFunctionWords)}));
    }
  }
  std::vector<FeatureKey> keys(key_set.begin(), key_set.end());
  const FeatureKey residual_key{FeatureFamily::FunctionWord, {std::string(kNonFunctionWords)}};

  std::vector<std::string> ids;
  std::vector<double> values(vectors.size() * keys.size(), 0.0);
  for (std::size_t r = 0; r < vectors.size(); ++r) {
    const auto& v = vectors[r];
    ids.push_back(v.doc_id);
    std::map<FeatureFamily, std::uint64_t> denom;
    std::size_t blocks = 0;
    for (auto f : families) {
      const auto it = v.denominators.find(f);
      const std::uint64_t d = it == v.denominators.end() ? 0 : it->second;
      denom[f] = d;
      if (d > 0) ++blocks;
    }
    if (blocks == 0) continue;
    double* out = values.data() + r * keys.size();
    for (std::size_t j = 0; j < keys.size(); ++j) {
      const auto& k = keys[j];
      const std::uint64_t d = denom[k.family];
      if (d == 0) continue;
      std::uint64_t c = 0;
      if (k == residual_key) {
        c = d - v.family_total(FeatureFamily::FunctionWord);
      } else if (auto it = v.counts.find(k); it != v.counts.end()) {
        c = it->second;
      }
      out[j] = static_cast<double>(c) / static_cast<double>(d) / static_cast<double>(blocks);
    }
  }
  return FeatureMatrix(std::move(keys), std::move(ids),
                       std::vector<std::string>(labels.begin(), labels.end()), std::move(values));
}

FeatureMatrix build_matrix(const Corpus& corpus, FeatureSet set, const FeatureOptions& options) {
  if (corpus.empty()) throw InvalidArgument("cannot build a feature matrix from an empty corpus");
  std::vector<FeatureVector> vectors;
  std::vector<std::string> labels;
  vectors.reserve(corpus.size());
  for (const auto& d : corpus.documents()) {
    vectors.push_back(extract(d, set, options));
    labels.push_back(d.label);
  }
  const auto families = families_of(set);
  return build_matrix(vectors, labels, families);
}

}  // namespace stylo
