#include "stylo/corpus.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "stylo/csv.hpp"
#include "stylo/error.hpp"
#include "stylo/io.hpp"
#include "stylo/random.hpp"

namespace stylo {

namespace {

constexpr std::size_t kMaxPosLevels = 4;
constexpr std::size_t kBaseFormField = 6;  // IPADIC/ChaSen layout: POS x4, conj type, conj form, base

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::size_t utf8_length(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

TaggedToken TaggedToken::from_features(std::string surface, std::vector<std::string> features) {
  if (surface.empty()) throw InvalidArgument("token surface is empty");
  TaggedToken tok;
  for (std::size_t i = 0; i < features.size() && i < kMaxPosLevels; ++i) {
    const auto& f = features[i];
    if (f.empty() || f == "*") break;
    if (f.find_first_of("\t\n\r") != std::string::npos) {
      throw InvalidArgument("POS level contains a tab or newline");
    }
    tok.pos_path.push_back(f);
  }
  if (tok.pos_path.empty()) throw InvalidArgument("token '" + surface + "' has no POS tag");
  if (features.size() > kBaseFormField && !features[kBaseFormField].empty() &&
      features[kBaseFormField] != "*") {
    tok.base_form = features[kBaseFormField];
  }
  tok.surface = std::move(surface);
  tok.features = std::move(features);
  return tok;
}

const std::string& TaggedToken::pos(std::size_t level) const {
  static const std::string empty;
  return level < pos_path.size() ? pos_path[level] : empty;
}

std::string TaggedToken::pos_prefix(std::size_t depth, std::string_view sep) const {
  std::string out;
  const std::size_t n = std::min(depth, pos_path.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += sep;
    out += pos_path[i];
  }
  return out;
}

Sentence::Sentence(std::vector<TaggedToken> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw InvalidArgument("sentence has no tokens");
  for (const auto& t : tokens_) char_count_ += utf8_length(t.surface);
}

std::size_t Document::char_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.char_count();
  return n;
}

std::size_t Document::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

Corpus::Corpus(std::vector<Document> documents) : documents_(std::move(documents)) {
  std::set<std::string_view> ids;
  for (const auto& d : documents_) {
    if (d.label.empty()) throw InvalidArgument("document '" + d.id + "' has an empty label");
    if (!ids.insert(d.id).second) throw InvalidArgument("duplicate document id '" + d.id + "'");
    labels_.insert(d.label);
  }
}

Corpus Corpus::relabeled(const std::map<std::string, std::string>& mapping) const {
  std::vector<Document> docs = documents_;
  for (auto& d : docs) {
    if (auto it = mapping.find(d.label); it != mapping.end()) d.label = it->second;
  }
  return Corpus(std::move(docs));
}

Document parse_tagged(std::string_view content, std::string id, std::string label) {
  Document doc{std::move(id), std::move(label), {}};
  std::vector<TaggedToken> pending;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line == "EOS") {
      if (!pending.empty()) doc.sentences.emplace_back(std::move(pending));
      pending.clear();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("missing tab separator", line_no);
    if (tab == 0) throw ParseError("empty surface", line_no);
    const auto feature_text = line.substr(tab + 1);
    if (feature_text.empty()) throw ParseError("empty feature list", line_no);
    try {
      pending.push_back(
          TaggedToken::from_features(std::string(line.substr(0, tab)), split(feature_text, ',')));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  if (!pending.empty()) doc.sentences.emplace_back(std::move(pending));
  return doc;
}

std::string serialize_tagged(const Document& doc) {
  std::string out;
  for (const auto& s : doc.sentences) {
    for (const auto& t : s.tokens()) {
      out += t.surface;
      out += '\t';
      for (std::size_t i = 0; i < t.features.size(); ++i) {
        if (i) out += ',';
        out += t.features[i];
      }
      out += '\n';
    }
    out += "EOS\n";
  }
  return out;
}

Document sample_to_length(const Document& doc, std::size_t target_chars, std::uint64_t seed) {
  Document out{doc.id, doc.label, {}};
  if (target_chars == 0) return out;
  if (doc.char_count() < target_chars) return doc;

  std::vector<std::size_t> order(doc.sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::size_t picked_chars = 0;
  std::size_t picked = 0;
  while (picked_chars < target_chars) {
    picked_chars += doc.sentences[order[picked]].char_count();
    ++picked;
  }
  std::vector<std::size_t> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(picked));
  std::sort(chosen.begin(), chosen.end());
  out.sentences.reserve(chosen.size());
  for (auto i : chosen) out.sentences.push_back(doc.sentences[i]);
  return out;
}

std::vector<ManifestEntry> parse_manifest(std::string_view content,
                                          const std::filesystem::path& base_dir) {
  const auto rows = csv::parse(content);
  if (rows.empty()) throw ParseError("manifest is empty", 0);
  const csv::Row expected{"path", "id", "label"};
  if (rows.front() != expected) throw ParseError("manifest header must be 'path,id,label'", 1);
  std::vector<ManifestEntry> entries;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw ParseError("expected 3 fields, got " + std::to_string(r.size()), i + 1);
    if (r[0].empty() || r[1].empty() || r[2].empty()) throw ParseError("empty field", i + 1);
    std::filesystem::path p(r[0]);
    if (p.is_relative()) p = base_dir / p;
    entries.push_back({p, r[1], r[2]});
  }
  return entries;
}

Corpus load_manifest(const std::filesystem::path& manifest_path) {
  const auto entries =
      parse_manifest(io::read_file(manifest_path), manifest_path.parent_path());
  std::vector<Document> docs;
  docs.reserve(entries.size());
  for (const auto& e : entries) {
    std::string content;
    try {
      content = io::read_file(e.path);
    } catch (const IoError&) {
      throw IoError("cannot read tagged file for '" + e.id + "': " + e.path.string());
    }
    try {
      docs.push_back(parse_tagged(content, e.id, e.label));
    } catch (const ParseError& pe) {
      throw ParseError(e.path.string() + ": " + pe.what(), pe.line());
    }
  }
  return Corpus(std::move(docs));
}

void save_archive(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "docs", ec);
  if (ec) throw IoError("cannot create archive directory " + dir.string() + ": " + ec.message());
  std::ostringstream index;
  csv::write_row(index, {"id", "label", "file"});
  std::size_t n = 0;
  for (const auto& d : corpus.documents()) {
    const std::string file = fmt::format("docs/{:05}.tagged", n++);
    io::write_file(dir / file, serialize_tagged(d));
    csv::write_row(index, {d.id, d.label, file});
  }
  io::write_file(dir / "index.csv", index.str());
}

Corpus load_archive(const std::filesystem::path& dir) {
  const auto rows = csv::parse(io::read_file(dir / "index.csv"));
  if (rows.empty() || rows.front() != csv::Row{"id", "label", "file"}) {
    throw ParseError(dir.string() + "/index.csv: bad header", 1);
  }
  std::vector<Document> docs;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 3) throw ParseError(dir.string() + "/index.csv: expected 3 fields", i + 1);
    docs.push_back(parse_tagged(io::read_file(dir / r[2]), r[0], r[1]));
  }
  return Corpus(std::move(docs));
}

}  // namespace stylo
