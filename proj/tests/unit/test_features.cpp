#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "stylo/error.hpp"
#include "stylo/features.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace stylo;
using stylo::testing::make_doc;
using stylo::testing::tok;

namespace {

std::uint64_t count_of(const FeatureVector& v, const std::string& serialized) {
  for (const auto& [k, c] : v.counts) {
    if (k.serialize() == serialized) return c;
  }
  return 0;
}

double row_sum(std::span<const double> r) { return std::accumulate(r.begin(), r.end(), 0.0); }

const Document kWalk = make_doc("w", "L", {{tok("私", "noun"), tok("は", "particle,binding"), tok("行く", "verb")}});

}  // namespace

TEST_CASE("FeatureKey validates arity and serializes") {
  CHECK_THROWS_AS(FeatureKey::make(FeatureFamily::PosBigram, {"a"}), InvalidArgument);
  CHECK_THROWS_AS(FeatureKey::make(FeatureFamily::CommaPosition, {"a", "b"}), InvalidArgument);
  CHECK_THROWS_AS(FeatureKey::make(FeatureFamily::FunctionWord, {""}), InvalidArgument);
  const auto k = FeatureKey::make(FeatureFamily::ParticleBigram, {"係助詞:は", "格助詞:を"});
  CHECK(k.serialize() == "PARTICLE_BIGRAM|係助詞:は|格助詞:を");
  CHECK(FeatureKey::parse(k.serialize()) == k);
  CHECK(FeatureKey::parse("COMMA_POSITION|,") == FeatureKey::make(FeatureFamily::CommaPosition, {","}));
}

TEST_CASE("pos_bigrams") {
  SUBCASE("three-token sentence at depth 1") {
    const auto v = pos_bigrams(kWalk, 1);
    CHECK(v.counts.size() == 2);
    CHECK(count_of(v, "POS_BIGRAM|noun|particle") == 1);
    CHECK(count_of(v, "POS_BIGRAM|particle|verb") == 1);
    CHECK(v.total() == 2);
  }
  SUBCASE("depth 2 joins levels with a dash") {
    const auto v = pos_bigrams(kWalk, 2);
    CHECK(count_of(v, "POS_BIGRAM|noun|particle-binding") == 1);
  }
  SUBCASE("single-token sentence") {
    const auto v = pos_bigrams(make_doc("s", "L", {{tok("犬", "noun")}}), 1);
    CHECK(v.counts.empty());
    CHECK(v.total() == 0);
  }
  SUBCASE("no pair crosses a sentence boundary") {
    const auto d = make_doc("s", "L", {{tok("a", "noun"), tok("b", "verb")}, {tok("c", "adverb"), tok("d", "noun")}});
    const auto v = pos_bigrams(d, 1);
    CHECK(v.total() == 2);
    CHECK(count_of(v, "POS_BIGRAM|verb|adverb") == 0);
  }
  CHECK_THROWS_AS(pos_bigrams(kWalk, 0), InvalidArgument);
  CHECK_THROWS_AS(pos_bigrams(kWalk, 5), InvalidArgument);
}

TEST_CASE("particle_bigrams") {
  const std::set<std::string> particle{"particle"};
  SUBCASE("particles separated by other tokens pair up") {
    const auto d = make_doc("p", "L", {{tok("私", "noun"), tok("は", "particle,binding"), tok("本", "noun"),
                                        tok("を", "particle,case"), tok("読む", "verb")}});
    const auto v = particle_bigrams(d, particle);
    CHECK(v.counts.size() == 1);
    CHECK(count_of(v, "PARTICLE_BIGRAM|binding:は|case:を") == 1);
  }
  SUBCASE("one particle yields nothing") {
    CHECK(particle_bigrams(kWalk, particle).counts.empty());
  }
  SUBCASE("no pair across sentences") {
    const auto d = make_doc("p", "L", {{tok("私", "noun"), tok("は", "particle,binding")},
                                       {tok("本", "noun"), tok("を", "particle,case")}});
    CHECK(particle_bigrams(d, particle).counts.empty());
  }
  SUBCASE("removing particles empties the vector") {
    testing::SyntheticWriter w(11);
    const auto doc = w.parsed(testing::gpt_style(), 800, "g", "GPT");
    Document stripped{doc.id, doc.label, {}};
    for (const auto& s : doc.sentences) {
      std::vector<TaggedToken> kept;
      for (const auto& t : s.tokens()) {
        if (t.pos(0) != "助詞") kept.push_back(t);
      }
      if (!kept.empty()) stripped.sentences.emplace_back(std::move(kept));
    }
    CHECK_FALSE(particle_bigrams(doc).counts.empty());
    CHECK(particle_bigrams(stripped).counts.empty());
  }
}

TEST_CASE("comma_positions") {
  const std::set<std::string> commas{"、", ","};
  SUBCASE("records the preceding surface") {
    const auto d = make_doc("c", "L", {{tok("今日", "noun"), tok("は", "particle,binding"), tok("、", "symbol,comma"),
                                        tok("晴れ", "noun")}});
    const auto v = comma_positions(d, commas);
    CHECK(v.counts.size() == 1);
    CHECK(count_of(v, "COMMA_POSITION|は") == 1);
  }
  SUBCASE("no comma") { CHECK(comma_positions(kWalk, commas).counts.empty()); }
  SUBCASE("sentence-initial comma") {
    const auto d = make_doc("c", "L", {{tok(",", "symbol"), tok("x", "noun")}});
    CHECK(count_of(comma_positions(d, commas), "COMMA_POSITION|^") == 1);
  }
}

TEST_CASE("function_word_rates") {
  SUBCASE("counts function tokens over all tokens") {
    const auto d = make_doc("f", "L", {{tok("私", "noun"), tok("は", "particle"), tok("走る", "verb"),
                                        tok("た", "auxiliary verb")}});
    const auto v = function_word_rates(d);
    CHECK(v.counts.size() == 2);
    CHECK(count_of(v, "FUNCTION_WORD|は/particle") == 1);
    CHECK(count_of(v, "FUNCTION_WORD|た/auxiliary verb") == 1);
    CHECK(v.denominators.at(FeatureFamily::FunctionWord) == 4);
  }
  SUBCASE("only nouns") {
    const auto d = make_doc("f", "L", {{tok("犬", "noun"), tok("猫", "noun"), tok("鳥", "noun")}});
    const auto v = function_word_rates(d);
    CHECK(v.counts.empty());
    CHECK(v.denominators.at(FeatureFamily::FunctionWord) == 3);
  }
  SUBCASE("prefixes count as function words by default") {
    const auto d = make_doc("f", "L", {{tok("本", "接頭詞,名詞接続"), tok("研究", "名詞,サ変接続")}});
    CHECK(count_of(function_word_rates(d), "FUNCTION_WORD|本/接頭詞") == 1);
  }
}

TEST_CASE("combine") {
  SUBCASE("four empty vectors") {
    const auto d = make_doc("e", "L", {{tok("犬", "noun")}});
    std::vector<FeatureVector> parts{pos_bigrams(d, 1), particle_bigrams(d), comma_positions(d),
                                     function_word_rates(d)};
    const auto v = combine(parts);
    CHECK(v.counts.empty());
    CHECK(v.total() == 0);
  }
  SUBCASE("two families keep their own blocks") {
    FeatureVector a{"x", {{FeatureKey::make(FeatureFamily::PosBigram, {"a", "b"}), 2}}, {{FeatureFamily::PosBigram, 2}}};
    FeatureVector b{"x", {{FeatureKey::make(FeatureFamily::CommaPosition, {"は"}), 1}}, {{FeatureFamily::CommaPosition, 1}}};
    const std::vector<FeatureVector> parts{a, b};
    const auto v = combine(parts);
    CHECK(v.counts.size() == 2);
    const std::vector<std::string> labels{"L"};
    const std::vector<FeatureFamily> fams{FeatureFamily::PosBigram, FeatureFamily::CommaPosition};
    const std::vector<FeatureVector> one{v};
    const auto m = build_matrix(one, labels, fams);
    REQUIRE(m.cols() == 2);
    // Each block holds frequency 1.0 within its family; the row splits mass evenly.
    CHECK(m.at(0, 0) == doctest::Approx(0.5));
    CHECK(m.at(0, 1) == doctest::Approx(0.5));
    CHECK(m.at(0, 0) / m.at(0, 0) == 1.0);
  }
  SUBCASE("duplicate family rejected") {
    const std::vector<FeatureVector> parts{pos_bigrams(kWalk, 1), pos_bigrams(kWalk, 2)};
    CHECK_THROWS_AS(combine(parts), InvalidArgument);
  }
}

TEST_CASE("build_matrix") {
  SUBCASE("single document row sums to one") {
    const Corpus c({kWalk});
    for (auto set : kAllFeatureSets) {
      if (set == FeatureSet::ParticleBigram || set == FeatureSet::CommaPosition) continue;
      const auto m = build_matrix(c, set);
      REQUIRE(m.rows() == 1);
      CHECK(row_sum(m.row(0)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(build_matrix(c, FeatureSet::CommaPosition).degenerate(0));
  }
  SUBCASE("disjoint keys leave zeros in the other document's columns") {
    const auto a = make_doc("a", "X", {{tok("a", "noun"), tok("b", "verb")}});
    const auto b = make_doc("b", "Y", {{tok("c", "adverb"), tok("d", "adjective")}});
    const auto m = build_matrix(Corpus({a, b}), FeatureSet::PosBigram, {1, {}});
    REQUIRE(m.cols() == 2);
    CHECK(m.keys()[0].serialize() == "POS_BIGRAM|adverb|adjective");
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(0, 1) == 1.0);
    CHECK(m.at(1, 0) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
  }
  SUBCASE("function-word rows carry the non-function residual") {
    const auto d = make_doc("f", "L", {{tok("私", "noun"), tok("は", "particle"), tok("走る", "verb"),
                                        tok("た", "auxiliary verb")}});
    const auto m = build_matrix(Corpus({d}), FeatureSet::FunctionWord);
    REQUIRE(m.cols() == 3);
    CHECK(m.keys()[0].serialize() == "FUNCTION_WORD|*");
    CHECK(m.at(0, 0) == 0.5);
    CHECK(m.at(0, 1) == 0.25);
    CHECK(m.at(0, 2) == 0.25);
  }
  CHECK_THROWS_AS(build_matrix(Corpus{}, FeatureSet::All), InvalidArgument);
}

TEST_CASE("feature matrix properties on a synthetic corpus") {
  const auto corpus = testing::two_class_corpus(8, 600, 99);

  SUBCASE("pos bigram totals match sentence lengths") {
    for (const auto& d : corpus.documents()) {
      std::uint64_t expected = 0;
      for (const auto& s : d.sentences) expected += s.size() > 0 ? s.size() - 1 : 0;
      CHECK(pos_bigrams(d, 2).total() == expected);
    }
  }
  SUBCASE("rows are distributions and builds are deterministic") {
    for (auto set : kAllFeatureSets) {
      const auto m = build_matrix(corpus, set);
      for (std::size_t i = 0; i < m.rows(); ++i) CHECK(std::abs(row_sum(m.row(i)) - 1.0) < 1e-9);
      CHECK(std::is_sorted(m.keys().begin(), m.keys().end()));
      CHECK(build_matrix(corpus, set).values() == m.values());
    }
  }
  SUBCASE("permuting documents permutes rows only") {
    std::vector<Document> docs = corpus.documents();
    std::reverse(docs.begin(), docs.end());
    const Corpus reversed(docs);
    for (auto set : kAllFeatureSets) {
      const auto m = build_matrix(corpus, set);
      const auto r = build_matrix(reversed, set);
      REQUIRE(m.keys() == r.keys());
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto a = m.row(i);
        const auto b = r.row(m.rows() - 1 - i);
        CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
      }
    }
  }
  SUBCASE("combined rows re-normalised per family equal single-family rows") {
    const auto all = build_matrix(corpus, FeatureSet::All);
    for (auto set : {FeatureSet::PosBigram, FeatureSet::ParticleBigram, FeatureSet::CommaPosition,
                     FeatureSet::FunctionWord}) {
      const auto single = build_matrix(corpus, set);
      const auto family = families_of(set).front();
      for (std::size_t i = 0; i < all.rows(); ++i) {
        double block = 0;
        for (std::size_t j = 0; j < all.cols(); ++j) {
          if (all.keys()[j].family == family) block += all.at(i, j);
        }
        for (std::size_t j = 0, s = 0; j < all.cols(); ++j) {
          if (all.keys()[j].family != family) continue;
          while (single.keys()[s] != all.keys()[j]) {
            CHECK(single.at(i, s) == 0.0);
            ++s;
          }
          CHECK(std::abs(all.at(i, j) / block - single.at(i, s)) < 1e-12);
          ++s;
        }
      }
    }
  }
  SUBCASE("extractors agree with the brute-force recount") {
    const TagSet tags;
    for (const auto& d : corpus.documents()) {
      auto as_map = [](const FeatureVector& v) {
        testing::oracle::Counts c;
        for (const auto& [k, n] : v.counts) c[k.serialize()] = n;
        return c;
      };
      CHECK(as_map(pos_bigrams(d, 2)) == testing::oracle::pos_bigrams(d, 2));
      CHECK(as_map(particle_bigrams(d)) == testing::oracle::particle_bigrams(d, tags.particle_tags));
      CHECK(as_map(comma_positions(d)) == testing::oracle::comma_positions(d, tags.comma_surfaces));
      CHECK(as_map(function_word_rates(d)) == testing::oracle::function_words(d, tags.function_pos));
    }
  }
}

TEST_CASE("feature matrix CSV") {
  const auto m = build_matrix(Corpus({kWalk}), FeatureSet::PosBigram, {1, {}});
  CHECK(m.to_csv() == "doc_id,label,POS_BIGRAM|noun|particle,POS_BIGRAM|particle|verb\nw,L,0.5,0.5\n");
}
