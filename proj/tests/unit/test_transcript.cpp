#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "oracles.hpp"
#include "voicemark/linguistic.hpp"
#include "voicemark/transcript.hpp"

using namespace voicemark::transcript;

namespace {

std::string row(int id, const std::string& form, int head, const std::string& deprel = "dep",
                const std::string& upos = "NOUN", const std::string& feats = "_") {
  return std::to_string(id) + "\t" + form + "\t" + form + "\t" + upos + "\t_\t" + feats + "\t" + std::to_string(head) +
         "\t" + deprel + "\t_\t_\n";
}

ParseError::Kind kind_of(const std::string& text) {
  try {
    parse_conllu(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ParseError::Kind::BadField;
}

AnnotatedTranscript random_transcript(std::mt19937_64& rng) {
  static const char* upos[] = {"NOUN", "VERB", "ADJ", "PRON", "DET", "PUNCT", "ADP"};
  static const char* keys[] = {"Number", "Tense", "Voice", "Person"};
  static const char* vals[] = {"Sing", "Plur", "Past", "Pres", "Pass", "1", "3"};
  std::uniform_int_distribution<int> len(1, 9);
  AnnotatedTranscript t;
  const int sentences = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int s = 0; s < sentences; ++s) {
    const int n = len(rng);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 1);
    std::shuffle(order.begin(), order.end(), rng);
    Sentence sent(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Token& tok = sent[static_cast<std::size_t>(order[static_cast<std::size_t>(i)] - 1)];
      tok.id = order[static_cast<std::size_t>(i)];
      tok.head = i == 0 ? 0 : order[std::uniform_int_distribution<std::size_t>(0, static_cast<std::size_t>(i) - 1)(rng)];
      tok.deprel = i == 0 ? "root" : "dep";
    }
    for (auto& tok : sent) {
      tok.form = "w" + std::to_string(rng() % 20);
      tok.lemma = tok.form;
      tok.upos = upos[rng() % 7];
      if (rng() % 2) tok.feats.emplace_back(keys[rng() % 4], vals[rng() % 7]);
    }
    t.sentences.push_back(sent);
    t.sentence_texts.push_back(rng() % 2 ? "text " + std::to_string(s) : "");
  }
  return t;
}

}  // namespace

TEST_SUITE("transcript") {
  TEST_CASE("single token") {
    const auto t = parse_conllu(row(1, "hello", 0, "root"));
    REQUIRE(t.sentence_count() == 1);
    CHECK(t.token_count() == 1);
    CHECK(t.sentences[0][0].form == "hello");
  }

  TEST_CASE("comments, ranges and empty nodes") {
    const std::string text = "# sent_id = 1\n# text = don't go\n1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(1, "do", 3, "aux", "AUX") +
                             row(2, "n't", 3, "advmod", "PART") + "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(3, "go", 0, "root", "VERB") +
                             "\n";
    const auto t = parse_conllu(text);
    REQUIRE(t.sentence_count() == 1);
    CHECK(t.token_count() == 3);
    CHECK(t.sentences[0][0].form == "do");
    CHECK(t.sentences[0][1].form == "n't");
    CHECK(t.sentence_texts[0] == "don't go");
  }

  TEST_CASE("structural errors carry their kind and line") {
    CHECK(kind_of("1\ta\ta\tNOUN\t_\t_\t0\troot\t_\n") == ParseError::Kind::ColumnCount);
    CHECK(kind_of(row(1, "a", 0, "root") + row(3, "b", 1)) == ParseError::Kind::NonContiguousId);
    CHECK(kind_of(row(1, "a", 0, "root") + row(2, "b", 7)) == ParseError::Kind::HeadOutOfRange);
    CHECK(kind_of(row(1, "a", 0, "root") + row(2, "b", 2)) == ParseError::Kind::HeadCycle);
    CHECK(kind_of(row(1, "a", 0, "root") + row(2, "b", 0, "root")) == ParseError::Kind::MultipleRoots);
    CHECK(kind_of(row(1, "a", 0, "root", "NOUN", "Number")) == ParseError::Kind::BadField);
    try {
      parse_conllu(row(1, "a", 2) + row(2, "b", 1));
      FAIL("cycle accepted");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::HeadCycle);
      CHECK(e.line() == 1);
      CHECK(std::string(e.what()).find("sentence 1") != std::string::npos);
    }
    try {
      parse_conllu("\n\n" + row(1, "a", 0, "root") + row(2, "b", 9));
      FAIL("head out of range accepted");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
    }
  }

  TEST_CASE("serialize round-trips") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
      const auto t = random_transcript(rng);
      const auto back = parse_conllu(serialize_conllu(t));
      REQUIRE(back.sentences == t.sentences);
      REQUIRE(back.sentence_texts == t.sentence_texts);
    }
  }

  TEST_CASE("counts agree with the linguistic extractor") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 30; ++i) {
      const auto t = random_transcript(rng);
      const auto f = voicemark::linguistic::extract_linguistic(t, voicemark::linguistic::SentimentConfig::defaults());
      CHECK(f.lexical.word_count == static_cast<double>(t.word_count()));
      CHECK(f.lexical.sentence_count == static_cast<double>(t.sentence_count()));
    }
  }

  TEST_CASE("bracketed trees") {
    const auto trees = parse_bracketed("(S (NP (DT the) (NN dog)) (VP (VBZ barks)))");
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].depth() == 3);
    CHECK(trees[0].label == "S");
    CHECK(parse_bracketed("(X a)")[0].depth() == 1);
    CHECK(parse_bracketed("(ROOT (S (NP a)))\n(X b)").size() == 2);
    CHECK(parse_bracketed(serialize_bracketed(trees[0]))[0] == trees[0]);
    try {
      parse_bracketed("((S a)");
      FAIL("unbalanced accepted");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::UnbalancedParentheses);
    }
    try {
      parse_bracketed("(S ())");
      FAIL("empty node accepted");
    } catch (const ParseError& e) {
      CHECK(e.kind() == ParseError::Kind::EmptyNode);
    }
    CHECK_THROWS_AS(parse_bracketed("(S a))"), ParseError);
  }

  TEST_CASE("embedding sidecars") {
    const std::string ok =
        "{\"index\": 1, \"vector\": [0, 1, 0, 0]}\n{\"index\": 0, \"vector\": [1, 0, 0, 0]}\n{\"index\": 2, \"vector\": [0, 0, 1, 0.5]}\n";
    const auto e = parse_embeddings(ok);
    REQUIRE(e.size() == 3);
    CHECK(e[0] == std::vector<double>{1, 0, 0, 0});
    CHECK(e[2].size() == 4);

    const auto kind = [](const std::string& text) {
      try {
        parse_embeddings(text);
      } catch (const ParseError& err) {
        return err.kind();
      }
      return ParseError::Kind::BadField;
    };
    CHECK(kind("{\"index\": 0, \"vector\": [1, 0, 0, 0]}\n{\"index\": 1, \"vector\": [1, 0, 0]}\n") ==
          ParseError::Kind::DimensionMismatch);
    CHECK(kind("{\"index\": 0, \"vector\": [1, NaN, 0, 0]}\n") == ParseError::Kind::NonFinite);
    CHECK(kind("{\"index\": 0, \"vector\": [1, 0]}\n{\"index\": 2, \"vector\": [1, 0]}\n") == ParseError::Kind::MissingIndex);
    CHECK(kind("{\"vector\": [1, 0]}\n") == ParseError::Kind::MissingIndex);
  }

  TEST_CASE("sidecars must match the sentence count") {
    auto t = parse_conllu(row(1, "a", 0, "root") + "\n" + row(1, "b", 0, "root"));
    CHECK_THROWS_AS(attach_trees(t, parse_bracketed("(X a)")), ParseError);
    CHECK_THROWS_AS(attach_embeddings(t, {{1.0}}), ParseError);
    attach_embeddings(t, {{1.0, 0.0}, {0.0, 1.0}});
    CHECK(t.embeddings->size() == 2);
  }

  TEST_CASE("loading from disk") {
    const auto dir = std::filesystem::temp_directory_path() / "voicemark_transcript_test";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "t.conllu") << row(1, "a", 0, "root") << "\n" << row(1, "b", 0, "root") << "\n";
    std::ofstream(dir / "t.tree") << "(S (X a))\n(S (Y b))\n";
    std::ofstream(dir / "t.jsonl") << "{\"index\": 0, \"vector\": [1, 2]}\n{\"index\": 1, \"vector\": [3, 4]}\n";
    const auto t = load_transcript((dir / "t.conllu").string(), (dir / "t.tree").string(), (dir / "t.jsonl").string());
    CHECK(t.sentence_count() == 2);
    CHECK(t.trees->size() == 2);
    CHECK(t.embeddings->at(1) == std::vector<double>{3, 4});
    CHECK_THROWS(load_transcript((dir / "missing.conllu").string()));
    std::filesystem::remove_all(dir);
  }
}
