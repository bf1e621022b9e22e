#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "voicemark/linguistic.hpp"
#include "voicemark/transcript.hpp"

using namespace voicemark::linguistic;
using voicemark::transcript::AnnotatedTranscript;
using voicemark::transcript::parse_conllu;

namespace {

const char* kFixture =
    "# text = She walked home.\n"
    "1\tShe\tshe\tPRON\t_\tCase=Nom|Number=Sing|Person=3\t2\tnsubj\t_\t_\n"
    "2\twalked\twalk\tVERB\t_\tTense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\thome\thome\tADV\t_\t_\t2\tadvmod\t_\t_\n"
    "4\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
    "\n"
    "# text = Um dogs are barking loudly.\n"
    "1\tUm\tum\tINTJ\t_\t_\t4\tdiscourse\t_\t_\n"
    "2\tdogs\tdog\tNOUN\t_\tNumber=Plur\t4\tnsubj\t_\t_\n"
    "3\tare\tbe\tAUX\t_\tMood=Ind|Tense=Pres\t4\taux\t_\t_\n"
    "4\tbarking\tbark\tVERB\t_\tVerbForm=Ger\t0\troot\t_\t_\n"
    "5\tloudly\tloudly\tADV\t_\t_\t4\tadvmod\t_\t_\n"
    "6\t.\t.\tPUNCT\t_\t_\t4\tpunct\t_\t_\n";

AnnotatedTranscript words(const std::vector<std::vector<std::string>>& s) { return oracle::make_transcript(s); }

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

GraphFields graph_of(const std::string& text) {
  const auto t = words({split(text)});
  return graph_metrics(build_word_graph(t), static_cast<double>(t.word_count()));
}

voicemark::transcript::Token verb(int id, const char* tense) {
  voicemark::transcript::Token t;
  t.id = id;
  t.form = "v" + std::to_string(id);
  t.lemma = t.form;
  t.upos = "VERB";
  t.head = id == 1 ? 0 : 1;
  t.deprel = id == 1 ? "root" : "conj";
  if (tense) t.feats.emplace_back("Tense", tense);
  return t;
}

SentimentConfig lexicon() {
  auto cfg = SentimentConfig::defaults();
  cfg.lexicon = {{"good", 1.9}, {"bad", -2.5}, {"happy", 2.7}};
  return cfg;
}

double norm(double x) { return x / std::sqrt(x * x + 15.0); }

double mattr_oracle(const std::vector<std::string>& w, std::size_t window) {
  if (w.size() <= window) return static_cast<double>(std::set<std::string>(w.begin(), w.end()).size()) / static_cast<double>(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i + window <= w.size(); ++i) {
    total += static_cast<double>(std::set<std::string>(w.begin() + static_cast<std::ptrdiff_t>(i),
                                                        w.begin() + static_cast<std::ptrdiff_t>(i + window))
                                     .size()) /
             static_cast<double>(window);
  }
  return total / static_cast<double>(w.size() - window + 1);
}

}  // namespace

TEST_SUITE("linguistic") {
  TEST_CASE("richness formulas") {
    CHECK(brunet_index(100, 50) == doctest::Approx(11.19).epsilon(0.01 / 11.19));
    CHECK(honore_statistic(100, 50, 20) == doctest::Approx(767.53).epsilon(0.01 / 767.53));
    for (double n : {5.0, 37.0, 400.0}) {
      for (double v : {3.0, 5.0}) {
        const double direct = std::pow(n, std::pow(v, -0.165));
        CHECK(std::fabs(brunet_index(n, v) - direct) <= 1e-9 * direct);
        const double h = v - 1.0;
        const double honore = 100.0 * std::log(n) / (1.0 - h / v);
        CHECK(std::fabs(honore_statistic(n, v, h) - honore) <= 1e-9 * honore);
      }
    }
    CHECK(honore_statistic(10, 10, 10) == doctest::Approx(100.0 * std::log(10.0) / 0.01).epsilon(1e-12));
    CHECK(brunet_index(0, 0) == 0.0);
    CHECK(honore_statistic(0, 0, 0) == 0.0);
  }

  TEST_CASE("ten distinct words") {
    std::vector<std::string> w;
    for (char c = 'a'; c < 'a' + 10; ++c) w.push_back(std::string(1, c) + "x");
    const auto f = lexical_indices(words({w}));
    CHECK(f.type_token_ratio == 1.0);
    CHECK(f.MATTR == 1.0);
    CHECK(f.honore_stat == doctest::Approx(100.0 * std::log(10.0) / 0.01).epsilon(1e-12));
  }

  TEST_CASE("MATTR against a direct window average") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = 1 + rng() % 140;
      std::vector<std::string> w;
      for (std::size_t i = 0; i < n; ++i) w.push_back("w" + std::to_string(rng() % 30));
      const double got = mattr(w, 50);
      CHECK(got == doctest::Approx(mattr_oracle(w, 50)).epsilon(1e-12));
      CHECK(got <= 1.0);
      const auto f = lexical_indices(words({w}));
      if (n <= 50) CHECK(f.MATTR == f.type_token_ratio);
    }
  }

  TEST_CASE("self-concatenation") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<std::string>> s(2);
      for (auto& sent : s) {
        for (int i = 0; i < 6; ++i) sent.push_back("w" + std::to_string(rng() % 9));
      }
      auto doubled = s;
      doubled.insert(doubled.end(), s.begin(), s.end());
      const auto a = lexical_indices(words(s));
      const auto b = lexical_indices(words(doubled));
      CHECK(b.word_count == 2.0 * a.word_count);
      CHECK(b.type_token_ratio <= a.type_token_ratio);
    }
  }

  TEST_CASE("fixture lexical block") {
    const auto t = parse_conllu(kFixture);
    const auto f = lexical_indices(t);
    CHECK(f.word_count == 8);
    CHECK(f.sentence_count == 2);
    CHECK(f.type_token_ratio == 1.0);
    CHECK(f.avg_word_length == 35.0 / 8.0);
    CHECK(f.lexical_density == 5.0 / 8.0);
    CHECK(f.content_function_ratio == 5.0 / 3.0);
    CHECK(f.pronoun_ratio == 1.0 / 8.0);
    CHECK(f.idea_density == 0.5);
    CHECK(f.propositional_density == 0.5);
    CHECK(f.Tense_Past == 1);
    CHECK(f.Tense_Pres == 1);
    CHECK(f.Voice_Pass == 0);
    CHECK(f.Number_Plur == 1);
    CHECK(f.lemma_ttr == 1.0);
    CHECK(f.upos_diversity == 6.0 / 8.0);
    CHECK(f.morphological_richness == 5.0 / 8.0);
    CHECK(f.filler_count == 1);
  }

  TEST_CASE("fixture syntactic block") {
    const auto s = syntactic_measures(parse_conllu(kFixture));
    CHECK(s.mean_sentence_length == 4.0);
    CHECK(s.mean_clause_length == 4.0);
    CHECK(s.clause_ratio == 1.0);
    CHECK(s.syntactic_depth_mean == 2.0);
    CHECK(s.syntactic_depth_max == 2.0);
    CHECK(s.syntactic_embedding_depth == 2.0);
    CHECK(s.verb_tense_switches == 0.0);
    CHECK(s.verb_tense_switch_ratio == 0.0);
    CHECK(s.passive_voice_ratio == 0.0);
    CHECK(s.mean_constituency_depth == 0.0);
  }

  TEST_CASE("dependency depth and clauses") {
    const auto single = syntactic_measures(words({{"hi"}}));
    CHECK(single.syntactic_depth_max == 1.0);
    CHECK(single.clause_ratio == 1.0);
    const auto chain = syntactic_measures(parse_conllu("1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n"
                                                       "2\tb\tb\tX\t_\t_\t3\tdep\t_\t_\n"
                                                       "3\tc\tc\tX\t_\t_\t0\troot\t_\t_\n"));
    CHECK(chain.syntactic_depth_max == 3.0);
  }

  TEST_CASE("tense switches") {
    AnnotatedTranscript t;
    t.sentences.push_back({verb(1, "Past"), verb(2, "Past"), verb(3, nullptr), verb(4, "Pres")});
    t.sentences.push_back({verb(1, "Past")});
    const auto s = syntactic_measures(t);
    CHECK(s.verb_tense_switches == 2.0);
    CHECK(s.verb_tense_switch_ratio == 0.5);

    const auto none = syntactic_measures(words({{"the", "cat"}}));
    CHECK(none.verb_tense_switches == 0.0);
    CHECK(none.verb_tense_switch_ratio == 0.0);
    const auto lex = lexical_indices(words({{"the", "cat"}}));
    CHECK(lex.Tense_Past == 0.0);
    CHECK(lex.Tense_Pres == 0.0);
  }

  TEST_CASE("passive ratio and constituency depths") {
    auto t = parse_conllu(kFixture);
    t.sentences[1][3].feats.emplace_back("Voice", "Pass");
    const auto s = syntactic_measures(t);
    CHECK(s.passive_voice_ratio == 0.5);
    voicemark::transcript::attach_trees(t, voicemark::transcript::parse_bracketed("(S (NP x) (VP (V y)))\n(X a)"));
    const auto withtrees = syntactic_measures(t);
    CHECK(withtrees.mean_constituency_depth == 2.0);
    CHECK(withtrees.max_constituency_depth == 3.0);
  }

  TEST_CASE("word graph construction") {
    const auto aa = build_word_graph(words({{"a", "a"}}));
    CHECK(aa.nodes.size() == 1);
    CHECK(aa.edges.at({0, 0}) == 1);

    const auto aba = graph_of("a b a");
    CHECK(aba.graph_nodes == 2);
    CHECK(aba.graph_edges == 2);
    CHECK(aba.graph_loops_L2 == 1);

    const auto empty = build_word_graph(AnnotatedTranscript{});
    CHECK(empty.nodes.empty());
    CHECK(empty.total_edges == 0);

    const auto cross = build_word_graph(words({{"a", "b"}, {"c", "A"}}));
    CHECK(cross.total_edges == 2);
    CHECK(cross.nodes.size() == 3);
    CHECK_FALSE(cross.edges.count({1, 2}));

    auto fixture = parse_conllu(kFixture);
    const auto g = build_word_graph(fixture);
    CHECK(g.nodes.size() == 8);
    CHECK(g.total_edges == 6);
  }

  TEST_CASE("graph metric examples") {
    const auto abab = graph_of("a b a b");
    CHECK(abab.graph_nodes == 2);
    CHECK(abab.graph_edges == 3);
    CHECK(abab.graph_repeated_edges == 1);
    CHECK(abab.graph_loops_L2 == 1);
    CHECK(abab.graph_largest_scc == 2);

    const auto abca = graph_of("a b c a");
    CHECK(abca.graph_loops_L3 == 1);
    CHECK(abca.graph_diameter == 1);

    const auto one = graph_of("solo");
    CHECK(one.graph_nodes == 1);
    CHECK(one.graph_edges == 0);
    CHECK(one.graph_density == 0);
    CHECK(one.graph_diameter == 0);

    const auto chain = graph_of("a b c d");
    CHECK(chain.graph_diameter == 3);
    CHECK(chain.graph_avg_shortest_path == doctest::Approx(20.0 / 12.0));
    CHECK(chain.nodes_per_word == 1.0);
    CHECK(chain.edges_per_word == 0.75);
    CHECK(chain.atd_per_word == doctest::Approx(1.5 / 4.0));
  }

  TEST_CASE("graph metrics match the adjacency oracle on short strings") {
    const std::string alphabet = "abcd";
    std::vector<std::string> current{""};
    for (int len = 0; len <= 5; ++len) {
      std::vector<std::string> next;
      for (const auto& s : current) {
        std::vector<std::string> w;
        for (char c : s) w.emplace_back(1, c);
        const auto fields = graph_metrics(build_word_graph(words({w})), static_cast<double>(w.size()));
        const auto why = oracle::graph_mismatch(fields, oracle::graph_counts({w}));
        INFO("string '" << s << "'");
        REQUIRE(why.empty());
        for (char c : alphabet) next.push_back(s + c);
      }
      current = std::move(next);
    }
  }

  TEST_CASE("graph metrics match the oracle across sentence breaks") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 500; ++trial) {
      std::vector<std::vector<std::string>> s(1 + rng() % 3);
      for (auto& sent : s) {
        const std::size_t n = 1 + rng() % 6;
        for (std::size_t i = 0; i < n; ++i) {
          std::string w(1, static_cast<char>('a' + rng() % 5));
          if (rng() % 4 == 0) w[0] = static_cast<char>(std::toupper(w[0]));
          sent.push_back(w);
        }
      }
      const auto t = words(s);
      const auto fields = graph_metrics(build_word_graph(t), static_cast<double>(t.word_count()));
      REQUIRE(oracle::graph_mismatch(fields, oracle::graph_counts(s)).empty());
      CHECK(fields.graph_density >= 0.0);
      CHECK(fields.graph_density <= 1.0);
    }
  }

  TEST_CASE("semantic measures") {
    auto t = words({{"a", "b"}, {"a", "b"}, {"c"}});
    const auto s = semantic_measures(t);
    CHECK(s.sentence_repetition_ratio == doctest::Approx(1.0 / 3.0));
    CHECK(s.discourse_cohesion == 0.5);
    CHECK(s.first_order_coherence == 0.0);

    voicemark::transcript::attach_embeddings(t, {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
    const auto same = semantic_measures(t);
    CHECK(same.first_order_coherence == doctest::Approx(1.0));
    CHECK(same.second_order_coherence == doctest::Approx(1.0));

    auto o = words({{"x"}, {"y"}, {"z"}});
    voicemark::transcript::attach_embeddings(o, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const auto orth = semantic_measures(o);
    CHECK(orth.first_order_coherence == 0.0);
    CHECK(orth.second_order_coherence == 0.0);

    CHECK(cosine_similarity({0, 0}, {1, 1}) == 0.0);
  }

  TEST_CASE("coherence is invariant to uniform positive scaling") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      auto t = words({{"a"}, {"b"}, {"c"}, {"d"}});
      std::vector<std::vector<double>> e(4, std::vector<double>(5));
      for (auto& v : e) {
        for (auto& x : v) x = g(rng);
      }
      auto scaled = e;
      for (auto& v : scaled) {
        for (auto& x : v) x *= 7.5;
      }
      auto u = t;
      voicemark::transcript::attach_embeddings(t, e);
      voicemark::transcript::attach_embeddings(u, scaled);
      const auto a = semantic_measures(t);
      const auto b = semantic_measures(u);
      CHECK(a.first_order_coherence == doctest::Approx(b.first_order_coherence).epsilon(1e-12));
      CHECK(a.second_order_coherence == doctest::Approx(b.second_order_coherence).epsilon(1e-12));
    }
  }

  TEST_CASE("repetition ratio bound") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::vector<std::string>> s(1 + rng() % 6);
      for (auto& sent : s) sent.push_back(std::string(1, static_cast<char>('a' + rng() % 3)));
      const double r = semantic_measures(words(s)).sentence_repetition_ratio;
      CHECK(r >= 0.0);
      CHECK(r <= 1.0 - 1.0 / static_cast<double>(s.size()) + 1e-12);
    }
  }

  TEST_CASE("sentiment rules") {
    const auto cfg = lexicon();
    const auto empty = sentiment_scores("", cfg);
    CHECK(empty.compound == 0.0);
    CHECK(empty.positive == 0.0);
    CHECK(empty.neutral == 0.0);
    CHECK(empty.negative == 0.0);

    CHECK(sentiment_scores("good", cfg).compound == doctest::Approx(0.4404).epsilon(1e-4 / 0.4404));
    CHECK(sentiment_scores("good", cfg).compound == doctest::Approx(norm(1.9)).epsilon(1e-12));
    CHECK(sentiment_scores("not good", cfg).compound == doctest::Approx(-0.3412).epsilon(1e-4 / 0.3412));
    CHECK(sentiment_scores("not good", cfg).compound == doctest::Approx(norm(-0.74 * 1.9)).epsilon(1e-12));
    CHECK(sentiment_scores("very good", cfg).compound == doctest::Approx(norm(1.9 + 0.293)).epsilon(1e-12));
    CHECK(sentiment_scores("very bad", cfg).compound == doctest::Approx(norm(-2.5 - 0.293)).epsilon(1e-12));
    CHECK(sentiment_scores("GOOD day", cfg).compound == doctest::Approx(norm(1.9 + 0.733)).epsilon(1e-12));
    CHECK(sentiment_scores("GOOD", cfg).compound == doctest::Approx(norm(1.9)).epsilon(1e-12));
    CHECK(sentiment_scores("good!!!!!", cfg).compound == doctest::Approx(norm(1.9 + 3 * 0.292)).epsilon(1e-12));
    CHECK(sentiment_scores("I don't feel happy", cfg).compound < 0.0);

    const auto mixed = sentiment_scores("a good day and a bad night", cfg);
    CHECK(mixed.positive + mixed.negative + mixed.neutral == doctest::Approx(1.0));
    CHECK(mixed.neutral > 0.0);
    CHECK(mixed.compound >= -1.0);
    CHECK(mixed.compound <= 1.0);
  }

  TEST_CASE("lexicon files") {
    const auto cfg = parse_lexicon("good\t1.9\t0.5\t[1,2]\n# comment\n\nsad\t-2.1\n");
    CHECK(cfg.lexicon.at("good") == 1.9);
    CHECK(cfg.lexicon.at("sad") == -2.1);
    CHECK_THROWS_AS(parse_lexicon("good\tnot-a-number\n"), LexiconError);
    CHECK_THROWS_AS(parse_lexicon(""), LexiconError);
    CHECK_THROWS_AS(load_lexicon("/nonexistent/vader.tsv"), LexiconError);
  }

  TEST_CASE("extractor invariants on the fixture") {
    const auto t = parse_conllu(kFixture);
    const auto f = extract_linguistic(t, lexicon());
    const auto named = f.named();
    CHECK(named.size() == 56);
    for (const auto& [name, v] : named) {
      CAPTURE(name);
      CHECK(std::isfinite(v));
    }
    for (double r : {f.lexical.type_token_ratio, f.lexical.MATTR, f.lexical.lemma_ttr, f.lexical.pronoun_ratio,
                     f.syntactic.passive_voice_ratio, f.graph.graph_density, f.semantic.sentence_repetition_ratio}) {
      CHECK(r >= 0.0);
      CHECK(r <= 1.0);
    }
    CHECK(f.sentiment.compound >= -1.0);
    CHECK(f.sentiment.compound <= 1.0);
    const auto missing = f.missing();
    CHECK(missing.size() == 4);
    CHECK(extract_linguistic(t, lexicon()).named() == named);
  }
}
