#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "voicemark/transcript.hpp"

namespace voicemark::linguistic {

struct LinguisticConfig {
  int mattr_window = 50;
  std::set<std::string> clause_deprels{"root", "csubj", "ccomp", "xcomp", "advcl", "acl", "acl:relcl", "parataxis"};
  std::set<std::string> fillers{"um", "uh", "erm", "uhm", "er", "hmm"};
  bool graph_lemma_nodes = false;
  double honore_min_denominator = 0.01;
};

/// Rule-based valence scoring parameters.
struct SentimentConfig {
  std::unordered_map<std::string, double> lexicon;
  std::unordered_map<std::string, double> boosters;  // signed increments
  std::set<std::string> negations;
  double alpha = 15.0;
  double booster_increment = 0.293;
  double negation_scalar = -0.74;
  double caps_increment = 0.733;
  double exclamation_increment = 0.292;
  int max_exclamations = 3;

  /// Default booster and negation word lists with an empty lexicon.
  static SentimentConfig defaults();
};

class LexiconError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads `token<TAB>valence[<TAB>...]` lines into `cfg.lexicon`.
SentimentConfig load_lexicon(const std::string& path, SentimentConfig cfg = SentimentConfig::defaults());
SentimentConfig parse_lexicon(const std::string& text, SentimentConfig cfg = SentimentConfig::defaults());

struct LexicalFields {
  double word_count = 0, sentence_count = 0, avg_word_length = 0, type_token_ratio = 0, MATTR = 0;
  double brunet_index = 0, honore_stat = 0, lexical_density = 0, idea_density = 0, content_function_ratio = 0;
  double pronoun_ratio = 0, Tense_Past = 0, Tense_Pres = 0, Voice_Pass = 0, Number_Plur = 0;
  double lemma_ttr = 0, upos_diversity = 0, morphological_richness = 0, propositional_density = 0;
  double filler_count = 0;
};

struct SyntacticFields {
  double mean_sentence_length = 0, mean_clause_length = 0, syntactic_depth_mean = 0, syntactic_depth_max = 0;
  double clause_ratio = 0, verb_tense_switches = 0, verb_tense_switch_ratio = 0, syntactic_embedding_depth = 0;
  double passive_voice_ratio = 0, mean_constituency_depth = 0, max_constituency_depth = 0;
};

/// Directed multigraph over word keys, nodes numbered by first appearance.
struct WordGraph {
  std::vector<std::string> nodes;
  std::map<std::pair<int, int>, int> edges;  // (from, to) -> multiplicity
  long long total_edges = 0;

  int add_node(const std::string& key);
  void add_edge(int from, int to);

 private:
  std::unordered_map<std::string, int> index_;
};

struct GraphFields {
  double graph_nodes = 0, graph_edges = 0, graph_repeated_edges = 0, graph_largest_scc = 0, graph_density = 0;
  double graph_loops_L1 = 0, graph_loops_L2 = 0, graph_loops_L3 = 0, graph_avg_total_degree = 0;
  double graph_diameter = 0, graph_avg_shortest_path = 0;
  double nodes_per_word = 0, edges_per_word = 0, atd_per_word = 0, parallel_edges_per_word = 0;
  double loops_L1_per_word = 0, loops_L2_per_word = 0, loops_L3_per_word = 0;
};

struct SemanticFields {
  double first_order_coherence = 0, second_order_coherence = 0, discourse_cohesion = 0,
         sentence_repetition_ratio = 0;
};

struct SentimentScores {
  double negative = 0, neutral = 0, positive = 0, compound = 0;
};

struct LinguisticFeatures {
  LexicalFields lexical;
  SyntacticFields syntactic;
  GraphFields graph;
  SemanticFields semantic;
  SentimentScores sentiment;
  bool has_trees = false;
  bool has_embeddings = false;

  /// The 56 manifest-named values, in manifest order.
  [[nodiscard]] std::vector<std::pair<std::string, double>> named() const;
  /// Manifest names whose inputs were absent (constituency or coherence columns).
  [[nodiscard]] std::vector<std::string> missing() const;
};

double brunet_index(double n_words, double vocabulary);
double honore_statistic(double n_words, double vocabulary, double hapax, double min_denominator = 0.01);
/// Moving-average TTR; equals plain TTR when the sequence is not longer than the window.
double mattr(const std::vector<std::string>& words, int window);

LexicalFields lexical_indices(const transcript::AnnotatedTranscript& t, const LinguisticConfig& cfg = {});
SyntacticFields syntactic_measures(const transcript::AnnotatedTranscript& t, const LinguisticConfig& cfg = {});
WordGraph build_word_graph(const transcript::AnnotatedTranscript& t, bool lemma_nodes = false);
GraphFields graph_metrics(const WordGraph& g, double word_count);
SemanticFields semantic_measures(const transcript::AnnotatedTranscript& t);
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);
SentimentScores sentiment_scores(const std::string& raw_text, const SentimentConfig& cfg);

LinguisticFeatures extract_linguistic(const transcript::AnnotatedTranscript& t, const SentimentConfig& sentiment,
                                      const LinguisticConfig& cfg = {});

std::string lowercase(std::string_view s);

}  // namespace voicemark::linguistic
