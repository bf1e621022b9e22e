#include "voicemark/linguistic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "voicemark/simd/kernels.hpp"

namespace voicemark::linguistic {
namespace {

using transcript::AnnotatedTranscript;
using transcript::Token;

const std::set<std::string> kContentUpos{"NOUN", "VERB", "ADJ", "ADV", "PROPN"};
const std::set<std::string> kPropositionUpos{"VERB", "ADJ", "ADV", "ADP", "CCONJ", "SCONJ"};

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80 ? 1 : 0;
  return n;
}

std::string lemma_key(const Token& tok) {
  return lowercase(tok.lemma.empty() || tok.lemma == "_" ? tok.form : tok.lemma);
}

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

bool all_caps(std::string_view w) {
  bool has_alpha = false;
  for (unsigned char c : w) {
    if (std::isalpha(c)) {
      has_alpha = true;
      if (!std::isupper(c)) return false;
    }
  }
  return has_alpha;
}

double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

std::string strip_punctuation(std::string_view w) {
  std::size_t a = 0;
  std::size_t b = w.size();
  while (a < b && std::ispunct(static_cast<unsigned char>(w[a]))) ++a;
  while (b > a && std::ispunct(static_cast<unsigned char>(w[b - 1]))) --b;
  return std::string(w.substr(a, b - a));
}

}  // namespace

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

SentimentConfig SentimentConfig::defaults() {
  SentimentConfig cfg;
  const double inc = cfg.booster_increment;
  for (const char* w : {"absolutely", "amazingly", "awfully", "completely", "considerably", "decidedly", "deeply",
                        "enormously", "entirely", "especially", "exceptionally", "extremely", "fabulously", "fully",
                        "greatly", "hella", "highly", "hugely", "incredibly", "intensely", "majorly", "more", "most",
                        "particularly", "purely", "quite", "really", "remarkably", "so", "substantially",
                        "thoroughly", "totally", "tremendously", "uber", "unbelievably", "unusually", "utterly",
                        "very"}) {
    cfg.boosters[w] = inc;
  }
  for (const char* w : {"almost", "barely", "hardly", "kinda", "kindof", "less", "little", "marginally",
                        "occasionally", "partly", "scarcely", "slightly", "somewhat", "sorta", "sortof"}) {
    cfg.boosters[w] = -inc;
  }
  cfg.negations = {"aint",     "arent",   "cannot",  "cant",    "couldnt", "darent", "didnt",   "doesnt",
                   "dont",     "hadnt",   "hasnt",   "havent",  "isnt",    "mightnt", "mustnt", "neither",
                   "neednt",   "never",   "none",    "nope",    "nor",     "not",     "nothing", "nowhere",
                   "oughtnt",  "shant",   "shouldnt", "uhuh",   "wasnt",   "werent",  "without", "wont",
                   "wouldnt",  "rarely",  "seldom",  "despite", "uh-uh"};
  return cfg;
}

SentimentConfig parse_lexicon(const std::string& text, SentimentConfig cfg) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw LexiconError("lexicon line " + std::to_string(line_no) + ": missing tab");
    const auto end = line.find('\t', tab + 1);
    const std::string value = line.substr(tab + 1, end == std::string::npos ? std::string::npos : end - tab - 1);
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
      cfg.lexicon[lowercase(line.substr(0, tab))] = v;
    } catch (const std::exception&) {
      throw LexiconError("lexicon line " + std::to_string(line_no) + ": bad valence '" + value + "'");
    }
  }
  if (cfg.lexicon.empty()) throw LexiconError("lexicon is empty");
  return cfg;
}

SentimentConfig load_lexicon(const std::string& path, SentimentConfig cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError("missing lexicon file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_lexicon(ss.str(), std::move(cfg));
}

double brunet_index(double n_words, double vocabulary) {
  if (n_words < 1 || vocabulary < 1) return 0.0;
  return std::pow(n_words, std::pow(vocabulary, -0.165));
}

double honore_statistic(double n_words, double vocabulary, double hapax, double min_denominator) {
  if (n_words < 1 || vocabulary < 1) return 0.0;
  const double denominator = std::max(min_denominator, 1.0 - hapax / vocabulary);
  return 100.0 * std::log(n_words) / denominator;
}

double mattr(const std::vector<std::string>& words, int window) {
  if (words.empty()) return 0.0;
  const auto w = static_cast<std::size_t>(std::max(1, window));
  if (words.size() <= w) {
    const std::unordered_set<std::string> types(words.begin(), words.end());
    return static_cast<double>(types.size()) / static_cast<double>(words.size());
  }
  std::unordered_map<std::string, int> counts;
  for (std::size_t i = 0; i < w; ++i) ++counts[words[i]];
  double total = static_cast<double>(counts.size()) / static_cast<double>(w);
  std::size_t windows = 1;
  for (std::size_t i = w; i < words.size(); ++i) {
    auto& out = counts[words[i - w]];
    if (--out == 0) counts.erase(words[i - w]);
    ++counts[words[i]];
    total += static_cast<double>(counts.size()) / static_cast<double>(w);
    ++windows;
  }
  return total / static_cast<double>(windows);
}

LexicalFields lexical_indices(const AnnotatedTranscript& t, const LinguisticConfig& cfg) {
  LexicalFields f;
  f.sentence_count = static_cast<double>(t.sentence_count());
  std::vector<std::string> forms;
  std::unordered_map<std::string, int> type_counts;
  std::unordered_set<std::string> lemmas, upos, feats;
  double chars = 0, content = 0, pronouns = 0, propositions = 0;
  for (const auto& sentence : t.sentences) {
    for (const auto& tok : sentence) {
      if (tok.is_punct()) continue;
      auto key = lowercase(tok.form);
      ++type_counts[key];
      if (cfg.fillers.count(key)) f.filler_count += 1;
      forms.push_back(std::move(key));
      chars += static_cast<double>(utf8_length(tok.form));
      lemmas.insert(lemma_key(tok));
      upos.insert(tok.upos);
      if (!tok.feats.empty()) feats.insert(tok.feats_string());
      if (kContentUpos.count(tok.upos)) content += 1;
      if (kPropositionUpos.count(tok.upos)) propositions += 1;
      if (tok.upos == "PRON") pronouns += 1;
      if (tok.has_feat("Tense", "Past")) f.Tense_Past += 1;
      if (tok.has_feat("Tense", "Pres")) f.Tense_Pres += 1;
      if (tok.has_feat("Voice", "Pass")) f.Voice_Pass += 1;
      if (tok.has_feat("Number", "Plur")) f.Number_Plur += 1;
    }
  }
  const auto n = static_cast<double>(forms.size());
  f.word_count = n;
  if (forms.empty()) return f;
  const auto v = static_cast<double>(type_counts.size());
  const auto hapax = static_cast<double>(
      std::count_if(type_counts.begin(), type_counts.end(), [](const auto& kv) { return kv.second == 1; }));
  f.avg_word_length = chars / n;
  f.type_token_ratio = v / n;
  f.MATTR = mattr(forms, cfg.mattr_window);
  f.brunet_index = brunet_index(n, v);
  f.honore_stat = honore_statistic(n, v, hapax, cfg.honore_min_denominator);
  f.lexical_density = content / n;
  const double function_words = n - content;
  f.content_function_ratio = function_words > 0 ? content / function_words : content;
  f.pronoun_ratio = pronouns / n;
  f.propositional_density = propositions / n;
  f.idea_density = f.propositional_density;
  f.lemma_ttr = static_cast<double>(lemmas.size()) / n;
  f.upos_diversity = static_cast<double>(upos.size()) / n;
  f.morphological_richness = static_cast<double>(feats.size()) / n;
  return f;
}

SyntacticFields syntactic_measures(const AnnotatedTranscript& t, const LinguisticConfig& cfg) {
  SyntacticFields f;
  const auto sentences = static_cast<double>(t.sentence_count());
  const auto words = static_cast<double>(t.word_count());
  double clauses = 0, depth_sum = 0, depth_max = 0;
  double tensed = 0, switches = 0, verbs = 0, passive = 0;
  std::optional<std::string> previous_tense;
  for (const auto& sentence : t.sentences) {
    std::vector<int> depth(sentence.size(), 0);
    int sentence_depth = 0;
    for (std::size_t i = 0; i < sentence.size(); ++i) {
      int d = 1;
      for (int cur = sentence[i].head; cur != 0; cur = sentence[static_cast<std::size_t>(cur - 1)].head) ++d;
      depth[i] = d;
      sentence_depth = std::max(sentence_depth, d);
    }
    depth_sum += sentence_depth;
    depth_max = std::max(depth_max, static_cast<double>(sentence_depth));
    for (const auto& tok : sentence) {
      if (cfg.clause_deprels.count(tok.deprel)) clauses += 1;
      if (tok.upos != "VERB") continue;
      verbs += 1;
      if (tok.has_feat("Voice", "Pass")) passive += 1;
      if (const auto tense = tok.feat("Tense")) {
        tensed += 1;
        if (previous_tense && *previous_tense != *tense) switches += 1;
        previous_tense = *tense;
      }
    }
  }
  f.mean_sentence_length = ratio(words, sentences);
  f.mean_clause_length = ratio(words, clauses);
  f.syntactic_depth_mean = ratio(depth_sum, sentences);
  f.syntactic_depth_max = depth_max;
  f.syntactic_embedding_depth = depth_max;
  f.clause_ratio = ratio(clauses, sentences);
  f.verb_tense_switches = switches;
  f.verb_tense_switch_ratio = ratio(switches, tensed);
  f.passive_voice_ratio = ratio(passive, verbs);
  if (t.trees && !t.trees->empty()) {
    double total = 0, deepest = 0;
    for (const auto& tree : *t.trees) {
      const double d = tree.depth();
      total += d;
      deepest = std::max(deepest, d);
    }
    f.mean_constituency_depth = total / static_cast<double>(t.trees->size());
    f.max_constituency_depth = deepest;
  }
  return f;
}

int WordGraph::add_node(const std::string& key) {
  const auto [it, inserted] = index_.emplace(key, static_cast<int>(nodes.size()));
  if (inserted) nodes.push_back(key);
  return it->second;
}

void WordGraph::add_edge(int from, int to) {
  ++edges[{from, to}];
  ++total_edges;
}

WordGraph build_word_graph(const AnnotatedTranscript& t, bool lemma_nodes) {
  WordGraph g;
  for (const auto& sentence : t.sentences) {
    int previous = -1;
    for (const auto& tok : sentence) {
      if (tok.is_punct()) continue;
      const int node = g.add_node(lemma_nodes ? lemma_key(tok) : lowercase(tok.form));
      if (previous >= 0) g.add_edge(previous, node);
      previous = node;
    }
  }
  return g;
}

GraphFields graph_metrics(const WordGraph& g, double word_count) {
  GraphFields f;
  const int n = static_cast<int>(g.nodes.size());
  f.graph_nodes = n;
  f.graph_edges = static_cast<double>(g.total_edges);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n)), in(static_cast<std::size_t>(n)),
      undirected(static_cast<std::size_t>(n));
  double distinct_non_loop = 0;
  for (const auto& [edge, count] : g.edges) {
    const auto [u, v] = edge;
    if (count >= 2) f.graph_repeated_edges += 1;
    if (u == v) {
      f.graph_loops_L1 += 1;
      continue;
    }
    distinct_non_loop += 1;
    out[static_cast<std::size_t>(u)].push_back(v);
    in[static_cast<std::size_t>(v)].push_back(u);
    if (u < v && g.edges.count({v, u})) f.graph_loops_L2 += 1;
    if (!g.edges.count({v, u}) || u < v) {
      undirected[static_cast<std::size_t>(u)].push_back(v);
      undirected[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  if (n > 1) f.graph_density = distinct_non_loop / (static_cast<double>(n) * (n - 1));
  if (n > 0) f.graph_avg_total_degree = 2.0 * f.graph_edges / n;

  // Directed 3-cycles, each counted once from its smallest node.
  for (int u = 0; u < n; ++u) {
    for (int v : out[static_cast<std::size_t>(u)]) {
      if (v <= u) continue;
      for (int w : out[static_cast<std::size_t>(v)]) {
        if (w <= u || w == v) continue;
        if (g.edges.count({w, u})) f.graph_loops_L3 += 1;
      }
    }
  }

  // Kosaraju SCC, iterative.
  if (n > 0) {
    std::vector<int> order;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int s = 0; s < n; ++s) {
      if (seen[static_cast<std::size_t>(s)]) continue;
      std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
      seen[static_cast<std::size_t>(s)] = 1;
      while (!stack.empty()) {
        auto& [node, next] = stack.back();
        const auto& adj = out[static_cast<std::size_t>(node)];
        if (next < adj.size()) {
          const int child = adj[next++];
          if (!seen[static_cast<std::size_t>(child)]) {
            seen[static_cast<std::size_t>(child)] = 1;
            stack.emplace_back(child, 0);
          }
        } else {
          order.push_back(node);
          stack.pop_back();
        }
      }
    }
    std::vector<int> component(static_cast<std::size_t>(n), -1);
    int largest = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (component[static_cast<std::size_t>(*it)] >= 0) continue;
      int size = 0;
      std::vector<int> stack{*it};
      component[static_cast<std::size_t>(*it)] = *it;
      while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        ++size;
        for (int prev : in[static_cast<std::size_t>(node)]) {
          if (component[static_cast<std::size_t>(prev)] < 0) {
            component[static_cast<std::size_t>(prev)] = *it;
            stack.push_back(prev);
          }
        }
      }
      largest = std::max(largest, size);
    }
    f.graph_largest_scc = largest;
  }

  // Largest weakly connected component (ties: the one holding the lowest node id).
  if (n > 1) {
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    int best_label = -1;
    std::size_t best_size = 0;
    std::vector<std::vector<int>> members;
    for (int s = 0; s < n; ++s) {
      if (label[static_cast<std::size_t>(s)] >= 0) continue;
      const int id = static_cast<int>(members.size());
      members.emplace_back();
      std::vector<int> stack{s};
      label[static_cast<std::size_t>(s)] = id;
      while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        members.back().push_back(node);
        for (int nb : undirected[static_cast<std::size_t>(node)]) {
          if (label[static_cast<std::size_t>(nb)] < 0) {
            label[static_cast<std::size_t>(nb)] = id;
            stack.push_back(nb);
          }
        }
      }
      if (members.back().size() > best_size) {
        best_size = members.back().size();
        best_label = id;
      }
    }
    if (best_size > 1) {
      const auto& nodes = members[static_cast<std::size_t>(best_label)];
      std::vector<int> dist(static_cast<std::size_t>(n), -1);
      long long total = 0;
      int diameter = 0;
      for (int s : nodes) {
        for (int v : nodes) dist[static_cast<std::size_t>(v)] = -1;
        std::vector<int> queue{s};
        dist[static_cast<std::size_t>(s)] = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
          const int node = queue[head];
          for (int nb : undirected[static_cast<std::size_t>(node)]) {
            if (dist[static_cast<std::size_t>(nb)] < 0) {
              dist[static_cast<std::size_t>(nb)] = dist[static_cast<std::size_t>(node)] + 1;
              queue.push_back(nb);
            }
          }
        }
        for (int v : nodes) {
          total += dist[static_cast<std::size_t>(v)];
          diameter = std::max(diameter, dist[static_cast<std::size_t>(v)]);
        }
      }
      const auto k = static_cast<double>(nodes.size());
      f.graph_diameter = diameter;
      f.graph_avg_shortest_path = static_cast<double>(total) / (k * (k - 1));
    }
  }

  f.nodes_per_word = ratio(f.graph_nodes, word_count);
  f.edges_per_word = ratio(f.graph_edges, word_count);
  f.atd_per_word = ratio(f.graph_avg_total_degree, word_count);
  f.parallel_edges_per_word = ratio(f.graph_repeated_edges, word_count);
  f.loops_L1_per_word = ratio(f.graph_loops_L1, word_count);
  f.loops_L2_per_word = ratio(f.graph_loops_L2, word_count);
  f.loops_L3_per_word = ratio(f.graph_loops_L3, word_count);
  return f;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  const double na = std::sqrt(simd::sum_squares(a));
  const double nb = std::sqrt(simd::sum_squares(b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return simd::dot(a, b) / (na * nb);
}

SemanticFields semantic_measures(const AnnotatedTranscript& t) {
  SemanticFields f;
  const std::size_t s = t.sentence_count();
  if (t.embeddings && t.embeddings->size() == s) {
    const auto& e = *t.embeddings;
    auto lagged = [&](std::size_t lag) {
      if (s <= lag) return 0.0;
      double total = 0;
      for (std::size_t i = 0; i + lag < s; ++i) total += cosine_similarity(e[i], e[i + lag]);
      return total / static_cast<double>(s - lag);
    };
    f.first_order_coherence = lagged(1);
    f.second_order_coherence = lagged(2);
  }
  std::vector<std::set<std::string>> lemma_sets;
  std::set<std::string> seen;
  double repeats = 0;
  for (const auto& sentence : t.sentences) {
    std::set<std::string> lemmas;
    std::string normalized;
    for (const auto& tok : sentence) {
      if (tok.is_punct()) continue;
      lemmas.insert(lemma_key(tok));
      if (!normalized.empty()) normalized += ' ';
      normalized += lowercase(tok.form);
    }
    if (!seen.insert(normalized).second) repeats += 1;
    lemma_sets.push_back(std::move(lemmas));
  }
  if (s >= 2) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < s; ++i) {
      const auto& a = lemma_sets[i];
      const auto& b = lemma_sets[i + 1];
      std::vector<std::string> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      const double uni = static_cast<double>(a.size() + b.size() - common.size());
      total += uni > 0 ? static_cast<double>(common.size()) / uni : 0.0;
    }
    f.discourse_cohesion = total / static_cast<double>(s - 1);
  }
  f.sentence_repetition_ratio = ratio(repeats, static_cast<double>(s));
  return f;
}

SentimentScores sentiment_scores(const std::string& raw_text, const SentimentConfig& cfg) {
  SentimentScores out;
  std::vector<std::string> words;
  {
    std::istringstream in(raw_text);
    std::string w;
    while (in >> w) {
      auto stripped = strip_punctuation(w);
      if (!stripped.empty()) words.push_back(std::move(stripped));
    }
  }
  if (words.empty()) return out;
  const bool any_caps = std::any_of(words.begin(), words.end(), all_caps);
  const bool any_plain = std::any_of(words.begin(), words.end(), [](const auto& w) { return !all_caps(w); });
  const bool caps_differ = any_caps && any_plain;

  auto is_negation = [&](const std::string& lower) {
    return cfg.negations.count(lower) > 0 || lower.ends_with("n't");
  };

  std::vector<double> valences;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto lower = lowercase(words[i]);
    double v = 0.0;
    if (!cfg.boosters.count(lower)) {
      if (const auto it = cfg.lexicon.find(lower); it != cfg.lexicon.end()) v = it->second;
    }
    if (v != 0.0) {
      if (caps_differ && all_caps(words[i])) v += sign_of(v) * cfg.caps_increment;
      for (std::size_t d = 1; d <= 2 && d <= i; ++d) {
        const auto b = cfg.boosters.find(lowercase(words[i - d]));
        if (b == cfg.boosters.end()) continue;
        double scalar = v < 0 ? -b->second : b->second;
        if (d == 2) scalar *= 0.95;
        v += scalar;
      }
      bool negated = false;
      for (std::size_t d = 1; d <= 3 && d <= i; ++d) negated = negated || is_negation(lowercase(words[i - d]));
      if (negated) v *= cfg.negation_scalar;
    }
    valences.push_back(v);
  }

  double total = 0.0;
  for (double v : valences) total += v;
  const auto bangs = std::min<std::ptrdiff_t>(cfg.max_exclamations, std::count(raw_text.begin(), raw_text.end(), '!'));
  const double emphasis = static_cast<double>(bangs) * cfg.exclamation_increment;
  if (total != 0.0) {
    total += sign_of(total) * emphasis;
    out.compound = std::clamp(total / std::sqrt(total * total + cfg.alpha), -1.0, 1.0);
  }

  double pos = 0, neg = 0, neu = 0;
  for (double v : valences) {
    if (v > 0) {
      pos += v + 1.0;
    } else if (v < 0) {
      neg += v - 1.0;
    } else {
      neu += 1.0;
    }
  }
  if (pos > std::fabs(neg)) {
    pos += emphasis;
  } else if (pos < std::fabs(neg)) {
    neg -= emphasis;
  }
  const double mass = pos + std::fabs(neg) + neu;
  if (mass > 0) {
    out.positive = pos / mass;
    out.negative = std::fabs(neg) / mass;
    out.neutral = neu / mass;
  }
  return out;
}

std::vector<std::pair<std::string, double>> LinguisticFeatures::named() const {
  const auto& l = lexical;
  const auto& s = syntactic;
  const auto& g = graph;
  const auto& m = semantic;
  return {{"filler_count", l.filler_count},
          {"word_count", l.word_count},
          {"sentence_count", l.sentence_count},
          {"type_token_ratio", l.type_token_ratio},
          {"MATTR", l.MATTR},
          {"brunet_index", l.brunet_index},
          {"honore_stat", l.honore_stat},
          {"lexical_density", l.lexical_density},
          {"idea_density", l.idea_density},
          {"content_function_ratio", l.content_function_ratio},
          {"pronoun_ratio", l.pronoun_ratio},
          {"Tense_Past", l.Tense_Past},
          {"Tense_Pres", l.Tense_Pres},
          {"Voice_Pass", l.Voice_Pass},
          {"Number_Plur", l.Number_Plur},
          {"lemma_ttr", l.lemma_ttr},
          {"upos_diversity", l.upos_diversity},
          {"morphological_richness", l.morphological_richness},
          {"propositional_density", l.propositional_density},
          {"mean_sentence_length", s.mean_sentence_length},
          {"mean_clause_length", s.mean_clause_length},
          {"syntactic_depth_mean", s.syntactic_depth_mean},
          {"syntactic_depth_max", s.syntactic_depth_max},
          {"clause_ratio", s.clause_ratio},
          {"verb_tense_switches", s.verb_tense_switches},
          {"verb_tense_switch_ratio", s.verb_tense_switch_ratio},
          {"syntactic_embedding_depth", s.syntactic_embedding_depth},
          {"passive_voice_ratio", s.passive_voice_ratio},
          {"graph_nodes", g.graph_nodes},
          {"graph_edges", g.graph_edges},
          {"graph_repeated_edges", g.graph_repeated_edges},
          {"graph_largest_scc", g.graph_largest_scc},
          {"graph_density", g.graph_density},
          {"graph_loops_L1", g.graph_loops_L1},
          {"graph_loops_L2", g.graph_loops_L2},
          {"graph_loops_L3", g.graph_loops_L3},
          {"graph_avg_total_degree", g.graph_avg_total_degree},
          {"graph_diameter", g.graph_diameter},
          {"graph_avg_shortest_path", g.graph_avg_shortest_path},
          {"nodes_per_word", g.nodes_per_word},
          {"edges_per_word", g.edges_per_word},
          {"atd_per_word", g.atd_per_word},
          {"parallel_edges_per_word", g.parallel_edges_per_word},
          {"loops_L1_per_word", g.loops_L1_per_word},
          {"loops_L2_per_word", g.loops_L2_per_word},
          {"loops_L3_per_word", g.loops_L3_per_word},
          {"mean_constituency_depth", s.mean_constituency_depth},
          {"max_constituency_depth", s.max_constituency_depth},
          {"first_order_coherence", m.first_order_coherence},
          {"second_order_coherence", m.second_order_coherence},
          {"discourse_cohesion", m.discourse_cohesion},
          {"sentence_repetition_ratio", m.sentence_repetition_ratio},
          {"vader_negative", sentiment.negative},
          {"vader_neutral", sentiment.neutral},
          {"vader_positive", sentiment.positive},
          {"vader_compound", sentiment.compound}};
}

std::vector<std::string> LinguisticFeatures::missing() const {
  std::vector<std::string> out;
  if (!has_trees) {
    out.emplace_back("mean_constituency_depth");
    out.emplace_back("max_constituency_depth");
  }
  if (!has_embeddings) {
    out.emplace_back("first_order_coherence");
    out.emplace_back("second_order_coherence");
  }
  return out;
}

LinguisticFeatures extract_linguistic(const AnnotatedTranscript& t, const SentimentConfig& sentiment,
                                      const LinguisticConfig& cfg) {
  LinguisticFeatures f;
  f.lexical = lexical_indices(t, cfg);
  f.syntactic = syntactic_measures(t, cfg);
  f.graph = graph_metrics(build_word_graph(t, cfg.graph_lemma_nodes), f.lexical.word_count);
  f.semantic = semantic_measures(t);
  f.sentiment = sentiment_scores(t.text(), sentiment);
  f.has_trees = t.trees.has_value();
  f.has_embeddings = t.embeddings.has_value();
  return f;
}

}  // namespace voicemark::linguistic
