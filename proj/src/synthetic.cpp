#include "voicemark/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "voicemark/audio.hpp"

namespace voicemark::synthetic {
namespace {

namespace fs = std::filesystem;

struct Word {
  std::string form, lemma;
};

struct Tok {
  std::string form, lemma, upos, xpos, feats;
  int head;
  std::string deprel;
};

struct SentenceDraft {
  std::vector<Tok> tokens;
  std::string tree;
};

const std::vector<Word> kSubjects{{"I", "I"}, {"she", "she"}, {"he", "he"}, {"we", "we"}, {"they", "they"}};
const std::vector<Word> kPastVerbs{{"saw", "see"},   {"found", "find"}, {"liked", "like"}, {"made", "make"},
                                   {"took", "take"}, {"lost", "lose"},  {"wanted", "want"}};
const std::vector<Word> kPresentVerbs{{"run", "run"},   {"sleep", "sleep"}, {"play", "play"},
                                      {"talk", "talk"}, {"wait", "wait"},   {"work", "work"}};
const std::vector<Word> kParticiples{{"chased", "chase"}, {"seen", "see"}, {"found", "find"}, {"taken", "take"},
                                     {"helped", "help"}};
const std::vector<Word> kNouns{{"cat", "cat"},       {"dog", "dog"}, {"house", "house"}, {"car", "car"},
                               {"book", "book"},     {"job", "job"}, {"day", "day"},     {"room", "room"},
                               {"friend", "friend"}, {"city", "city"}};
const std::vector<Word> kPluralNouns{{"dogs", "dog"},       {"cats", "cat"}, {"people", "person"},
                                     {"friends", "friend"}, {"kids", "kid"}, {"birds", "bird"}};
const std::vector<std::string> kAdjectives{"old", "big", "small", "new", "red", "quiet"};
const std::vector<std::string> kAdverbs{"quickly", "slowly", "often", "loudly", "well"};
const std::vector<std::string> kMoods{"happy", "sad", "good", "bad", "tired", "great", "awful", "calm", "angry", "fine"};

const char* kLexicon =
    "happy\t2.7\nsad\t-2.1\ngood\t1.9\nbad\t-2.5\ntired\t-1.9\ngreat\t3.1\nawful\t-2.0\ncalm\t1.3\n"
    "angry\t-2.3\nfine\t0.8\nlike\t2.0\nliked\t1.8\nlost\t-1.3\nfriend\t2.2\nfriends\t2.1\nhelped\t1.7\n"
    "chased\t-0.4\nwanted\t0.3\nquiet\t0.2\nwell\t1.1\n";

template <typename T>
const T& pick(const std::vector<T>& v, Normal& rng) {
  return v[static_cast<std::size_t>(rng.bits() % v.size())];
}


SentenceDraft draft_sentence(int kind, Normal& rng) {
  SentenceDraft s;
  switch (kind) {
    case 0: {
      const Word& p = pick(kSubjects, rng);
      const Word& v = pick(kPastVerbs, rng);
      const std::string& a = pick(kAdjectives, rng);
      const Word& n = pick(kNouns, rng);
      s.tokens = {{p.form, p.lemma, "PRON", "PRP", "PronType=Prs", 2, "nsubj"},
                  {v.form, v.lemma, "VERB", "VBD", "Mood=Ind|Tense=Past|VerbForm=Fin", 0, "root"},
                  {"the", "the", "DET", "DT", "Definite=Def|PronType=Art", 5, "det"},
                  {a, a, "ADJ", "JJ", "Degree=Pos", 5, "amod"},
                  {n.form, n.lemma, "NOUN", "NN", "Number=Sing", 2, "obj"},
                  {".", ".", "PUNCT", ".", "", 2, "punct"}};
      s.tree = "(ROOT (S (NP (PRP " + p.form + ")) (VP (VBD " + v.form + ") (NP (DT the) (JJ " + a + ") (NN " + n.form +
               "))) (. .)))";
      break;
    }
    case 1: {
      const Word& n = pick(kPluralNouns, rng);
      const Word& v = pick(kPresentVerbs, rng);
      const std::string& adv = pick(kAdverbs, rng);
      s.tokens = {{n.form, n.lemma, "NOUN", "NNS", "Number=Plur", 2, "nsubj"},
                  {v.form, v.lemma, "VERB", "VBP", "Mood=Ind|Number=Plur|Person=3|Tense=Pres|VerbForm=Fin", 0, "root"},
                  {adv, adv, "ADV", "RB", "", 2, "advmod"},
                  {".", ".", "PUNCT", ".", "", 2, "punct"}};
      s.tree = "(ROOT (S (NP (NNS " + n.form + ")) (VP (VBP " + v.form + ") (ADVP (RB " + adv + "))) (. .)))";
      break;
    }
    case 2: {
      const Word& n = pick(kNouns, rng);
      const Word& v = pick(kParticiples, rng);
      const Word& agent = pick(kPluralNouns, rng);
      s.tokens = {{"the", "the", "DET", "DT", "Definite=Def|PronType=Art", 2, "det"},
                  {n.form, n.lemma, "NOUN", "NN", "Number=Sing", 4, "nsubj:pass"},
                  {"was", "be", "AUX", "VBD", "Mood=Ind|Number=Sing|Person=3|Tense=Past|VerbForm=Fin", 4, "aux:pass"},
                  {v.form, v.lemma, "VERB", "VBN", "Tense=Past|VerbForm=Part|Voice=Pass", 0, "root"},
                  {"by", "by", "ADP", "IN", "", 7, "case"},
                  {"the", "the", "DET", "DT", "Definite=Def|PronType=Art", 7, "det"},
                  {agent.form, agent.lemma, "NOUN", "NNS", "Number=Plur", 4, "obl:agent"},
                  {".", ".", "PUNCT", ".", "", 4, "punct"}};
      s.tree = "(ROOT (S (NP (DT the) (NN " + n.form + ")) (VP (VBD was) (VP (VBN " + v.form +
               ") (PP (IN by) (NP (DT the) (NNS " + agent.form + "))))) (. .)))";
      break;
    }
    case 3: {
      const Word& p = pick(kSubjects, rng);
      const Word& v = pick(kPastVerbs, rng);
      s.tokens = {{"um", "um", "INTJ", "UH", "", 3, "discourse"},
                  {"I", "I", "PRON", "PRP", "Case=Nom|Number=Sing|Person=1|PronType=Prs", 3, "nsubj"},
                  {"think", "think", "VERB", "VBP", "Mood=Ind|Tense=Pres|VerbForm=Fin", 0, "root"},
                  {"that", "that", "SCONJ", "IN", "", 6, "mark"},
                  {p.form, p.lemma, "PRON", "PRP", "PronType=Prs", 6, "nsubj"},
                  {v.form, v.lemma, "VERB", "VBD", "Mood=Ind|Tense=Past|VerbForm=Fin", 3, "ccomp"},
                  {".", ".", "PUNCT", ".", "", 3, "punct"}};
      s.tree = "(ROOT (S (INTJ (UH um)) (NP (PRP I)) (VP (VBP think) (SBAR (IN that) (S (NP (PRP " + p.form +
               ")) (VP (VBD " + v.form + "))))) (. .)))";
      break;
    }
    default: {
      const std::string& m1 = pick(kMoods, rng);
      const Word& n = pick(kNouns, rng);
      const std::string& m2 = pick(kMoods, rng);
      s.tokens = {{"I", "I", "PRON", "PRP", "Case=Nom|Number=Sing|Person=1|PronType=Prs", 2, "nsubj"},
                  {"feel", "feel", "VERB", "VBP", "Mood=Ind|Tense=Pres|VerbForm=Fin", 0, "root"},
                  {m1, m1, "ADJ", "JJ", "Degree=Pos", 2, "xcomp"},
                  {"because", "because", "SCONJ", "IN", "", 8, "mark"},
                  {"the", "the", "DET", "DT", "Definite=Def|PronType=Art", 6, "det"},
                  {n.form, n.lemma, "NOUN", "NN", "Number=Sing", 8, "nsubj"},
                  {"was", "be", "AUX", "VBD", "Mood=Ind|Number=Sing|Person=3|Tense=Past|VerbForm=Fin", 8, "cop"},
                  {m2, m2, "ADJ", "JJ", "Degree=Pos", 2, "advcl"},
                  {".", ".", "PUNCT", ".", "", 2, "punct"}};
      s.tree = "(ROOT (S (NP (PRP I)) (VP (VBP feel) (ADJP (JJ " + m1 + ")) (SBAR (IN because) (S (NP (DT the) (NN " +
               n.form + ")) (VP (VBD was) (ADJP (JJ " + m2 + ")))))) (. .)))";
      break;
    }
  }
  return s;
}

std::string sentence_text(const SentenceDraft& s) {
  std::string out;
  for (const Tok& t : s.tokens) {
    if (!out.empty() && t.upos != "PUNCT") out.push_back(' ');
    out += t.form;
  }
  return out;
}

std::string conllu_block(const SentenceDraft& s, int sent_id) {
  std::ostringstream out;
  out << "# sent_id = " << sent_id << "\n# text = " << sentence_text(s) << "\n";
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    const Tok& t = s.tokens[i];
    out << (i + 1) << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t' << t.xpos << '\t'
        << (t.feats.empty() ? "_" : t.feats) << '\t' << t.head << '\t' << t.deprel << "\t_\t_\n";
  }
  out << "\n";
  return out.str();
}

std::vector<double> bag_embedding(const SentenceDraft& s, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim), 0.0);
  for (const Tok& t : s.tokens) {
    if (t.upos == "PUNCT") continue;
    std::uint64_t h = dataset::fnv1a64(t.lemma);
    for (auto& x : v) {
      h ^= h >> 33;
      h *= 0xff51afd7ed558ccdULL;
      h ^= h >> 33;
      x += static_cast<double>(h >> 11) * 0x1.0p-53 - 0.5;
    }
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (auto& x : v) x /= norm;
  }
  return v;
}

// Harmonic voiced segments separated by near-silent gaps.
std::vector<double> synth_speech(double base_f0, int sample_rate, Normal& rng) {
  const double sr = sample_rate;
  std::vector<double> out;
  const double gaps[] = {0.3, 0.5, 0.8, 1.2, 1.6, 2.3};
  const int segments = 3 + static_cast<int>(rng.bits() % 3);
  double phase = 0.0;
  for (int s = 0; s < segments; ++s) {
    const double seg = 0.35 + 0.5 * rng.uniform();
    const auto n = static_cast<std::size_t>(seg * sr);
    const double f0 = base_f0 * (0.9 + 0.2 * rng.uniform());
    const double vibrato = 2.0 + 3.0 * rng.uniform();
    const double level = 0.5 + 0.4 * rng.uniform();
    const auto ramp = static_cast<std::size_t>(0.01 * sr);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sr;
      const double f = f0 * (1.0 + 0.03 * std::sin(2.0 * std::numbers::pi * vibrato * t));
      phase += 2.0 * std::numbers::pi * f / sr;
      double v = 0.0;
      for (int h = 1; h <= 5; ++h) v += std::sin(h * phase) / h;
      double env = level;
      if (i < ramp) env *= static_cast<double>(i) / static_cast<double>(ramp);
      if (n - i < ramp) env *= static_cast<double>(n - i) / static_cast<double>(ramp);
      out.push_back(0.45 * env * v + 0.002 * rng());
    }
    if (s + 1 < segments) {
      const double gap = gaps[rng.bits() % std::size(gaps)];
      const auto g = static_cast<std::size_t>(gap * sr);
      for (std::size_t i = 0; i < g; ++i) out.push_back(1e-4 * rng());
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string subject_name(int s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%03d", s + 1);
  return buf;
}

}  // namespace

double Normal::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

FeatureMatrix synth_features(const FeatureSynthConfig& config) {
  if (config.subjects < 2 || config.recordings < 1) throw std::invalid_argument("synth: need subjects >= 2, recordings >= 1");
  const auto& manifest = dataset::default_manifest();
  FeatureMatrix X;
  X.columns = manifest.names();
  std::vector<bool> shifted(X.cols(), false);
  for (const auto& name : config.shifted) {
    const auto c = X.column_index(name);
    if (c < 0) throw std::invalid_argument("synth: unknown feature " + name);
    shifted[static_cast<std::size_t>(c)] = true;
  }
  Normal rng(config.seed);
  std::vector<double> row(X.cols());
  for (int s = 0; s < config.subjects; ++s) {
    const int label = s % 2;
    const std::string subject = subject_name(s);
    for (int r = 0; r < config.recordings; ++r) {
      for (std::size_t c = 0; c < X.cols(); ++c) row[c] = rng() + (shifted[c] && label == 1 ? config.shift : 0.0);
      X.append_row(subject + "_R" + std::to_string(r + 1), subject, row, label);
    }
  }
  return X;
}

CorpusFiles synth_corpus(const std::string& root_dir, const CorpusSynthConfig& config) {
  if (config.subjects < 1 || config.recordings < 1) throw std::invalid_argument("synth: empty corpus requested");
  const fs::path root(root_dir);
  for (const char* sub : {"audio", "conllu", "trees", "embeddings"}) fs::create_directories(root / sub);
  Normal rng(config.seed);

  CorpusFiles files;
  files.root = root.string();
  files.index = (root / "corpus.csv").string();
  files.external = (root / "external.csv").string();
  files.labels = (root / "labels.csv").string();
  files.lexicon = (root / "lexicon.tsv").string();
  write_file(files.lexicon, kLexicon);

  std::string index = "recording_id,subject_id,audio,conllu,trees,embeddings\n";
  std::string external = "recording_id,emotion_neu,emotion_hap,emotion_ang,emotion_sad,sarcasm_prob\n";
  std::string labels = "recording_id,subject_id,score\n";
  int counter = 0;
  for (int s = 0; s < config.subjects; ++s) {
    const std::string subject = subject_name(s);
    const bool positive = s % 2 == 1;
    const double base_f0 = 100.0 + 120.0 * rng.uniform();
    const int score = positive ? 15 + static_cast<int>(rng.bits() % 13) : static_cast<int>(rng.bits() % 15);
    for (int r = 0; r < config.recordings; ++r, ++counter) {
      const std::string id = subject + "_R" + std::to_string(r + 1);
      files.recording_ids.push_back(id);

      const auto samples = synth_speech(base_f0, config.sample_rate, rng);
      audio::write_wav((root / "audio" / (id + ".wav")).string(),
                       audio::AudioBuffer{samples, config.sample_rate}, audio::WavEncoding::Pcm16);

      const int n_sentences = 4 + static_cast<int>(rng.bits() % 5);
      std::string conllu, trees, embeddings;
      std::vector<SentenceDraft> drafts;
      for (int k = 0; k < n_sentences; ++k) {
        if (!drafts.empty() && rng.uniform() < 0.15) {
          drafts.push_back(drafts.back());
        } else {
          drafts.push_back(draft_sentence(static_cast<int>(rng.bits() % 5), rng));
        }
      }
      for (std::size_t k = 0; k < drafts.size(); ++k) {
        conllu += conllu_block(drafts[k], static_cast<int>(k) + 1);
        trees += drafts[k].tree + "\n";
        nlohmann::json rec = {{"index", k}, {"vector", bag_embedding(drafts[k], 8)}};
        embeddings += rec.dump() + "\n";
      }
      const bool drop_trees = config.trees_missing_every > 0 && (counter + 1) % config.trees_missing_every == 0;
      write_file(root / "conllu" / (id + ".conllu"), conllu);
      if (!drop_trees) write_file(root / "trees" / (id + ".tree"), trees);
      write_file(root / "embeddings" / (id + ".jsonl"), embeddings);
      index += id + "," + subject + ",audio/" + id + ".wav,conllu/" + id + ".conllu," +
               (drop_trees ? std::string() : "trees/" + id + ".tree") + ",embeddings/" + id + ".jsonl\n";

      double e[4];
      double sum = 0.0;
      for (double& x : e) {
        x = 0.05 + rng.uniform();
        sum += x;
      }
      external += id;
      for (double x : e) external += "," + dataset::format_value(x / sum);
      external += "," + dataset::format_value(rng.uniform()) + "\n";
      labels += id + "," + subject + "," + std::to_string(score) + "\n";
    }
  }
  write_file(files.index, index);
  write_file(files.external, external);
  write_file(files.labels, labels);
  return files;
}

}  // namespace voicemark::synthetic
