#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "voicemark/dataset.hpp"
#include "voicemark/feature_matrix.hpp"

namespace voicemark::synthetic {

/// Portable standard normal draws (Box-Muller over 53-bit uniforms).
class Normal {
 public:
  explicit Normal(std::uint64_t seed) : rng_(seed) {}
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()();
  std::uint64_t bits() { return rng_(); }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct FeatureSynthConfig {
  int subjects = 60;  // half positive
  int recordings = 3;
  double shift = 1.0;  // in per-recording SD units, added for positive subjects
  std::vector<std::string> shifted{"F0_std", "Jitter_local", "MATTR", "graph_nodes", "vader_compound"};
  std::uint64_t seed = 0;
};

/// Per-recording manifest-shaped matrix of N(0, 1) values with class shifts in `shifted`.
FeatureMatrix synth_features(const FeatureSynthConfig& config = {});

struct CorpusSynthConfig {
  int subjects = 4;  // half positive
  int recordings = 2;
  int sample_rate = 22050;
  int trees_missing_every = 0;  // drop trees for every n-th recording when > 0
  std::uint64_t seed = 0;
};

struct CorpusFiles {
  std::string root;
  std::string index;     // corpus.csv
  std::string external;  // external.csv
  std::string labels;    // labels.csv (PHQ-9 scores)
  std::string lexicon;   // lexicon.tsv
  std::vector<std::string> recording_ids;
};

/// Writes WAV, CoNLL-U, bracketed trees, embedding JSONL, external, label and lexicon files under `root`.
CorpusFiles synth_corpus(const std::string& root, const CorpusSynthConfig& config = {});

}  // namespace voicemark::synthetic
