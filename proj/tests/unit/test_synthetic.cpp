#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "voicemark/dataset.hpp"
#include "voicemark/pipeline.hpp"
#include "voicemark/synthetic.hpp"
#include "voicemark/transcript.hpp"

using namespace voicemark;
using namespace voicemark::synthetic;

TEST_SUITE("synthetic") {
  TEST_CASE("normal draws") {
    Normal g(42);
    const int n = 200000;
    double sum = 0, sq = 0, cube = 0;
    int beyond2 = 0;
    for (int i = 0; i < n; ++i) {
      const double x = g();
      sum += x;
      sq += x * x;
      cube += x * x * x;
      beyond2 += std::fabs(x) > 2.0;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(std::fabs(sq / n - 1.0) < 0.015);
    CHECK(std::fabs(cube / n) < 0.03);
    CHECK(std::fabs(static_cast<double>(beyond2) / n - 0.0455) < 0.003);
    Normal a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    Normal u(1);
    for (int i = 0; i < 1000; ++i) {
      const double v = u.uniform();
      CHECK(v >= 0.0);
      CHECK(v < 1.0);
    }
  }

  TEST_CASE("feature generator shape") {
    const auto X = synth_features();
    CHECK(X.rows() == 180);
    CHECK(X.columns == dataset::default_manifest().names());
    CHECK(std::set<std::string>(X.subject_ids.begin(), X.subject_ids.end()).size() == 60);
    int pos = 0;
    for (std::size_t r = 0; r < X.rows(); r += 3) pos += X.labels[r];
    CHECK(pos == 30);
    CHECK(X.row_ids[0] == "S001_R1");
    CHECK(X.subject_ids[179] == "S060");
  }

  TEST_CASE("feature generator shifts only the named columns") {
    FeatureSynthConfig cfg;
    cfg.subjects = 2000;
    cfg.recordings = 1;
    cfg.shift = 1.0;
    cfg.seed = 3;
    const auto X = synth_features(cfg);
    for (std::size_t c = 0; c < X.cols(); ++c) {
      double m[2] = {0, 0};
      for (std::size_t r = 0; r < X.rows(); ++r) m[X.labels[r]] += X.at(r, c);
      const double diff = (m[1] - m[0]) / 1000.0;
      const bool shifted = std::find(cfg.shifted.begin(), cfg.shifted.end(), X.columns[c]) != cfg.shifted.end();
      CHECK(std::fabs(diff - (shifted ? 1.0 : 0.0)) < 0.2);
    }
  }

  TEST_CASE("feature generator determinism") {
    FeatureSynthConfig cfg;
    cfg.seed = 11;
    CHECK(dataset::feature_csv(synth_features(cfg)) == dataset::feature_csv(synth_features(cfg)));
    auto other = cfg;
    other.seed = 12;
    CHECK(dataset::feature_csv(synth_features(cfg)) != dataset::feature_csv(synth_features(other)));
    auto bad = cfg;
    bad.shifted = {"no_such_feature"};
    CHECK_THROWS_AS(synth_features(bad), std::invalid_argument);
    bad = cfg;
    bad.subjects = 1;
    CHECK_THROWS_AS(synth_features(bad), std::invalid_argument);
  }

  TEST_CASE("corpus generator") {
    const auto root = (std::filesystem::temp_directory_path() / "voicemark_synth_corpus").string();
    std::filesystem::remove_all(root);
    CorpusSynthConfig cfg;
    cfg.subjects = 2;
    cfg.recordings = 2;
    cfg.trees_missing_every = 2;
    cfg.sample_rate = 16000;
    const auto files = synth_corpus(root, cfg);
    CHECK(files.recording_ids == std::vector<std::string>{"S001_R1", "S001_R2", "S002_R1", "S002_R2"});
    const auto entries = pipeline::load_corpus_index(files.index);
    REQUIRE(entries.size() == 4);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(std::filesystem::exists(entries[i].audio));
      CHECK(std::filesystem::exists(entries[i].conllu));
      CHECK(std::filesystem::exists(entries[i].embeddings));
      CHECK(entries[i].trees.empty() == (i % 2 == 1));
      const auto t = transcript::load_transcript(entries[i].conllu, entries[i].trees, entries[i].embeddings);
      CHECK(t.sentences.size() >= 4);
    }
    CHECK(dataset::ingest_external(files.external).size() == 4);
    const auto labels = dataset::read_labels(files.labels, model::Instrument::PHQ9);
    REQUIRE(labels.size() == 4);
    CHECK(labels[0].label == 0);
    CHECK(labels[2].label == 1);

    const auto again = (std::filesystem::temp_directory_path() / "voicemark_synth_corpus_again").string();
    std::filesystem::remove_all(again);
    const auto files2 = synth_corpus(again, cfg);
    for (const char* rel : {"corpus.csv", "external.csv", "labels.csv", "audio/S001_R1.wav", "conllu/S002_R2.conllu"}) {
      CHECK(transcript::read_text_file(root + "/" + rel) == transcript::read_text_file(again + "/" + rel));
    }
  }
}
