#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "voicemark/dataset.hpp"
#include "voicemark/transcript.hpp"

using namespace voicemark;
using namespace voicemark::dataset;

namespace {

const char* kConllu =
    "# text = She walked home.\n"
    "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
    "2\twalked\twalk\tVERB\t_\tTense=Past|VerbForm=Fin\t0\troot\t_\t_\n"
    "3\thome\thome\tADV\t_\t_\t2\tadvmod\t_\t_\n"
    "4\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
    "\n"
    "# text = The dogs bark.\n"
    "1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tdogs\tdog\tNOUN\t_\tNumber=Plur\t3\tnsubj\t_\t_\n"
    "3\tbark\tbark\tVERB\t_\tTense=Pres\t0\troot\t_\t_\n"
    "4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_\n";

const char* kTrees =
    "(S (NP (PRP She)) (VP (VBD walked) (ADVP (RB home))) (. .))\n"
    "(S (NP (DT The) (NNS dogs)) (VP (VBP bark)) (. .))\n";

FeatureMatrix acoustic_table(const std::vector<std::string>& ids, double offset = 0.0) {
  FeatureMatrix X;
  X.columns = default_manifest().names_from(Source::Acoustic);
  std::vector<double> row(X.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = offset + static_cast<double>(i * 100 + c);
    X.append_row(ids[i], ids[i], row);
  }
  return X;
}

FeatureMatrix linguistic_table(const std::vector<std::string>& ids, const std::set<std::string>& without_trees = {}) {
  std::vector<FeatureMatrix> parts;
  for (const auto& id : ids) {
    auto t = transcript::parse_conllu(kConllu);
    if (!without_trees.count(id)) transcript::attach_trees(t, transcript::parse_bracketed(kTrees));
    transcript::attach_embeddings(t, {{1, 0, 0}, {0.6, 0.8, 0}});
    parts.push_back(linguistic_row(id, linguistic::extract_linguistic(t, {})));
  }
  return concat_rows(parts);
}

std::vector<ExternalRecord> external_records(const std::vector<std::string>& ids) {
  std::vector<ExternalRecord> out;
  for (const auto& id : ids) out.push_back({id, {0.25, 0.25, 0.25, 0.25}, 0.5});
  return out;
}

std::string external_header() { return "recording_id,emotion_neu,emotion_hap,emotion_ang,emotion_sad,sarcasm_prob\n"; }

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "voicemark_dataset_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("built-in manifest") {
    const auto& m = default_manifest();
    CHECK(m.size() == kManifestSize);
    CHECK_NOTHROW(validate_manifest(m));
    CHECK_NOTHROW(check_registries(m));
    const auto groups = m.groups();
    REQUIRE(groups.size() == 7);
    std::size_t total = 0;
    for (std::size_t g = 0; g < 7; ++g) {
      CHECK(groups[g].first == kGroups[g]);
      total += groups[g].second.size();
    }
    CHECK(total == 82);
    CHECK(m.names_from(Source::Acoustic).size() + m.names_from(Source::Linguistic).size() +
              m.names_from(Source::External).size() ==
          82);
    CHECK(m.names_from(Source::Linguistic).size() == 56);
    CHECK(m.names_from(Source::External).size() == 5);
    CHECK(m.hash().size() == 16);
    CHECK(m.index_of("ZCR") == 0);
    CHECK(m.index_of("nope") == -1);
  }

  TEST_CASE("shipped manifest file matches") {
    const auto shipped = load_manifest(std::string(VOICEMARK_DATA_DIR) + "/feature_manifest.json");
    CHECK(shipped.hash() == default_manifest().hash());
    CHECK(shipped.names() == default_manifest().names());
    CHECK(manifest_from_json(manifest_to_json(shipped)).hash() == shipped.hash());
  }

  TEST_CASE("manifest validation") {
    auto m = default_manifest();
    m.entries.pop_back();
    CHECK_THROWS_AS(validate_manifest(m), ManifestError);
    m = default_manifest();
    m.entries[1].name = m.entries[0].name;
    CHECK_THROWS_AS(validate_manifest(m), ManifestError);
    m = default_manifest();
    m.entries[0].group = "mood";
    CHECK_THROWS_AS(validate_manifest(m), ManifestError);
    m = default_manifest();
    std::swap(m.entries[0], m.entries[1]);
    CHECK_NOTHROW(validate_manifest(m));
    CHECK_NOTHROW(check_registries(m));
    CHECK(m.hash() != default_manifest().hash());
    m = default_manifest();
    m.entries[0].name = "ZCR_renamed";
    CHECK_THROWS_AS(check_registries(m), ManifestError);
    m = default_manifest();
    m.entries[0].source = Source::External;
    CHECK_THROWS_AS(check_registries(m), ManifestError);
    CHECK_THROWS_AS(parse_source("vision"), ManifestError);
  }

  TEST_CASE("FNV-1a") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
  }

  TEST_CASE("external probabilities") {
    const auto r = parse_external(external_header() + "r1,0.25,0.25,0.25,0.25,0.5\n");
    REQUIRE(r.size() == 1);
    CHECK(r[0].emotion == std::array<double, 4>{0.25, 0.25, 0.25, 0.25});
    CHECK(r[0].sarcasm_prob == 0.5);

    const auto n = parse_external(external_header() + "r1,0.4005,0.2,0.2,0.2,0\n");
    const double sum = n[0].emotion[0] + n[0].emotion[1] + n[0].emotion[2] + n[0].emotion[3];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(n[0].emotion[1] == doctest::Approx(0.2 / 1.0005).epsilon(1e-15));

    CHECK_THROWS_AS(parse_external(external_header() + "r1,0.25,0.25,0.25,0.25,1.2\n"), ExternalError);
    CHECK_THROWS_AS(parse_external(external_header() + "r1,1.1,0,0,-0.1,0\n"), ExternalError);
    CHECK_THROWS_AS(parse_external(external_header() + "r1,0.3,0.3,0.3,0.3,0\n"), ExternalError);
    CHECK_THROWS_AS(parse_external(external_header() + "r1,0.25,0.25,0.25,0.25,0\nr1,0.25,0.25,0.25,0.25,0\n"),
                    ExternalError);
    CHECK_THROWS_AS(parse_external("id,a,b,c,d,e\n"), ExternalError);
    CHECK_THROWS_AS(parse_external(external_header() + "r1,x,0.25,0.25,0.25,0\n"), ExternalError);
    CHECK_THROWS_AS(ingest_external(temp_path("does_not_exist.csv")), std::runtime_error);
  }

  TEST_CASE("sum tolerance boundary") {
    CHECK_NOTHROW(parse_external(external_header() + "r1,0.2509,0.25,0.25,0.25,0\n"));
    CHECK_THROWS_AS(parse_external(external_header() + "r1,0.2511,0.25,0.25,0.25,0\n"), ExternalError);
  }

  TEST_CASE("complete assembly") {
    const std::vector<std::string> ids{"c", "a", "b"};
    const std::vector<LabelRecord> labels{{"a", "S1", 1}, {"b", "S1", 1}, {"c", "S2", 0}};
    const auto out = assemble(acoustic_table(ids), linguistic_table(ids), external_records(ids), labels);
    CHECK(out.matrix.rows() == 3);
    CHECK(out.matrix.cols() == 82);
    CHECK(out.matrix.columns == default_manifest().names());
    CHECK(out.matrix.row_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(out.matrix.subject_ids == std::vector<std::string>{"S1", "S1", "S2"});
    CHECK(out.matrix.labels == std::vector<int>{1, 1, 0});
    CHECK(std::none_of(out.matrix.values.begin(), out.matrix.values.end(), [](double v) { return std::isnan(v); }));
    for (const auto& c : out.completeness) {
      CHECK(c.missing_sources.empty());
      CHECK(c.missing_values == 0);
    }
    const auto sarcasm = out.matrix.column_index("sarcasm_prob");
    REQUIRE(sarcasm >= 0);
    CHECK(out.matrix.at(0, static_cast<std::size_t>(sarcasm)) == 0.5);
    CHECK(out.matrix.at(0, 0) == 100.0);
  }

  TEST_CASE("missing constituency trees") {
    const std::vector<std::string> ids{"a", "b"};
    const auto out = assemble(acoustic_table(ids), linguistic_table(ids, {"b"}), external_records(ids), {});
    auto t = transcript::parse_conllu(kConllu);
    const auto expected_missing = linguistic::extract_linguistic(t, {}).missing();
    std::set<std::string> constituency;
    for (const auto& name : expected_missing) {
      if (name.find("constituency") != std::string::npos) constituency.insert(name);
    }
    CHECK(constituency.size() == 2);
    for (std::size_t c = 0; c < out.matrix.cols(); ++c) {
      CHECK(!std::isnan(out.matrix.at(0, c)));
      CHECK(std::isnan(out.matrix.at(1, c)) == (constituency.count(out.matrix.columns[c]) > 0));
    }
    CHECK(out.completeness[1].missing_values == 2);
    CHECK(out.completeness[1].missing_sources.empty());
  }

  TEST_CASE("missing source") {
    const auto out = assemble(acoustic_table({"a", "b"}), linguistic_table({"a"}), external_records({"a", "b"}), {});
    REQUIRE(out.completeness.size() == 2);
    CHECK(out.completeness[1].missing_sources == std::vector<std::string>{"linguistic"});
    CHECK(out.completeness[1].missing_values == 56);
    const auto j = completeness_to_json(out.completeness);
    CHECK(j[1]["missing_sources"][0] == "linguistic");
  }

  TEST_CASE("assembly errors") {
    const std::vector<std::string> ids{"a"};
    const std::vector<LabelRecord> orphan{{"a", "S", 0}, {"ghost", "S", 1}};
    try {
      (void)assemble(acoustic_table(ids), linguistic_table(ids), external_records(ids), orphan);
      FAIL("expected AssemblyError");
    } catch (const AssemblyError& e) {
      CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
    auto dup = acoustic_table({"a", "a"});
    CHECK_THROWS_AS(assemble(dup, linguistic_table(ids), external_records(ids), {}), AssemblyError);
  }

  TEST_CASE("assembly is order invariant") {
    const std::vector<std::string> ids{"r1", "r2", "r3", "r4", "r5"};
    const std::vector<LabelRecord> labels{{"r1", "A", 1}, {"r2", "A", 1}, {"r3", "B", 0}, {"r4", "C", 1}, {"r5", "B", 0}};
    const auto ac = acoustic_table(ids, 0.5);
    const auto li = linguistic_table(ids, {"r2"});
    const auto ex = external_records(ids);
    const auto ref = assemble(ac, li, ex, labels);
    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
      std::vector<std::size_t> p(ids.size());
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      auto ex2 = ex;
      auto lab2 = labels;
      std::shuffle(ex2.begin(), ex2.end(), rng);
      std::shuffle(lab2.begin(), lab2.end(), rng);
      const auto out = assemble(ac.select_rows(p), li.select_rows(p), ex2, lab2);
      CHECK(out.matrix.row_ids == ref.matrix.row_ids);
      CHECK(out.matrix.labels == ref.matrix.labels);
      CHECK(feature_csv(out.matrix) == feature_csv(ref.matrix));
    }
  }

  TEST_CASE("CSV parsing") {
    const auto t = parse_csv("a,b\n\"x,1\",\"say \"\"hi\"\"\"\r\n3,\n");
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][0] == "x,1");
    CHECK(t.rows[0][1] == "say \"hi\"");
    CHECK(t.rows[1][1].empty());
    CHECK(t.column("b") == 1);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), CsvError);
    try {
      (void)parse_csv("a\n\"open\n");
      FAIL("expected CsvError");
    } catch (const CsvError& e) {
      CHECK(e.line() == 2);
    }
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("q\"") == "\"q\"\"\"");
  }

  TEST_CASE("value formatting round trip") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
      double v;
      do {
        const std::uint64_t bits = rng();
        std::memcpy(&v, &bits, sizeof v);
      } while (!std::isfinite(v));
      CHECK(parse_value(format_value(v), 1) == v);
    }
    CHECK(format_value(kMissing).empty());
    CHECK(format_value(0.1) == "0.1");
    CHECK(std::isnan(parse_value("NA", 1)));
    CHECK(std::isnan(parse_value("", 1)));
    CHECK_THROWS_AS(parse_value("1.2.3", 7), CsvError);
  }

  TEST_CASE("feature CSV round trip") {
    FeatureMatrix X;
    X.columns = {"sentiment_positive", "b,c"};
    X.append_row("r1", "s1", std::vector<double>{0.1, kMissing}, 1);
    X.append_row("r2", "s2", std::vector<double>{-3e-300, 7}, 0);
    const auto text = feature_csv(X);
    const auto back = parse_feature_csv(text);
    CHECK(back.columns == std::vector<std::string>{"vader_positive", "b,c"});
    CHECK(back.row_ids == X.row_ids);
    CHECK(back.subject_ids == X.subject_ids);
    CHECK(back.labels == X.labels);
    CHECK(back.at(0, 0) == 0.1);
    CHECK(std::isnan(back.at(0, 1)));
    CHECK(back.at(1, 0) == -3e-300);
    const auto path = temp_path("features.csv");
    write_feature_csv(path, X);
    CHECK(feature_csv(read_feature_csv(path)) == feature_csv(back));
    CHECK_THROWS_AS(parse_feature_csv("id,x\nr,1\n"), CsvError);
    CHECK_THROWS_AS(parse_feature_csv("recording_id,label,x\nr,2,1\n"), CsvError);
    const auto bare = parse_feature_csv("recording_id,x\nr,nan\n");
    CHECK(bare.subject_ids == std::vector<std::string>{"r"});
    CHECK(!bare.labeled());
  }

  TEST_CASE("aliases") {
    CHECK(canonical_feature_name("sentiment_positive") == "vader_positive");
    CHECK(canonical_feature_name("sentiment_negative") == "vader_negative");
    CHECK(canonical_feature_name("MATTR") == "MATTR");
  }

  TEST_CASE("labels") {
    const auto l = parse_labels("recording_id,subject_id,label\nr1,s1,1\nr2,s1,0\n");
    REQUIRE(l.size() == 2);
    CHECK(l[0].label == 1);
    CHECK(l[1].subject_id == "s1");
    const auto s = parse_labels("recording_id,subject_id,score\nr1,s1,15\nr2,s2,14\n", model::Instrument::PHQ9);
    CHECK(s[0].label == 1);
    CHECK(s[1].label == 0);
    CHECK_THROWS_AS(parse_labels("recording_id,subject_id,score\nr1,s1,15\n"), CsvError);
    CHECK_THROWS_AS(parse_labels("recording_id,subject_id,label\nr1,s1,2\n"), CsvError);
    CHECK_THROWS_AS(parse_labels("recording_id,subject_id,label\nr1,s1,1\nr1,s1,0\n"), CsvError);
    CHECK_THROWS_AS(parse_labels("recording_id,label\nr1,1\n"), CsvError);
    CHECK_THROWS(parse_labels("recording_id,subject_id,score\nr1,s1,40\n", model::Instrument::PHQ9));
  }
}
