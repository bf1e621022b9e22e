#include "voicemark/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "voicemark/transcript.hpp"

namespace voicemark::dataset {
namespace {

FeatureManifest build_default_manifest() {
  struct Row {
    const char* name;
    const char* group;
    Source source;
  };
  constexpr Source A = Source::Acoustic;
  constexpr Source L = Source::Linguistic;
  constexpr Source E = Source::External;
  static const Row rows[] = {
      {"ZCR", "prosodic", A},
      {"F0_mean", "prosodic", A},
      {"F0_range", "prosodic", A},
      {"F0_var", "prosodic", A},
      {"F0_std", "prosodic", A},
      {"Intensity_mean", "prosodic", A},
      {"Intensity_std", "prosodic", A},
      {"Jitter_local", "voice_quality", A},
      {"Shimmer_local", "voice_quality", A},
      {"HNR", "voice_quality", A},
      {"PVI", "voice_quality", A},
      {"filler_count", "voice_quality", L},
      {"duration", "prosodic", A},
      {"Phonation_rate", "prosodic", A},
      {"pause_count", "prosodic", A},
      {"pause_short", "prosodic", A},
      {"pause_medium", "prosodic", A},
      {"pause_long", "prosodic", A},
      {"pause_mean", "prosodic", A},
      {"pause_speech_ratio", "prosodic", A},
      {"articulation_rate", "prosodic", A},
      {"speech_entropy", "prosodic", A},
      {"emotion_neu", "psycholinguistic_acoustic", E},
      {"emotion_hap", "psycholinguistic_acoustic", E},
      {"emotion_ang", "psycholinguistic_acoustic", E},
      {"emotion_sad", "psycholinguistic_acoustic", E},
      {"word_count", "lexical", L},
      {"sentence_count", "lexical", L},
      {"type_token_ratio", "lexical", L},
      {"MATTR", "lexical", L},
      {"brunet_index", "lexical", L},
      {"honore_stat", "lexical", L},
      {"lexical_density", "lexical", L},
      {"idea_density", "lexical", L},
      {"content_function_ratio", "lexical", L},
      {"pronoun_ratio", "lexical", L},
      {"Tense_Past", "lexical", L},
      {"Tense_Pres", "lexical", L},
      {"Voice_Pass", "lexical", L},
      {"Number_Plur", "lexical", L},
      {"lemma_ttr", "lexical", L},
      {"upos_diversity", "lexical", L},
      {"morphological_richness", "lexical", L},
      {"propositional_density", "lexical", L},
      {"mean_sentence_length", "syntactic", L},
      {"mean_clause_length", "syntactic", L},
      {"syntactic_depth_mean", "syntactic", L},
      {"syntactic_depth_max", "syntactic", L},
      {"clause_ratio", "syntactic", L},
      {"verb_tense_switches", "syntactic", L},
      {"verb_tense_switch_ratio", "syntactic", L},
      {"syntactic_embedding_depth", "syntactic", L},
      {"passive_voice_ratio", "syntactic", L},
      {"graph_nodes", "syntactic", L},
      {"graph_edges", "syntactic", L},
      {"graph_repeated_edges", "syntactic", L},
      {"graph_largest_scc", "syntactic", L},
      {"graph_density", "syntactic", L},
      {"graph_loops_L1", "syntactic", L},
      {"graph_loops_L2", "syntactic", L},
      {"graph_loops_L3", "syntactic", L},
      {"graph_avg_total_degree", "syntactic", L},
      {"graph_diameter", "syntactic", L},
      {"graph_avg_shortest_path", "syntactic", L},
      {"nodes_per_word", "syntactic", L},
      {"edges_per_word", "syntactic", L},
      {"atd_per_word", "syntactic", L},
      {"parallel_edges_per_word", "syntactic", L},
      {"loops_L1_per_word", "syntactic", L},
      {"loops_L2_per_word", "syntactic", L},
      {"loops_L3_per_word", "syntactic", L},
      {"mean_constituency_depth", "syntactic", L},
      {"max_constituency_depth", "syntactic", L},
      {"first_order_coherence", "semantic", L},
      {"second_order_coherence", "semantic", L},
      {"discourse_cohesion", "semantic", L},
      {"sentence_repetition_ratio", "semantic", L},
      {"vader_negative", "psycholinguistic_linguistic", L},
      {"vader_neutral", "psycholinguistic_linguistic", L},
      {"vader_positive", "psycholinguistic_linguistic", L},
      {"vader_compound", "psycholinguistic_linguistic", L},
      {"sarcasm_prob", "psycholinguistic_linguistic", E},
  };
  FeatureManifest m;
  for (const Row& r : rows) m.entries.push_back(ManifestEntry{r.name, r.group, r.source});
  return m;
}

const std::vector<std::string> kExternalColumns{"emotion_neu", "emotion_hap", "emotion_ang", "emotion_sad",
                                                "sarcasm_prob"};

bool is_na(const std::string& s) {
  if (s.empty()) return true;
  std::string low;
  for (char ch : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  return low == "na" || low == "nan" || low == "null";
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Duplicate ids are rejected; returns id -> row index.
std::map<std::string, std::size_t> index_rows(const FeatureMatrix& t, const char* what) {
  std::map<std::string, std::size_t> out;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    if (!out.emplace(t.row_ids[r], r).second) {
      throw AssemblyError(std::string("assemble: duplicate recording_id '") + t.row_ids[r] + "' in " + what);
    }
  }
  return out;
}

FeatureMatrix single_row(const std::string& id, const std::vector<std::pair<std::string, double>>& named) {
  FeatureMatrix t;
  std::vector<double> values;
  for (const auto& [name, v] : named) {
    t.columns.push_back(name);
    values.push_back(v);
  }
  t.append_row(id, id, values);
  return t;
}

}  // namespace

std::string_view source_name(Source s) noexcept {
  switch (s) {
    case Source::Acoustic: return "acoustic";
    case Source::Linguistic: return "linguistic";
    case Source::External: return "external";
  }
  return "unknown";
}

Source parse_source(std::string_view name) {
  if (name == "acoustic") return Source::Acoustic;
  if (name == "linguistic") return Source::Linguistic;
  if (name == "external") return Source::External;
  throw ManifestError("manifest: unknown source '" + std::string(name) + "'");
}

std::vector<std::string> FeatureManifest::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

std::vector<std::string> FeatureManifest::names_from(Source s) const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.source == s) out.push_back(e.name);
  }
  return out;
}

std::ptrdiff_t FeatureManifest::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

model::GroupColumns FeatureManifest::groups() const {
  model::GroupColumns out;
  for (const auto& e : entries) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& g) { return g.first == e.group; });
    if (it == out.end()) {
      out.emplace_back(e.group, std::vector<std::string>{});
      it = out.end() - 1;
    }
    it->second.push_back(e.name);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string FeatureManifest::hash() const {
  std::string canon = "v" + std::to_string(version) + "\n";
  for (const auto& e : entries) {
    canon += e.name + "\t" + e.group + "\t" + std::string(source_name(e.source)) + "\n";
  }
  return hex64(fnv1a64(canon));
}

const FeatureManifest& default_manifest() {
  static const FeatureManifest m = build_default_manifest();
  return m;
}

void validate_manifest(const FeatureManifest& m) {
  if (m.size() != kManifestSize) {
    throw ManifestError("manifest: expected " + std::to_string(kManifestSize) + " features, found " +
                        std::to_string(m.size()));
  }
  std::set<std::string> seen;
  std::set<std::string> groups;
  for (const auto& e : m.entries) {
    if (!seen.insert(e.name).second) throw ManifestError("manifest: duplicate feature '" + e.name + "'");
    if (std::find(kGroups.begin(), kGroups.end(), e.group) == kGroups.end()) {
      throw ManifestError("manifest: unknown group '" + e.group + "' for " + e.name);
    }
    groups.insert(e.group);
  }
  if (groups.size() != kGroups.size()) throw ManifestError("manifest: not every feature group is populated");
}

void check_registries(const FeatureManifest& m) {
  std::vector<std::string> acoustic, linguistic;
  for (const auto& [name, v] : acoustic::AcousticFeatures{}.named()) acoustic.push_back(name);
  for (const auto& [name, v] : linguistic::LinguisticFeatures{}.named()) linguistic.push_back(name);
  const std::pair<Source, const std::vector<std::string>*> registries[] = {
      {Source::Acoustic, &acoustic}, {Source::Linguistic, &linguistic}, {Source::External, &kExternalColumns}};
  for (const auto& [source, produced] : registries) {
    const auto expected = m.names_from(source);
    std::vector<std::string> sorted_expected = expected, sorted_produced = *produced;
    std::sort(sorted_expected.begin(), sorted_expected.end());
    std::sort(sorted_produced.begin(), sorted_produced.end());
    if (sorted_expected != sorted_produced) {
      throw ManifestError("manifest: " + std::string(source_name(source)) +
                          " extractor output does not match its manifest entries");
    }
  }
}

nlohmann::json manifest_to_json(const FeatureManifest& m) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& e : m.entries) {
    features.push_back({{"name", e.name}, {"group", e.group}, {"source", source_name(e.source)}});
  }
  return {{"version", m.version}, {"features", std::move(features)}};
}

FeatureManifest manifest_from_json(const nlohmann::json& j) {
  FeatureManifest m;
  try {
    m.version = j.at("version").get<int>();
    for (const auto& f : j.at("features")) {
      m.entries.push_back(ManifestEntry{f.at("name").get<std::string>(), f.at("group").get<std::string>(),
                                        parse_source(f.at("source").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(std::string("manifest: ") + e.what());
  }
  validate_manifest(m);
  return m;
}

FeatureManifest load_manifest(const std::string& path) {
  try {
    return manifest_from_json(nlohmann::json::parse(transcript::read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ManifestError(path + ": " + e.what());
  }
}

void save_manifest(const std::string& path, const FeatureManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << manifest_to_json(m).dump(2) << "\n";
}

std::string canonical_feature_name(const std::string& name) {
  if (name == "sentiment_positive") return "vader_positive";
  if (name == "sentiment_negative") return "vader_negative";
  return name;
}

// ---- CSV ----

std::ptrdiff_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  std::size_t record_line = 1;
  auto end_record = [&] {
    record.push_back(trim(field));
    field.clear();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      if (table.header.empty()) {
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          throw CsvError("csv line " + std::to_string(record_line) + ": expected " +
                             std::to_string(table.header.size()) + " fields, found " + std::to_string(record.size()),
                         record_line);
        }
        table.rows.push_back(std::move(record));
      }
    }
    record.clear();
    any = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (!any) record_line = line;
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(trim(field));
      field.clear();
    } else if (c == '\n') {
      end_record();
      ++line;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw CsvError("csv: unterminated quoted field", record_line);
  if (any) end_record();
  if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) table.header[0].erase(0, 3);
  return table;
}

CsvTable read_csv(const std::string& path) { return parse_csv(transcript::read_text_file(path)); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_value(double v) {
  if (std::isnan(v)) return {};
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_value(const std::string& field, std::size_t line) {
  if (is_na(field)) return kMissing;
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw CsvError("csv line " + std::to_string(line) + ": not a number: '" + field + "'", line);
  }
  return v;
}

FeatureMatrix parse_feature_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  const auto id_col = t.column("recording_id");
  if (id_col != 0) throw CsvError("feature csv: first column must be recording_id", 1);
  const auto subject_col = t.column("subject_id");
  const auto label_col = t.column("label");
  FeatureMatrix X;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 1; c < t.header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == subject_col || static_cast<std::ptrdiff_t>(c) == label_col) continue;
    X.columns.push_back(canonical_feature_name(t.header[c]));
    feature_cols.push_back(c);
  }
  std::vector<double> row(feature_cols.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& rec = t.rows[r];
    const std::size_t line = r + 2;
    for (std::size_t k = 0; k < feature_cols.size(); ++k) row[k] = parse_value(rec[feature_cols[k]], line);
    int label = -1;
    if (label_col >= 0 && !is_na(rec[label_col])) {
      const std::string& s = rec[label_col];
      if (s != "0" && s != "1") throw CsvError("feature csv line " + std::to_string(line) + ": label must be 0 or 1", line);
      label = s == "1" ? 1 : 0;
    }
    const std::string subject = subject_col >= 0 ? rec[subject_col] : rec[0];
    X.append_row(rec[0], subject, row, label);
  }
  if (!X.labels.empty() && X.labels.size() != X.rows()) {
    throw CsvError("feature csv: label column is partially empty", 1);
  }
  return X;
}

FeatureMatrix read_feature_csv(const std::string& path) {
  try {
    return parse_feature_csv(transcript::read_text_file(path));
  } catch (const CsvError& e) {
    throw CsvError(path + ": " + e.what(), e.line());
  }
}

std::string feature_csv(const FeatureMatrix& X) {
  std::ostringstream out;
  out << "recording_id,subject_id";
  if (X.labeled()) out << ",label";
  for (const auto& c : X.columns) out << ',' << csv_escape(c);
  out << '\n';
  for (std::size_t r = 0; r < X.rows(); ++r) {
    out << csv_escape(X.row_ids[r]) << ',' << csv_escape(X.subject_ids.empty() ? X.row_ids[r] : X.subject_ids[r]);
    if (X.labeled()) out << ',' << X.labels[r];
    for (std::size_t c = 0; c < X.cols(); ++c) out << ',' << format_value(X.at(r, c));
    out << '\n';
  }
  return out.str();
}

void write_feature_csv(const std::string& path, const FeatureMatrix& X) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << feature_csv(X);
}

// ---- sources ----

std::vector<ExternalRecord> parse_external(std::string_view csv_text) {
  CsvTable t;
  try {
    t = parse_csv(csv_text);
  } catch (const CsvError& e) {
    throw ExternalError(e.what());
  }
  const std::vector<std::string> expected{"recording_id", "emotion_neu", "emotion_hap", "emotion_ang", "emotion_sad",
                                          "sarcasm_prob"};
  if (t.header != expected) {
    throw ExternalError("external csv: header must be recording_id,emotion_neu,emotion_hap,emotion_ang,emotion_sad,sarcasm_prob");
  }
  std::vector<ExternalRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& rec = t.rows[r];
    const std::string where = "external csv line " + std::to_string(r + 2);
    ExternalRecord e;
    e.recording_id = rec[0];
    if (e.recording_id.empty()) throw ExternalError(where + ": empty recording_id");
    if (!seen.insert(e.recording_id).second) throw ExternalError(where + ": duplicate recording_id '" + e.recording_id + "'");
    double values[5];
    for (int k = 0; k < 5; ++k) {
      double v = 0.0;
      try {
        v = parse_value(rec[static_cast<std::size_t>(k) + 1], r + 2);
      } catch (const CsvError& err) {
        throw ExternalError(err.what());
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ExternalError(where + ": " + expected[static_cast<std::size_t>(k) + 1] + " = " + rec[static_cast<std::size_t>(k) + 1] +
                            " outside [0, 1]");
      }
      values[k] = v;
    }
    const double sum = values[0] + values[1] + values[2] + values[3];
    if (std::fabs(sum - 1.0) > 1e-3) {
      throw ExternalError(where + ": emotion probabilities sum to " + format_value(sum) + ", not 1");
    }
    for (int k = 0; k < 4; ++k) e.emotion[static_cast<std::size_t>(k)] = sum == 1.0 ? values[k] : values[k] / sum;
    e.sarcasm_prob = values[4];
    out.push_back(e);
  }
  return out;
}

std::vector<ExternalRecord> ingest_external(const std::string& path) {
  try {
    return parse_external(transcript::read_text_file(path));
  } catch (const ExternalError& e) {
    throw ExternalError(path + ": " + e.what());
  }
}

FeatureMatrix external_table(const std::vector<ExternalRecord>& records) {
  FeatureMatrix t;
  t.columns = kExternalColumns;
  for (const auto& e : records) {
    const double row[5] = {e.emotion[0], e.emotion[1], e.emotion[2], e.emotion[3], e.sarcasm_prob};
    t.append_row(e.recording_id, e.recording_id, row);
  }
  return t;
}

std::vector<LabelRecord> parse_labels(std::string_view csv_text, std::optional<model::Instrument> instrument) {
  const CsvTable t = parse_csv(csv_text);
  const auto id = t.column("recording_id");
  const auto subject = t.column("subject_id");
  const auto label = t.column("label");
  const auto score = t.column("score");
  if (id < 0 || subject < 0 || (label < 0 && score < 0)) {
    throw CsvError("labels csv: need recording_id, subject_id and label or score columns", 1);
  }
  if (label < 0 && !instrument) throw CsvError("labels csv: score column requires an instrument", 1);
  std::vector<LabelRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& rec = t.rows[r];
    const std::size_t line = r + 2;
    LabelRecord l{rec[id], rec[subject], 0};
    if (!seen.insert(l.recording_id).second) {
      throw CsvError("labels csv line " + std::to_string(line) + ": duplicate recording_id '" + l.recording_id + "'", line);
    }
    if (label >= 0) {
      if (rec[label] != "0" && rec[label] != "1") {
        throw CsvError("labels csv line " + std::to_string(line) + ": label must be 0 or 1", line);
      }
      l.label = rec[label] == "1" ? 1 : 0;
    } else {
      int s = 0;
      const std::string& f = rec[score];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), s);
      if (res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
        throw CsvError("labels csv line " + std::to_string(line) + ": score must be an integer", line);
      }
      const int one[1] = {s};
      l.label = model::binarize_labels(one, *instrument)[0];
    }
    out.push_back(std::move(l));
  }
  return out;
}

std::vector<LabelRecord> read_labels(const std::string& path, std::optional<model::Instrument> instrument) {
  return parse_labels(transcript::read_text_file(path), instrument);
}

FeatureMatrix acoustic_row(const std::string& recording_id, const acoustic::AcousticFeatures& f) {
  return single_row(recording_id, f.named());
}

FeatureMatrix linguistic_row(const std::string& recording_id, const linguistic::LinguisticFeatures& f) {
  auto named = f.named();
  for (const auto& m : f.missing()) {
    for (auto& [name, v] : named) {
      if (name == m) v = kMissing;
    }
  }
  return single_row(recording_id, named);
}

FeatureMatrix concat_rows(const std::vector<FeatureMatrix>& parts) {
  FeatureMatrix out;
  if (parts.empty()) return out;
  out.columns = parts.front().columns;
  for (const auto& p : parts) {
    if (p.columns != out.columns) throw std::invalid_argument("concat_rows: column mismatch");
    for (std::size_t r = 0; r < p.rows(); ++r) {
      out.append_row(p.row_ids[r], p.subject_ids.empty() ? p.row_ids[r] : p.subject_ids[r], p.row(r),
                     p.labeled() ? p.labels[r] : -1);
    }
  }
  return out;
}

Assembled assemble(const FeatureMatrix& acoustic, const FeatureMatrix& linguistic,
                   const std::vector<ExternalRecord>& external, const std::vector<LabelRecord>& labels,
                   const FeatureManifest& manifest) {
  const FeatureMatrix ext = external_table(external);
  struct SourceView {
    Source source;
    const FeatureMatrix* table;
    std::map<std::string, std::size_t> rows;
    std::vector<std::ptrdiff_t> column_of;  // per manifest entry
  };
  std::vector<SourceView> views;
  const std::pair<Source, const FeatureMatrix*> inputs[] = {
      {Source::Acoustic, &acoustic}, {Source::Linguistic, &linguistic}, {Source::External, &ext}};
  for (const auto& [source, table] : inputs) {
    SourceView v{source, table, index_rows(*table, std::string(source_name(source)).c_str()), {}};
    for (const auto& e : manifest.entries) {
      v.column_of.push_back(e.source == source ? table->column_index(e.name) : -1);
    }
    views.push_back(std::move(v));
  }

  std::map<std::string, const LabelRecord*> label_of;
  for (const auto& l : labels) {
    if (!label_of.emplace(l.recording_id, &l).second) {
      throw AssemblyError("assemble: duplicate label for recording_id '" + l.recording_id + "'");
    }
  }
  std::set<std::string> ids;
  if (!labels.empty()) {
    for (const auto& l : labels) {
      const bool found = std::any_of(views.begin(), views.end(), [&](const SourceView& v) { return v.rows.count(l.recording_id) > 0; });
      if (!found) throw AssemblyError("assemble: labeled recording '" + l.recording_id + "' has no feature source");
      ids.insert(l.recording_id);
    }
  } else {
    for (const auto& v : views) {
      for (const auto& [id, r] : v.rows) ids.insert(id);
    }
  }

  Assembled out;
  out.matrix.columns = manifest.names();
  std::vector<double> row(manifest.size());
  for (const auto& id : ids) {
    Completeness c{id, {}, 0};
    std::fill(row.begin(), row.end(), kMissing);
    for (const auto& v : views) {
      const auto it = v.rows.find(id);
      if (it == v.rows.end()) {
        c.missing_sources.emplace_back(source_name(v.source));
        continue;
      }
      for (std::size_t k = 0; k < manifest.size(); ++k) {
        if (v.column_of[k] >= 0) row[k] = v.table->at(it->second, static_cast<std::size_t>(v.column_of[k]));
      }
    }
    for (double x : row) c.missing_values += static_cast<std::size_t>(is_missing(x));
    const auto lab = label_of.find(id);
    const std::string subject = lab != label_of.end() ? lab->second->subject_id : id;
    out.matrix.append_row(id, subject, row, lab != label_of.end() ? lab->second->label : -1);
    out.completeness.push_back(std::move(c));
  }
  return out;
}

nlohmann::json completeness_to_json(const std::vector<Completeness>& c) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : c) {
    out.push_back({{"recording_id", r.recording_id},
                   {"missing_sources", r.missing_sources},
                   {"missing_values", r.missing_values}});
  }
  return out;
}

}  // namespace voicemark::dataset
