#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "voicemark/config.hpp"
#include "voicemark/dataset.hpp"
#include "voicemark/feature_matrix.hpp"

namespace voicemark::pipeline {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kReportSchemaId = "voicemark-report/1";

struct RunManifest {
  std::vector<std::string> command_line;
  nlohmann::json config = nlohmann::json::object();
  std::string manifest_hash;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> input_digests;  // path -> FNV-1a 64 hex
  std::string started;
  std::string finished;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// ISO-8601 UTC; honours SOURCE_DATE_EPOCH so repeated runs can match byte for byte.
std::string timestamp_now();
std::string file_digest(const std::string& path);

/// Report document: {schema, kind, manifest, data}.
nlohmann::json make_report(const std::string& kind, nlohmann::json data, const RunManifest& manifest);

/// JSON-schema subset: type, required, properties, additionalProperties, items, enum, const, minimum, maximum.
std::vector<std::string> validate_schema(const nlohmann::json& schema, const nlohmann::json& doc);
/// The shipped report schema.
const nlohmann::json& report_schema();

// ---- report payloads ----

nlohmann::json comparisons_json(const std::vector<stats::GroupComparison>& rows, const FeatureMatrix& X,
                                const dataset::FeatureManifest& manifest, double alpha);
nlohmann::json correlations_json(const stats::CorrelationMatrix& c);
nlohmann::json cv_json(const model::CVResult& r);
nlohmann::json importance_json(const std::vector<model::FeatureScore>& scores);
nlohmann::json ablation_json(const model::AblationTable& t, const std::vector<std::string>& dataset_names);

struct Histogram {
  std::string feature;
  std::string group;
  std::vector<double> edges;   // bins + 1
  std::vector<double> values;  // fraction of the group's observed rows per bin
};

/// Shared per-feature edges over all rows; one series per label (or "all" when unlabeled).
std::vector<Histogram> emit_histograms(const FeatureMatrix& X, int bins = 40);
std::string histograms_csv(const std::vector<Histogram>& h);
nlohmann::json histograms_json(const std::vector<Histogram>& h);

// ---- extraction ----

struct CorpusEntry {
  std::string recording_id;
  std::string subject_id;
  std::string audio;
  std::string conllu;
  std::string trees;       // optional
  std::string embeddings;  // optional
};

/// Reads `recording_id,subject_id,audio,conllu[,trees][,embeddings]`; paths are resolved against the index.
std::vector<CorpusEntry> load_corpus_index(const std::string& path);

struct ExtractedTables {
  FeatureMatrix acoustic;
  FeatureMatrix linguistic;
};

ExtractedTables extract_corpus(const std::vector<CorpusEntry>& entries, const PipelineConfig& cfg);

// ---- pipeline ----

class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct ReportBundle {
  std::string directory;
  std::vector<std::string> files;  // relative names, sorted
  RunManifest manifest;
};

/// Runs the configured stages into a staging directory and moves it to `cfg.output` on success.
ReportBundle run_pipeline(const PipelineConfig& cfg, const std::vector<std::string>& command_line = {});

}  // namespace voicemark::pipeline
