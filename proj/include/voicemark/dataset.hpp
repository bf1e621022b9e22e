#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "voicemark/acoustic.hpp"
#include "voicemark/evaluation.hpp"
#include "voicemark/feature_matrix.hpp"
#include "voicemark/linguistic.hpp"

namespace voicemark::dataset {

enum class Source { Acoustic, Linguistic, External };

std::string_view source_name(Source s) noexcept;
Source parse_source(std::string_view name);

struct ManifestEntry {
  std::string name;
  std::string group;
  Source source = Source::Acoustic;
};

struct FeatureManifest {
  int version = 1;
  std::vector<ManifestEntry> entries;

  [[nodiscard]] std::size_t size() const noexcept { return entries.size(); }
  [[nodiscard]] std::vector<std::string> names() const;
  [[nodiscard]] std::vector<std::string> names_from(Source s) const;
  [[nodiscard]] std::ptrdiff_t index_of(std::string_view name) const;
  /// Feature groups in first-appearance order with their member columns.
  [[nodiscard]] model::GroupColumns groups() const;
  /// FNV-1a 64 over the canonical `name\tgroup\tsource\n` listing, as 16 hex digits.
  [[nodiscard]] std::string hash() const;
};

inline constexpr std::size_t kManifestSize = 82;
inline constexpr std::array<std::string_view, 7> kGroups{
    "prosodic", "voice_quality", "psycholinguistic_acoustic", "lexical",
    "syntactic", "semantic", "psycholinguistic_linguistic"};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The built-in 82-feature manifest.
const FeatureManifest& default_manifest();
/// Throws ManifestError unless the manifest has 82 unique names covering all seven groups.
void validate_manifest(const FeatureManifest& m);
/// Throws ManifestError unless each source's extractor produces exactly the set of names the manifest assigns it.
void check_registries(const FeatureManifest& m);

nlohmann::json manifest_to_json(const FeatureManifest& m);
FeatureManifest manifest_from_json(const nlohmann::json& j);
FeatureManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const FeatureManifest& m);

/// Maps legacy sentiment_* names onto vader_*; other names pass through.
std::string canonical_feature_name(const std::string& name);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

// ---- CSV ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  [[nodiscard]] std::ptrdiff_t column(std::string_view name) const;
};

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);
std::string csv_escape(std::string_view field);
/// Shortest round-trip decimal; NaN as empty field.
std::string format_value(double v);
double parse_value(const std::string& field, std::size_t line);

/// Reads `recording_id[,subject_id][,label],feature...`; empty/NA/nan cells become missing.
FeatureMatrix read_feature_csv(const std::string& path);
FeatureMatrix parse_feature_csv(std::string_view text);
std::string feature_csv(const FeatureMatrix& X);
void write_feature_csv(const std::string& path, const FeatureMatrix& X);

// ---- sources ----

struct ExternalRecord {
  std::string recording_id;
  std::array<double, 4> emotion{};  // neu, hap, ang, sad
  double sarcasm_prob = 0.0;
};

class ExternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<ExternalRecord> parse_external(std::string_view csv_text);
std::vector<ExternalRecord> ingest_external(const std::string& path);
FeatureMatrix external_table(const std::vector<ExternalRecord>& records);

struct LabelRecord {
  std::string recording_id;
  std::string subject_id;
  int label = 0;
};

/// Header `recording_id,subject_id,label` or `recording_id,subject_id,score` (needs an instrument).
std::vector<LabelRecord> parse_labels(std::string_view csv_text, std::optional<model::Instrument> instrument = {});
std::vector<LabelRecord> read_labels(const std::string& path, std::optional<model::Instrument> instrument = {});

/// Single-row tables for one recording's extractor output.
FeatureMatrix acoustic_row(const std::string& recording_id, const acoustic::AcousticFeatures& f);
FeatureMatrix linguistic_row(const std::string& recording_id, const linguistic::LinguisticFeatures& f);
/// Row-wise concatenation of tables with identical columns.
FeatureMatrix concat_rows(const std::vector<FeatureMatrix>& parts);

struct Completeness {
  std::string recording_id;
  std::vector<std::string> missing_sources;
  std::size_t missing_values = 0;
};

struct Assembled {
  FeatureMatrix matrix;
  std::vector<Completeness> completeness;
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joins source tables on recording_id into manifest column order, rows sorted by id.
Assembled assemble(const FeatureMatrix& acoustic, const FeatureMatrix& linguistic,
                   const std::vector<ExternalRecord>& external, const std::vector<LabelRecord>& labels,
                   const FeatureManifest& manifest = default_manifest());

nlohmann::json completeness_to_json(const std::vector<Completeness>& c);

}  // namespace voicemark::dataset
