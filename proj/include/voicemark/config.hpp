#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "voicemark/acoustic.hpp"
#include "voicemark/evaluation.hpp"
#include "voicemark/explain.hpp"
#include "voicemark/linguistic.hpp"
#include "voicemark/stats.hpp"

namespace voicemark::pipeline {

/// Flat run configuration; `config_keys()` is the single table of keys and defaults.
struct PipelineConfig {
  // [run]
  std::uint64_t seed = 0;
  std::string output = "report";
  bool aggregate = true;
  std::string instrument = "PHQ9";
  // [inputs]
  std::string features;
  std::string corpus;
  std::string external;
  std::string labels;
  std::string lexicon;
  std::string manifest;
  // [stages]
  bool stats = true;
  bool correlations = true;
  bool cv = true;
  bool train = true;
  bool explain = true;
  bool ablate = true;
  bool histograms = true;
  // [acoustic]
  double pitch_floor = 75.0;
  double pitch_ceiling = 600.0;
  double voicing_threshold = 0.45;
  double pause_threshold = 0.01;
  double min_pause = 0.2;
  // [linguistic]
  int mattr_window = 50;
  // [statistics]
  double alpha = 0.05;
  bool standardize = false;
  // [gbt]
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  // [cv]
  int k = 4;
  int repeats = 1;
  // [explain]
  int lime_samples = 1000;
  int lime_instances = 0;  // 0 = every row
  int pdp_grid = 20;
  int pdp_features = 5;
  // [histograms]
  int bins = 40;

  [[nodiscard]] acoustic::AcousticConfig acoustic_config() const;
  [[nodiscard]] linguistic::LinguisticConfig linguistic_config() const;
  [[nodiscard]] stats::CompareOptions compare_options() const;
  [[nodiscard]] model::GBTConfig gbt_config() const;
  [[nodiscard]] model::CVConfig cv_config() const;
  [[nodiscard]] model::LimeConfig lime_config() const;
};

struct ConfigKey {
  std::string section;
  std::string key;
  std::string default_value;
  std::string description;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<ConfigKey>& config_keys();

/// Sets `section.key`; throws ConfigError on unknown keys or malformed values.
void set_option(PipelineConfig& cfg, const std::string& dotted_key, const std::string& value);
std::string get_option(const PipelineConfig& cfg, const std::string& dotted_key);

/// INI text with `[section]` headers and `key = value` lines.
PipelineConfig parse_config(const std::string& text, PipelineConfig base = {});
PipelineConfig load_config(const std::string& path);
/// Applies VOICEMARK_SEED when set.
void apply_environment(PipelineConfig& cfg);
/// Every key with its effective value as text, grouped by section.
nlohmann::json config_snapshot(const PipelineConfig& cfg);
/// The defaults table rendered as an INI file with comments.
std::string default_config_text();

}  // namespace voicemark::pipeline
