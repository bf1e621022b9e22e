#include "voicemark/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <type_traits>
#include <variant>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "voicemark/dataset.hpp"

namespace voicemark::pipeline {
namespace {

using Member = std::variant<std::string PipelineConfig::*, bool PipelineConfig::*, int PipelineConfig::*,
                            double PipelineConfig::*, std::uint64_t PipelineConfig::*>;

struct Binding {
  ConfigKey key;
  Member member;
};

const std::vector<Binding>& bindings() {
  using C = PipelineConfig;
  static const std::vector<Binding> table{
      {{"run", "seed", "0", "seed for CV shuffles, LIME sampling and synthesis"}, &C::seed},
      {{"run", "output", "report", "output directory for the report bundle"}, &C::output},
      {{"run", "aggregate", "true", "median-aggregate recordings per subject before modelling"}, &C::aggregate},
      {{"run", "instrument", "PHQ9", "instrument for score labels: PHQ9, GAD7 or ASRS"}, &C::instrument},
      {{"inputs", "features", "", "assembled feature CSV (skips extraction)"}, &C::features},
      {{"inputs", "corpus", "", "corpus index CSV for extraction"}, &C::corpus},
      {{"inputs", "external", "", "external probability CSV"}, &C::external},
      {{"inputs", "labels", "", "labels CSV"}, &C::labels},
      {{"inputs", "lexicon", "", "valence lexicon TSV"}, &C::lexicon},
      {{"inputs", "manifest", "", "feature manifest JSON (built-in when empty)"}, &C::manifest},
      {{"stages", "stats", "true", "Welch tests with BH adjustment"}, &C::stats},
      {{"stages", "correlations", "true", "Pearson correlation matrix"}, &C::correlations},
      {{"stages", "cv", "true", "subject-disjoint cross-validation"}, &C::cv},
      {{"stages", "train", "true", "fit the final model on all rows"}, &C::train},
      {{"stages", "explain", "true", "importance, SHAP, LIME and PDP (needs train)"}, &C::explain},
      {{"stages", "ablate", "true", "per-group cross-validated AUC"}, &C::ablate},
      {{"stages", "histograms", "true", "per-feature normalized histograms"}, &C::histograms},
      {{"acoustic", "pitch_floor", "75", "lowest candidate F0 in Hz"}, &C::pitch_floor},
      {{"acoustic", "pitch_ceiling", "600", "highest candidate F0 in Hz"}, &C::pitch_ceiling},
      {{"acoustic", "voicing_threshold", "0.45", "normalized autocorrelation needed for a voiced frame"},
       &C::voicing_threshold},
      {{"acoustic", "pause_threshold", "0.01", "frame RMS below this fraction of the peak is silent"},
       &C::pause_threshold},
      {{"acoustic", "min_pause", "0.2", "shortest silent run counted as a pause, seconds"}, &C::min_pause},
      {{"linguistic", "mattr_window", "50", "MATTR window in words"}, &C::mattr_window},
      {{"statistics", "alpha", "0.05", "FDR level for significance flags"}, &C::alpha},
      {{"statistics", "standardize", "false", "z-score columns before reporting group means"}, &C::standardize},
      {{"gbt", "n_trees", "200", "boosting rounds"}, &C::n_trees},
      {{"gbt", "max_depth", "4", "maximum tree depth"}, &C::max_depth},
      {{"gbt", "learning_rate", "0.1", "shrinkage eta"}, &C::learning_rate},
      {{"gbt", "lambda", "1", "L2 penalty on leaf weights"}, &C::lambda},
      {{"gbt", "gamma", "0", "minimum split gain"}, &C::gamma},
      {{"gbt", "min_child_weight", "1", "minimum hessian sum per child"}, &C::min_child_weight},
      {{"cv", "k", "4", "folds"}, &C::k},
      {{"cv", "repeats", "1", "reshuffled repetitions"}, &C::repeats},
      {{"explain", "lime_samples", "1000", "perturbations per LIME explanation"}, &C::lime_samples},
      {{"explain", "lime_instances", "0", "rows explained by LIME, 0 for all"}, &C::lime_instances},
      {{"explain", "pdp_grid", "20", "quantile grid size for partial dependence"}, &C::pdp_grid},
      {{"explain", "pdp_features", "5", "top-gain features receiving PDP curves"}, &C::pdp_features},
      {{"histograms", "bins", "40", "bins per feature histogram"}, &C::bins},
  };
  return table;
}

const Binding& find_binding(const std::string& dotted) {
  for (const auto& b : bindings()) {
    if (b.key.section + "." + b.key.key == dotted) return b;
  }
  throw ConfigError("config: unknown key '" + dotted + "'");
}

template <typename T>
T parse_number(const std::string& dotted, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw ConfigError("config: " + dotted + " = '" + value + "' is not a valid number");
  }
  return out;
}

bool parse_bool(const std::string& dotted, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("config: " + dotted + " = '" + value + "' is not a boolean");
}

}  // namespace

acoustic::AcousticConfig PipelineConfig::acoustic_config() const {
  acoustic::AcousticConfig c;
  c.pitch_floor = pitch_floor;
  c.pitch_ceiling = pitch_ceiling;
  c.voicing_threshold = voicing_threshold;
  c.pause_threshold = pause_threshold;
  c.min_pause = min_pause;
  return c;
}

linguistic::LinguisticConfig PipelineConfig::linguistic_config() const {
  linguistic::LinguisticConfig c;
  c.mattr_window = mattr_window;
  return c;
}

stats::CompareOptions PipelineConfig::compare_options() const { return {alpha, standardize}; }

model::GBTConfig PipelineConfig::gbt_config() const {
  model::GBTConfig c;
  c.n_trees = n_trees;
  c.max_depth = max_depth;
  c.learning_rate = learning_rate;
  c.lambda = lambda;
  c.gamma = gamma;
  c.min_child_weight = min_child_weight;
  c.seed = seed;
  return c;
}

model::CVConfig PipelineConfig::cv_config() const { return {k, repeats, seed, gbt_config()}; }

model::LimeConfig PipelineConfig::lime_config() const {
  model::LimeConfig c;
  c.samples = lime_samples;
  c.seed = seed;
  return c;
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& b : bindings()) out.push_back(b.key);
    return out;
  }();
  return keys;
}

void set_option(PipelineConfig& cfg, const std::string& dotted, const std::string& value) {
  const Binding& b = find_binding(dotted);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          cfg.*member = value;
        } else if constexpr (std::is_same_v<T, bool>) {
          cfg.*member = parse_bool(dotted, value);
        } else {
          cfg.*member = parse_number<T>(dotted, value);
        }
      },
      b.member);
}

std::string get_option(const PipelineConfig& cfg, const std::string& dotted) {
  const Binding& b = find_binding(dotted);
  return std::visit(
      [&](auto member) -> std::string {
        using T = std::remove_cvref_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return cfg.*member;
        } else if constexpr (std::is_same_v<T, bool>) {
          return cfg.*member ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return dataset::format_value(cfg.*member);
        } else {
          return std::to_string(cfg.*member);
        }
      },
      b.member);
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: " + std::string(e.what()));
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) set_option(base, section + "." + key, value.data());
  }
  return base;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_environment(PipelineConfig& cfg) {
  if (const char* seed = std::getenv("VOICEMARK_SEED"); seed && *seed) {
    try {
      set_option(cfg, "run.seed", seed);
    } catch (const ConfigError&) {
      throw ConfigError("VOICEMARK_SEED='" + std::string(seed) + "' is not an unsigned integer");
    }
  }
}

nlohmann::json config_snapshot(const PipelineConfig& cfg) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& k : config_keys()) out[k.section][k.key] = get_option(cfg, k.section + "." + k.key);
  return out;
}

std::string default_config_text() {
  std::string out;
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      if (!section.empty()) out += "\n";
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += "; " + k.description + "\n" + k.key + " = " + k.default_value + "\n";
  }
  return out;
}

}  // namespace voicemark::pipeline
