#include "voicemark/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "voicemark/audio.hpp"
#include "voicemark/explain.hpp"
#include "voicemark/transcript.hpp"

namespace voicemark::pipeline {

extern const char* const kReportSchemaText;

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json scores_json(const std::vector<model::FeatureScore>& scores, const char* value_key) {
  json out = json::array();
  for (const auto& s : scores) out.push_back({{"feature", s.name}, {value_key, s.value}});
  return out;
}

std::string type_of(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "number";
    case json::value_t::string: return "string";
    case json::value_t::array: return "array";
    case json::value_t::object: return "object";
    default: return "unknown";
  }
}

bool type_matches(const std::string& wanted, const json& v) {
  const std::string actual = type_of(v);
  if (wanted == actual) return true;
  if (wanted == "number" && actual == "integer") return true;
  if (wanted == "integer" && actual == "number") {
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
  }
  return false;
}

void validate_node(const json& schema, const json& doc, const std::string& path, std::vector<std::string>& errors) {
  if (!schema.is_object()) return;
  if (const auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = type_matches(it->get<std::string>(), doc);
    } else {
      for (const auto& t : *it) ok = ok || type_matches(t.get<std::string>(), doc);
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + it->dump() + ", found " + type_of(doc));
      return;
    }
  }
  if (const auto it = schema.find("const"); it != schema.end() && *it != doc) {
    errors.push_back(path + ": expected " + it->dump());
  }
  if (const auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), doc) == it->end()) errors.push_back(path + ": value not in enum");
  }
  if (doc.is_number()) {
    const double d = doc.get<double>();
    if (const auto it = schema.find("minimum"); it != schema.end() && d < it->get<double>()) {
      errors.push_back(path + ": below minimum");
    }
    if (const auto it = schema.find("maximum"); it != schema.end() && d > it->get<double>()) {
      errors.push_back(path + ": above maximum");
    }
  }
  if (doc.is_object()) {
    if (const auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!doc.contains(key.get<std::string>())) errors.push_back(path + ": missing '" + key.get<std::string>() + "'");
      }
    }
    const auto props = schema.find("properties");
    for (const auto& [key, value] : doc.items()) {
      if (props != schema.end() && props->contains(key)) {
        validate_node((*props)[key], value, path + "/" + key, errors);
      } else if (const auto extra = schema.find("additionalProperties"); extra != schema.end()) {
        if (extra->is_boolean() && !extra->get<bool>()) {
          errors.push_back(path + ": unexpected property '" + key + "'");
        } else if (extra->is_object()) {
          validate_node(*extra, value, path + "/" + key, errors);
        }
      }
    }
  }
  if (doc.is_array()) {
    if (const auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < doc.size(); ++i) validate_node(*it, doc[i], path + "/" + std::to_string(i), errors);
    }
    if (const auto it = schema.find("minItems"); it != schema.end() && doc.size() < it->get<std::size_t>()) {
      errors.push_back(path + ": too few items");
    }
  }
}

// Refuses to replace a directory that does not look like an earlier bundle.
void clear_previous_bundle(const fs::path& out) {
  if (!fs::exists(out)) return;
  if (!fs::is_directory(out)) throw std::runtime_error(out.string() + " exists and is not a directory");
  if (!fs::is_empty(out) && !fs::exists(out / "run_manifest.json")) {
    throw std::runtime_error("refusing to replace " + out.string() + ": not a previous report bundle");
  }
  fs::remove_all(out);
}

FeatureMatrix attach_labels(FeatureMatrix X, const std::vector<dataset::LabelRecord>& labels) {
  std::map<std::string, const dataset::LabelRecord*> by_id;
  for (const auto& l : labels) by_id[l.recording_id] = &l;
  X.labels.clear();
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto it = by_id.find(X.row_ids[r]);
    if (it == by_id.end()) throw std::runtime_error("no label for recording '" + X.row_ids[r] + "'");
    X.subject_ids[r] = it->second->subject_id;
    X.labels.push_back(it->second->label);
  }
  return X;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"command_line", command_line},   {"config", config},   {"manifest_hash", manifest_hash},
          {"tool_version", tool_version},   {"input_digests", input_digests},
          {"started", started},             {"finished", finished}};
}

std::string timestamp_now() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_digest(const std::string& path) {
  return dataset::hex64(dataset::fnv1a64(transcript::read_text_file(path)));
}

json make_report(const std::string& kind, json data, const RunManifest& manifest) {
  return {{"schema", kReportSchemaId}, {"kind", kind}, {"manifest", manifest.to_json()}, {"data", std::move(data)}};
}

std::vector<std::string> validate_schema(const json& schema, const json& doc) {
  std::vector<std::string> errors;
  validate_node(schema, doc, "", errors);
  // Kind-specific payload schemas live under $defs.
  if (errors.empty() && doc.is_object() && doc.contains("kind") && doc.contains("data") && schema.contains("$defs")) {
    const auto& defs = schema["$defs"];
    const std::string kind = doc["kind"].get<std::string>();
    if (defs.contains(kind)) validate_node(defs[kind], doc["data"], "/data", errors);
  }
  return errors;
}

const json& report_schema() {
  static const json schema = json::parse(kReportSchemaText);
  return schema;
}

json comparisons_json(const std::vector<stats::GroupComparison>& rows, const FeatureMatrix& X,
                      const dataset::FeatureManifest& manifest, double alpha) {
  json out = json::array();
  for (const auto& r : rows) {
    const auto idx = manifest.index_of(r.feature);
    out.push_back({{"feature", r.feature},
                   {"group", idx >= 0 ? manifest.entries[static_cast<std::size_t>(idx)].group : std::string()},
                   {"mean_a", number_or_null(r.mean_a)},
                   {"mean_b", number_or_null(r.mean_b)},
                   {"t", number_or_null(r.t_stat)},
                   {"df", number_or_null(r.df)},
                   {"p", r.p_raw},
                   {"q", r.p_adj},
                   {"significant", r.significant},
                   {"degenerate", r.degenerate},
                   {"n_a", r.n_a},
                   {"n_b", r.n_b}});
  }
  return {{"alpha", alpha}, {"n_rows", X.rows()}, {"rows", std::move(out)}};
}

json correlations_json(const stats::CorrelationMatrix& c) {
  json matrix = json::array();
  const std::size_t n = c.names.size();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(number_or_null(c.at(i, j)));
    matrix.push_back(std::move(row));
  }
  json degenerate = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    if (c.degenerate[i]) degenerate.push_back(c.names[i]);
  }
  return {{"names", c.names}, {"r", std::move(matrix)}, {"constant", std::move(degenerate)}};
}

json cv_json(const model::CVResult& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    folds.push_back({{"repeat", f.repeat},
                     {"fold", f.fold},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"accuracy", f.metrics.accuracy},
                     {"f1", f.metrics.f1},
                     {"auc", f.metrics.auc},
                     {"test_subjects", f.test_subjects},
                     {"speaker_disjoint", f.speaker_disjoint}});
  }
  return {{"folds", std::move(folds)},
          {"mean", {{"accuracy", r.mean.accuracy}, {"f1", r.mean.f1}, {"auc", r.mean.auc}}},
          {"repeat_auc", r.repeat_auc},
          {"auc_variance", r.auc_variance},
          {"assignments", r.assignments},
          {"speaker_disjoint", r.speaker_disjoint}};
}

json importance_json(const std::vector<model::FeatureScore>& scores) { return scores_json(scores, "gain"); }

json ablation_json(const model::AblationTable& t, const std::vector<std::string>& dataset_names) {
  json auc = json::array();
  for (const auto& row : t.auc) {
    json r = json::array();
    for (double v : row) r.push_back(number_or_null(v));
    auc.push_back(std::move(r));
  }
  json mean = json::array();
  for (double v : t.mean_auc) mean.push_back(number_or_null(v));
  return {{"groups", t.groups}, {"datasets", dataset_names}, {"auc", std::move(auc)}, {"mean_auc", std::move(mean)}};
}

std::vector<Histogram> emit_histograms(const FeatureMatrix& X, int bins) {
  if (bins < 1) throw std::invalid_argument("histograms: bins must be positive");
  std::vector<std::pair<std::string, int>> groups;
  if (X.labeled()) {
    groups = {{"label_0", 0}, {"label_1", 1}};
  } else {
    groups = {{"all", -1}};
  }
  std::vector<Histogram> out;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const double v = X.at(r, c);
      if (is_missing(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
    if (!(hi > lo)) hi = lo + 1.0;
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b) edges[static_cast<std::size_t>(b)] = lo + (hi - lo) * b / bins;
    for (const auto& [name, label] : groups) {
      Histogram h{X.columns[c], name, edges, std::vector<double>(static_cast<std::size_t>(bins), 0.0)};
      std::size_t n = 0;
      for (std::size_t r = 0; r < X.rows(); ++r) {
        const double v = X.at(r, c);
        if (is_missing(v) || (label >= 0 && X.labels[r] != label)) continue;
        const auto b = std::min<std::size_t>(static_cast<std::size_t>(bins - 1),
                                             static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * bins)));
        h.values[b] += 1.0;
        ++n;
      }
      if (n > 0) {
        for (auto& v : h.values) v /= static_cast<double>(n);
      }
      out.push_back(std::move(h));
    }
  }
  return out;
}

std::string histograms_csv(const std::vector<Histogram>& hs) {
  std::ostringstream out;
  out << "feature,group,bin,lower,upper,value\n";
  for (const auto& h : hs) {
    for (std::size_t b = 0; b < h.values.size(); ++b) {
      out << dataset::csv_escape(h.feature) << ',' << h.group << ',' << b << ',' << dataset::format_value(h.edges[b])
          << ',' << dataset::format_value(h.edges[b + 1]) << ',' << dataset::format_value(h.values[b]) << '\n';
    }
  }
  return out.str();
}

json histograms_json(const std::vector<Histogram>& hs) {
  json series = json::array();
  std::size_t bins = 0;
  for (const auto& h : hs) {
    bins = h.values.size();
    series.push_back({{"feature", h.feature}, {"group", h.group}, {"edges", h.edges}, {"values", h.values}});
  }
  return {{"bins", bins}, {"series", std::move(series)}};
}

std::vector<CorpusEntry> load_corpus_index(const std::string& path) {
  const auto table = dataset::read_csv(path);
  const auto col = [&](const char* name, bool required) {
    const auto c = table.column(name);
    if (c < 0 && required) throw std::runtime_error(path + ": corpus index lacks a '" + name + "' column");
    return c;
  };
  const auto id = col("recording_id", true), subject = col("subject_id", true), audio = col("audio", true),
             conllu = col("conllu", true), trees = col("trees", false), emb = col("embeddings", false);
  const fs::path base = fs::path(path).parent_path();
  const auto resolve = [&](const std::string& p) -> std::string {
    if (p.empty()) return {};
    const fs::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).lexically_normal().string();
  };
  std::vector<CorpusEntry> out;
  for (const auto& row : table.rows) {
    out.push_back(CorpusEntry{row[id], row[subject], resolve(row[audio]), resolve(row[conllu]),
                              trees >= 0 ? resolve(row[trees]) : std::string(),
                              emb >= 0 ? resolve(row[emb]) : std::string()});
  }
  return out;
}

ExtractedTables extract_corpus(const std::vector<CorpusEntry>& entries, const PipelineConfig& cfg) {
  const auto sentiment = cfg.lexicon.empty() ? linguistic::SentimentConfig::defaults() : linguistic::load_lexicon(cfg.lexicon);
  const auto acfg = cfg.acoustic_config();
  const auto lcfg = cfg.linguistic_config();
  std::vector<FeatureMatrix> acoustic_rows, linguistic_rows;
  for (const auto& e : entries) {
    try {
      const auto audio = audio::load_canonical(e.audio);
      FeatureMatrix a = dataset::acoustic_row(e.recording_id, acoustic::extract_acoustic(audio.audio, acfg));
      const auto t = transcript::load_transcript(e.conllu, e.trees, e.embeddings);
      FeatureMatrix l = dataset::linguistic_row(e.recording_id, linguistic::extract_linguistic(t, sentiment, lcfg));
      a.subject_ids[0] = l.subject_ids[0] = e.subject_id;
      acoustic_rows.push_back(std::move(a));
      linguistic_rows.push_back(std::move(l));
    } catch (const std::exception& ex) {
      throw std::runtime_error("recording '" + e.recording_id + "': " + ex.what());
    }
  }
  return {dataset::concat_rows(acoustic_rows), dataset::concat_rows(linguistic_rows)};
}

ReportBundle run_pipeline(const PipelineConfig& cfg, const std::vector<std::string>& command_line) {
  ReportBundle bundle;
  RunManifest& man = bundle.manifest;
  man.command_line = command_line;
  man.config = config_snapshot(cfg);
  man.started = timestamp_now();

  const fs::path out_dir = fs::absolute(cfg.output).lexically_normal();
  const fs::path staging = out_dir.parent_path() / ("." + out_dir.filename().string() + ".staging");
  std::map<std::string, std::string> text_files;  // CSV and model outputs
  std::map<std::string, std::pair<std::string, json>> reports;  // file -> (kind, data)

  std::string current = "setup";
  const auto stage = [&](const char* name, const auto& fn) {
    current = name;
    fn();
  };

  try {
    dataset::FeatureManifest manifest;
    stage("manifest", [&] {
      manifest = cfg.manifest.empty() ? dataset::default_manifest() : dataset::load_manifest(cfg.manifest);
      dataset::validate_manifest(manifest);
      man.manifest_hash = manifest.hash();
    });

    FeatureMatrix rows;
    std::optional<model::Instrument> instrument;
    std::vector<dataset::LabelRecord> labels;
    stage("load", [&] {
      if (cfg.features.empty() && cfg.corpus.empty()) throw std::runtime_error("config names no feature or corpus input");
      instrument = model::parse_instrument(cfg.instrument);
      for (const std::string* p : {&cfg.features, &cfg.corpus, &cfg.external, &cfg.labels, &cfg.lexicon, &cfg.manifest}) {
        if (!p->empty()) man.input_digests[*p] = file_digest(*p);
      }
      if (!cfg.labels.empty()) labels = dataset::read_labels(cfg.labels, instrument);
    });

    if (!cfg.features.empty()) {
      stage("load", [&] {
        rows = dataset::read_feature_csv(cfg.features);
        if (!labels.empty()) rows = attach_labels(std::move(rows), labels);
      });
    } else {
      std::vector<CorpusEntry> entries;
      ExtractedTables tables;
      std::vector<dataset::ExternalRecord> external;
      stage("extract", [&] {
        dataset::check_registries(manifest);
        entries = load_corpus_index(cfg.corpus);
        for (const auto& e : entries) {
          for (const std::string* p : {&e.audio, &e.conllu, &e.trees, &e.embeddings}) {
            if (!p->empty()) man.input_digests[*p] = file_digest(*p);
          }
        }
        tables = extract_corpus(entries, cfg);
      });
      stage("ingest", [&] {
        if (!cfg.external.empty()) external = dataset::ingest_external(cfg.external);
      });
      stage("assemble", [&] {
        auto assembled = dataset::assemble(tables.acoustic, tables.linguistic, external, labels, manifest);
        if (labels.empty()) {
          std::map<std::string, std::string> subject_of;
          for (const auto& e : entries) subject_of[e.recording_id] = e.subject_id;
          for (std::size_t r = 0; r < assembled.matrix.rows(); ++r) {
            assembled.matrix.subject_ids[r] = subject_of[assembled.matrix.row_ids[r]];
          }
        }
        rows = std::move(assembled.matrix);
        text_files["features.csv"] = dataset::feature_csv(rows);
        reports["completeness.json"] = {"completeness", dataset::completeness_to_json(assembled.completeness)};
      });
    }

    FeatureMatrix X = rows;
    stage("aggregate", [&] {
      if (cfg.aggregate) X = model::aggregate_subjects(rows);
    });

    const bool modelling = cfg.stats || cfg.cv || cfg.train || cfg.explain || cfg.ablate;
    if (modelling && !X.labeled()) {
      current = "load";
      throw std::runtime_error("modelling stages need labels");
    }

    if (cfg.stats) {
      stage("stats", [&] {
        const auto cmp = stats::compare_groups(X, X.labels, cfg.compare_options());
        reports["comparisons.json"] = {"comparisons", comparisons_json(cmp, X, manifest, cfg.alpha)};
      });
    }
    if (cfg.correlations) {
      stage("correlations", [&] { reports["correlations.json"] = {"correlations", correlations_json(stats::correlation_matrix(X))}; });
    }
    if (cfg.cv) {
      stage("cv", [&] { reports["cv.json"] = {"cv", cv_json(model::cross_validate(X, cfg.cv_config()))}; });
    }

    model::GBTModel fitted;
    FeatureMatrix imputed;
    if (cfg.train || cfg.explain) {
      stage("train", [&] {
        model::MedianImputer imputer;
        imputer.fit(X);
        imputed = imputer.transform(X);
        fitted = model::train_gbt(imputed, cfg.gbt_config());
        fitted.manifest_hash = man.manifest_hash;
        text_files["model.json"] = model::serialize_model(fitted);
      });
    }
    if (cfg.explain) {
      stage("explain", [&] {
        const auto importance = model::gain_importance(fitted);
        reports["importance.json"] = {"importance", importance_json(importance)};

        json shap_rows = json::array();
        std::vector<double> mean_abs(imputed.cols(), 0.0);
        double base = model::expected_margin(fitted);
        for (std::size_t r = 0; r < imputed.rows(); ++r) {
          const auto e = model::tree_shap(fitted, imputed.row(r));
          for (std::size_t c = 0; c < e.phi.size(); ++c) mean_abs[c] += std::fabs(e.phi[c]);
          shap_rows.push_back({{"id", imputed.row_ids[r]}, {"phi", e.phi}, {"target", e.target}});
        }
        std::vector<model::FeatureScore> shap_rank;
        for (std::size_t c = 0; c < imputed.cols(); ++c) {
          shap_rank.push_back({c, imputed.columns[c], imputed.rows() ? mean_abs[c] / static_cast<double>(imputed.rows()) : 0.0});
        }
        std::stable_sort(shap_rank.begin(), shap_rank.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
        reports["shap.json"] = {"shap", {{"features", imputed.columns},
                                         {"base_value", base},
                                         {"rows", std::move(shap_rows)},
                                         {"mean_abs", scores_json(shap_rank, "value")}}};

        const std::size_t n_lime = cfg.lime_instances > 0
                                       ? std::min<std::size_t>(static_cast<std::size_t>(cfg.lime_instances), imputed.rows())
                                       : imputed.rows();
        std::vector<std::vector<double>> weights;
        json instances = json::array();
        for (std::size_t r = 0; r < n_lime; ++r) {
          auto lc = cfg.lime_config();
          lc.seed = cfg.seed + r;
          const auto e = model::lime_explain(fitted, imputed.row(r), imputed, lc);
          instances.push_back({{"id", imputed.row_ids[r]}, {"weights", e.weights}, {"intercept", e.intercept}});
          weights.push_back(e.weights);
        }
        reports["lime.json"] = {"lime", {{"features", imputed.columns},
                                         {"instances", std::move(instances)},
                                         {"ranking", scores_json(model::aggregate_lime(weights, imputed.columns), "value")}}};

        json curves = json::array();
        int emitted = 0;
        for (const auto& s : importance) {
          if (emitted >= cfg.pdp_features || !(s.value > 0.0)) break;
          const auto curve = model::pdp(fitted, imputed, s.index, cfg.pdp_grid);
          curves.push_back({{"feature", curve.feature}, {"grid", curve.grid}, {"values", curve.values}});
          ++emitted;
        }
        reports["pdp.json"] = {"pdp", std::move(curves)};
      });
    }
    if (cfg.ablate) {
      stage("ablate", [&] {
        const FeatureMatrix sets[] = {X};
        const auto table = model::ablation(sets, manifest.groups(), cfg.cv_config());
        reports["ablation.json"] = {"ablation", ablation_json(table, {"input"})};
      });
    }
    if (cfg.histograms) {
      stage("histograms", [&] {
        const auto h = emit_histograms(rows, cfg.bins);
        text_files["histograms.csv"] = histograms_csv(h);
        reports["histograms.json"] = {"histograms", histograms_json(h)};
      });
    }

    stage("report", [&] {
      man.finished = timestamp_now();
      std::vector<std::string> names;
      for (const auto& [name, v] : text_files) names.push_back(name);
      for (const auto& [name, v] : reports) names.push_back(name);
      names.push_back("run_manifest.json");
      std::sort(names.begin(), names.end());
      reports["run_manifest.json"] = {"run_manifest", {{"files", names}}};

      fs::remove_all(staging);
      fs::create_directories(staging);
      const auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream f(staging / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (staging / name).string());
        f << content;
        if (!f) throw std::runtime_error("write failed for " + (staging / name).string());
      };
      for (const auto& [name, content] : text_files) write(name, content);
      for (const auto& [name, entry] : reports) {
        const json doc = make_report(entry.first, entry.second, man);
        const auto errors = validate_schema(report_schema(), doc);
        if (!errors.empty()) throw std::runtime_error(name + " violates the report schema: " + errors.front());
        write(name, doc.dump(1) + "\n");
      }
      clear_previous_bundle(out_dir);
      fs::rename(staging, out_dir);
      bundle.directory = out_dir.string();
      bundle.files = names;
    });
  } catch (const std::exception& e) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw PipelineError(current, e.what());
  }
  return bundle;
}

}  // namespace voicemark::pipeline
