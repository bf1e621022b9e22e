// voicemark command-line front end.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voicemark/audio.hpp"
#include "voicemark/config.hpp"
#include "voicemark/dataset.hpp"
#include "voicemark/evaluation.hpp"
#include "voicemark/explain.hpp"
#include "voicemark/gbt.hpp"
#include "voicemark/pipeline.hpp"
#include "voicemark/stats.hpp"
#include "voicemark/synthetic.hpp"
#include "voicemark/transcript.hpp"

namespace vm = voicemark;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;  // section.key=value
  std::string manifest_path;
  std::vector<std::string> argv;
};

vm::pipeline::PipelineConfig resolve_config(const Globals& g) {
  auto cfg = g.config_path.empty() ? vm::pipeline::PipelineConfig{} : vm::pipeline::load_config(g.config_path);
  for (const auto& o : g.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw vm::pipeline::ConfigError("--set expects section.key=value, got '" + o + "'");
    vm::pipeline::set_option(cfg, o.substr(0, eq), o.substr(eq + 1));
  }
  vm::pipeline::apply_environment(cfg);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.manifest_path.empty()) cfg.manifest = g.manifest_path;
  return cfg;
}

vm::dataset::FeatureManifest resolve_manifest(const vm::pipeline::PipelineConfig& cfg) {
  return cfg.manifest.empty() ? vm::dataset::default_manifest() : vm::dataset::load_manifest(cfg.manifest);
}

vm::pipeline::RunManifest run_manifest(const Globals& g, const vm::pipeline::PipelineConfig& cfg,
                                       const std::vector<std::string>& inputs) {
  vm::pipeline::RunManifest m;
  m.command_line = g.argv;
  m.config = vm::pipeline::config_snapshot(cfg);
  m.manifest_hash = resolve_manifest(cfg).hash();
  for (const auto& p : inputs) {
    if (!p.empty()) m.input_digests[p] = vm::pipeline::file_digest(p);
  }
  m.started = m.finished = vm::pipeline::timestamp_now();
  return m;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void write_report(const std::string& path, const std::string& kind, json data, const vm::pipeline::RunManifest& m) {
  const json doc = vm::pipeline::make_report(kind, std::move(data), m);
  const auto errors = vm::pipeline::validate_schema(vm::pipeline::report_schema(), doc);
  if (!errors.empty()) throw std::runtime_error(kind + " report violates the schema: " + errors.front());
  write_text(path, doc.dump(1) + "\n");
}

vm::FeatureMatrix load_features(const std::vector<std::string>& paths, const vm::pipeline::PipelineConfig& cfg,
                                const std::string& labels_path) {
  std::vector<vm::FeatureMatrix> parts;
  for (const auto& p : paths) parts.push_back(vm::dataset::read_feature_csv(p));
  vm::FeatureMatrix X = vm::dataset::concat_rows(parts);
  if (!labels_path.empty()) {
    const auto labels = vm::dataset::read_labels(labels_path, vm::model::parse_instrument(cfg.instrument));
    std::map<std::string, const vm::dataset::LabelRecord*> by_id;
    for (const auto& l : labels) by_id[l.recording_id] = &l;
    X.labels.clear();
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const auto it = by_id.find(X.row_ids[r]);
      if (it == by_id.end()) throw std::runtime_error("no label for recording '" + X.row_ids[r] + "'");
      X.subject_ids[r] = it->second->subject_id;
      X.labels.push_back(it->second->label);
    }
  }
  return X;
}

vm::FeatureMatrix modelling_matrix(const vm::FeatureMatrix& X, const vm::pipeline::PipelineConfig& cfg) {
  if (!X.labeled()) throw std::runtime_error("feature table has no labels; pass --labels or a labeled CSV");
  return cfg.aggregate ? vm::model::aggregate_subjects(X) : X;
}

bool wants_json(const std::string& path) { return fs::path(path).extension() == ".json"; }

/// One recording: {name: value}; several: {recording_id: {name: value}}. Missing values become null.
json table_json(const vm::FeatureMatrix& X) {
  const auto row_object = [&](std::size_t r) {
    json o = json::object();
    for (std::size_t c = 0; c < X.cols(); ++c) {
      const double v = X.at(r, c);
      o[X.columns[c]] = vm::is_missing(v) ? json(nullptr) : json(v);
    }
    return o;
  };
  if (X.rows() == 1) return row_object(0);
  json out = json::object();
  for (std::size_t r = 0; r < X.rows(); ++r) out[X.row_ids[r]] = row_object(r);
  return out;
}

void write_table(const std::string& path, const vm::FeatureMatrix& X) {
  write_text(path, wants_json(path) ? table_json(X).dump(1) + "\n" : vm::dataset::feature_csv(X));
}

json scores_json(const std::vector<vm::model::FeatureScore>& scores, const char* key) {
  json out = json::array();
  for (const auto& s : scores) out.push_back({{"feature", s.name}, {key, s.value}});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voicemark: interpretable voice and language markers"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", vm::pipeline::kToolVersion);
  Globals g;
  g.argv.assign(argv, argv + argc);
  if (!g.argv.empty()) g.argv[0] = fs::path(g.argv[0]).filename().string();
  app.add_option("--config", g.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "seed (overrides config and VOICEMARK_SEED)");
  app.add_option("--set", g.overrides, "override a config key: section.key=value");
  app.add_option("--manifest", g.manifest_path, "feature manifest JSON")->check(CLI::ExistingFile);

  std::vector<std::string> inputs, ids, feature_paths, positional_features;
  std::string out, corpus, conllu, trees, embeddings, lexicon, external, labels, acoustic_csv, linguistic_csv, model_path,
      completeness, feature_name, synth_kind, explain_kind;
  int rate = 16000, k = 4, repeats = 1, bins = 40, grid = 20, instances = 0;
  std::optional<double> pitch_floor, pitch_ceiling, alpha;
  bool no_aggregate = false, print_defaults = false;

  auto* decode = app.add_subcommand("decode", "decode a WAV file to canonical mono float32 + JSON sidecar");
  decode->add_option("input", inputs, "WAV file")->required()->check(CLI::ExistingFile);
  decode->add_option("-o,--out", out, "output .f32 path")->required();
  decode->add_option("--rate", rate, "target sample rate");

  auto* xa = app.add_subcommand("extract-acoustic", "acoustic features per recording");
  xa->add_option("input,-i,--input", inputs, "WAV files")->check(CLI::ExistingFile);
  xa->add_option("--pitch-floor", pitch_floor, "pitch floor (Hz)");
  xa->add_option("--pitch-ceiling", pitch_ceiling, "pitch ceiling (Hz)");
  xa->add_option("--id", ids, "recording ids (default: file stem)");
  xa->add_option("--corpus", corpus, "corpus index CSV")->check(CLI::ExistingFile);
  xa->add_option("-o,--out", out, "output CSV, or JSON when the path ends in .json (stdout when omitted)");

  auto* xl = app.add_subcommand("extract-linguistic", "linguistic features per transcript");
  xl->add_option("conllu,--conllu", conllu, "CoNLL-U transcript")->check(CLI::ExistingFile);
  xl->add_option("--trees", trees, "bracketed constituency trees")->check(CLI::ExistingFile);
  xl->add_option("--embeddings", embeddings, "sentence embeddings JSONL")->check(CLI::ExistingFile);
  xl->add_option("--id", ids, "recording id (default: file stem)");
  xl->add_option("--corpus", corpus, "corpus index CSV")->check(CLI::ExistingFile);
  xl->add_option("--lexicon", lexicon, "valence lexicon TSV")->check(CLI::ExistingFile);
  xl->add_option("-o,--out", out, "output CSV, or JSON when the path ends in .json (stdout when omitted)");

  auto* ingest = app.add_subcommand("ingest", "validate a transcript and its sidecars, or external probabilities");
  ingest->add_option("conllu", conllu, "CoNLL-U transcript")->check(CLI::ExistingFile);
  ingest->add_option("--trees", trees, "bracketed constituency trees")->check(CLI::ExistingFile);
  ingest->add_option("--embeddings", embeddings, "sentence embeddings JSONL")->check(CLI::ExistingFile);
  ingest->add_option("--external", external, "external emotion/sarcasm CSV")->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", out, "summary JSON or validated CSV (stdout when omitted)");

  auto* assemble = app.add_subcommand("assemble", "join feature sources into the manifest matrix");
  assemble->add_option("--acoustic", acoustic_csv, "acoustic CSV")->check(CLI::ExistingFile);
  assemble->add_option("--linguistic", linguistic_csv, "linguistic CSV")->check(CLI::ExistingFile);
  assemble->add_option("--external", external, "external CSV")->check(CLI::ExistingFile);
  assemble->add_option("--labels", labels, "labels CSV")->check(CLI::ExistingFile);
  assemble->add_option("--completeness", completeness, "completeness report JSON");
  assemble->add_option("-o,--out", out, "feature CSV (stdout when omitted)");

  auto* stats_cmd = app.add_subcommand("stats", "group comparisons with BH-FDR");
  auto* train = app.add_subcommand("train", "fit the boosted model");
  auto* cv = app.add_subcommand("cv", "subject-disjoint cross-validation");
  auto* histo = app.add_subcommand("histograms", "normalized per-feature histograms as CSV");
  for (auto* sub : {stats_cmd, train, cv, histo}) {
    sub->add_option("table", positional_features, "feature CSV")->check(CLI::ExistingFile);
    sub->add_option("--features", feature_paths, "feature CSV")->check(CLI::ExistingFile);
    sub->add_option("--labels", labels, "labels CSV")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out, "output path (stdout when omitted)");
  }
  for (auto* sub : {stats_cmd, train, cv}) sub->add_flag("--no-aggregate", no_aggregate, "keep one row per recording");
  stats_cmd->add_option("--alpha", alpha, "FDR level");
  cv->add_option("--k", k, "folds")->check(CLI::PositiveNumber);
  cv->add_option("--repeats", repeats, "repetitions")->check(CLI::PositiveNumber);
  histo->add_option("--bins", bins, "bins per feature")->check(CLI::PositiveNumber);

  auto* explain = app.add_subcommand("explain", "model explanations");
  explain->add_option("method", explain_kind, "shap | lime | pdp | importance")
      ->required()
      ->check(CLI::IsMember({"shap", "lime", "pdp", "importance"}));
  explain->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
  explain->add_option("--features", feature_paths, "feature CSV")->check(CLI::ExistingFile);
  explain->add_option("--labels", labels, "labels CSV")->check(CLI::ExistingFile);
  explain->add_option("--feature", feature_name, "PDP feature (default: top five by gain)");
  explain->add_option("--grid", grid, "PDP grid size");
  explain->add_option("--instances", instances, "rows explained by LIME, 0 for all");
  explain->add_flag("--no-aggregate", no_aggregate, "keep one row per recording");
  explain->add_option("-o,--out", out, "output JSON (stdout when omitted)");

  auto* ablate = app.add_subcommand("ablate", "per-group cross-validated AUC");
  ablate->add_option("--features", feature_paths, "one feature CSV per dataset")->required()->check(CLI::ExistingFile);
  ablate->add_option("--groups", g.manifest_path, "manifest JSON with group tags")->check(CLI::ExistingFile);
  ablate->add_option("--k", k, "folds")->check(CLI::PositiveNumber);
  ablate->add_flag("--no-aggregate", no_aggregate, "keep one row per recording");
  ablate->add_option("-o,--out", out, "output JSON (stdout when omitted)");

  auto* report = app.add_subcommand("report", "run the configured pipeline into a report bundle");
  report->add_option("-o,--out", out, "bundle directory (overrides run.output)");
  report->add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  auto* synth = app.add_subcommand("synth", "write seeded synthetic data");
  synth->add_option("kind", synth_kind, "features | corpus")->required()->check(CLI::IsMember({"features", "corpus"}));
  synth->add_option("-o,--out", out, "CSV path (features) or directory (corpus)")->required();
  int subjects = 0, recordings = 0;
  synth->add_option("--subjects", subjects, "subjects (half positive)");
  synth->add_option("--recordings", recordings, "recordings per subject");

  auto* manifest_cmd = app.add_subcommand("manifest", "write the built-in feature manifest");
  manifest_cmd->add_option("-o,--out", out, "output JSON (stdout when omitted)");
  std::string check_path;
  manifest_cmd->add_option("--check", check_path, "verify a manifest file against the built-in one")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = resolve_config(g);
    if (no_aggregate) cfg.aggregate = false;
    if (pitch_floor) cfg.pitch_floor = *pitch_floor;
    if (pitch_ceiling) cfg.pitch_ceiling = *pitch_ceiling;
    if (alpha) cfg.alpha = *alpha;
    feature_paths.insert(feature_paths.begin(), positional_features.begin(), positional_features.end());

    if (decode->parsed()) {
      const auto canon = vm::audio::load_canonical(inputs.front(), rate);
      std::ofstream raw(out, std::ios::binary);
      if (!raw) throw std::runtime_error("cannot write " + out);
      for (double v : canon.audio.samples) {
        const float f = static_cast<float>(v);
        raw.write(reinterpret_cast<const char*>(&f), sizeof f);
      }
      const json sidecar = {{"format", "float32le"},
                            {"channels", 1},
                            {"sample_rate", canon.audio.sample_rate},
                            {"samples", canon.audio.size()},
                            {"duration", canon.audio.duration()},
                            {"silent", canon.silent},
                            {"source", inputs.front()},
                            {"source_digest", vm::pipeline::file_digest(inputs.front())}};
      write_text(out + ".json", sidecar.dump(1) + "\n");
    } else if (xa->parsed()) {
      std::vector<std::pair<std::string, std::string>> items;  // id, path
      if (!corpus.empty()) {
        for (const auto& e : vm::pipeline::load_corpus_index(corpus)) items.emplace_back(e.recording_id, e.audio);
      }
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        items.emplace_back(i < ids.size() ? ids[i] : fs::path(inputs[i]).stem().string(), inputs[i]);
      }
      if (items.empty()) throw std::runtime_error("no input audio: pass --input or --corpus");
      std::vector<vm::FeatureMatrix> rows;
      for (const auto& [id, path] : items) {
        const auto canon = vm::audio::load_canonical(path);
        rows.push_back(vm::dataset::acoustic_row(id, vm::acoustic::extract_acoustic(canon.audio, cfg.acoustic_config())));
      }
      auto table = vm::dataset::concat_rows(rows);
      table.subject_ids = table.row_ids;
      write_table(out, table);
    } else if (xl->parsed()) {
      if (!lexicon.empty()) cfg.lexicon = lexicon;
      std::vector<vm::pipeline::CorpusEntry> entries;
      if (!corpus.empty()) entries = vm::pipeline::load_corpus_index(corpus);
      if (!conllu.empty()) {
        entries.push_back({ids.empty() ? fs::path(conllu).stem().string() : ids.front(), "", "", conllu, trees, embeddings});
      }
      if (entries.empty()) throw std::runtime_error("no transcript: pass --conllu or --corpus");
      const auto sentiment = cfg.lexicon.empty() ? vm::linguistic::SentimentConfig::defaults()
                                                 : vm::linguistic::load_lexicon(cfg.lexicon);
      std::vector<vm::FeatureMatrix> rows;
      for (const auto& e : entries) {
        const auto t = vm::transcript::load_transcript(e.conllu, e.trees, e.embeddings);
        rows.push_back(vm::dataset::linguistic_row(e.recording_id,
                                                   vm::linguistic::extract_linguistic(t, sentiment, cfg.linguistic_config())));
      }
      write_table(out, vm::dataset::concat_rows(rows));
    } else if (ingest->parsed() && !conllu.empty()) {
      const auto t = vm::transcript::load_transcript(conllu, trees, embeddings);
      json summary = {{"source", conllu},
                      {"sentences", t.sentence_count()},
                      {"tokens", t.token_count()},
                      {"words", t.word_count()},
                      {"trees", t.trees.has_value()},
                      {"embeddings", t.embeddings.has_value()}};
      if (t.embeddings && !t.embeddings->empty()) summary["embedding_dim"] = t.embeddings->front().size();
      write_text(out, summary.dump(1) + "\n");
    } else if (ingest->parsed()) {
      if (external.empty()) throw std::runtime_error("ingest needs a CoNLL-U file or --external");
      const auto records = vm::dataset::ingest_external(external);
      auto table = vm::dataset::external_table(records);
      std::string text = "recording_id,emotion_neu,emotion_hap,emotion_ang,emotion_sad,sarcasm_prob\n";
      for (std::size_t r = 0; r < table.rows(); ++r) {
        text += vm::dataset::csv_escape(table.row_ids[r]);
        for (std::size_t c = 0; c < table.cols(); ++c) text += "," + vm::dataset::format_value(table.at(r, c));
        text += "\n";
      }
      write_text(out, text);
    } else if (assemble->parsed()) {
      const auto manifest = resolve_manifest(cfg);
      vm::dataset::check_registries(manifest);
      const vm::FeatureMatrix empty_a = [&] {
        vm::FeatureMatrix m;
        m.columns = manifest.names_from(vm::dataset::Source::Acoustic);
        return m;
      }();
      const vm::FeatureMatrix empty_l = [&] {
        vm::FeatureMatrix m;
        m.columns = manifest.names_from(vm::dataset::Source::Linguistic);
        return m;
      }();
      const auto a = acoustic_csv.empty() ? empty_a : vm::dataset::read_feature_csv(acoustic_csv);
      const auto l = linguistic_csv.empty() ? empty_l : vm::dataset::read_feature_csv(linguistic_csv);
      const auto e = external.empty() ? std::vector<vm::dataset::ExternalRecord>{} : vm::dataset::ingest_external(external);
      const auto lab = labels.empty() ? std::vector<vm::dataset::LabelRecord>{}
                                      : vm::dataset::read_labels(labels, vm::model::parse_instrument(cfg.instrument));
      const auto result = vm::dataset::assemble(a, l, e, lab, manifest);
      write_text(out, vm::dataset::feature_csv(result.matrix));
      if (!completeness.empty()) {
        write_report(completeness, "completeness", vm::dataset::completeness_to_json(result.completeness),
                     run_manifest(g, cfg, {acoustic_csv, linguistic_csv, external, labels}));
      }
    } else if (stats_cmd->parsed() || train->parsed() || cv->parsed() || histo->parsed()) {
      if (feature_paths.empty()) throw std::runtime_error("no feature table: pass a CSV path");
      const auto rows = load_features(feature_paths, cfg, labels);
      std::vector<std::string> in = feature_paths;
      in.push_back(labels);
      const auto m = run_manifest(g, cfg, in);
      if (histo->parsed()) {
        write_text(out, vm::pipeline::histograms_csv(vm::pipeline::emit_histograms(rows, bins)));
      } else if (stats_cmd->parsed()) {
        const auto X = modelling_matrix(rows, cfg);
        const auto cmp = vm::stats::compare_groups(X, X.labels, cfg.compare_options());
        write_report(out, "comparisons", vm::pipeline::comparisons_json(cmp, X, resolve_manifest(cfg), cfg.alpha), m);
      } else if (cv->parsed()) {
        auto cc = cfg.cv_config();
        if (cv->count("--k")) cc.k = k;
        if (cv->count("--repeats")) cc.repeats = repeats;
        write_report(out, "cv", vm::pipeline::cv_json(vm::model::cross_validate(modelling_matrix(rows, cfg), cc)), m);
      } else {
        const auto X = modelling_matrix(rows, cfg);
        vm::model::MedianImputer imputer;
        imputer.fit(X);
        auto model = vm::model::train_gbt(imputer.transform(X), cfg.gbt_config());
        model.manifest_hash = m.manifest_hash;
        write_text(out, vm::model::serialize_model(model));
      }
    } else if (explain->parsed()) {
      const auto model = vm::model::deserialize_model(vm::transcript::read_text_file(model_path));
      std::vector<std::string> in{model_path, labels};
      in.insert(in.end(), feature_paths.begin(), feature_paths.end());
      const auto m = run_manifest(g, cfg, in);
      if (explain_kind == "importance") {
        write_report(out, "importance", scores_json(vm::model::gain_importance(model), "gain"), m);
      } else {
        if (feature_paths.empty()) throw std::runtime_error("explain " + explain_kind + " needs --features");
        auto rows = load_features(feature_paths, cfg, labels);
        vm::FeatureMatrix X = rows.labeled() && cfg.aggregate ? vm::model::aggregate_subjects(rows) : rows;
        if (X.columns != model.feature_names) throw std::runtime_error("feature columns do not match the model");
        vm::model::MedianImputer imputer;
        imputer.fit(X);
        X = imputer.transform(X);
        if (explain_kind == "shap") {
          json out_rows = json::array();
          for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto e = vm::model::tree_shap(model, X.row(r));
            out_rows.push_back({{"id", X.row_ids[r]}, {"phi", e.phi}, {"target", e.target}});
          }
          std::vector<vm::model::FeatureScore> rank;
          for (std::size_t c = 0; c < X.cols(); ++c) {
            double s = 0.0;
            for (const auto& row : out_rows) s += std::fabs(row["phi"][c].get<double>());
            rank.push_back({c, X.columns[c], X.rows() ? s / static_cast<double>(X.rows()) : 0.0});
          }
          std::stable_sort(rank.begin(), rank.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
          write_report(out, "shap", {{"features", X.columns}, {"base_value", vm::model::expected_margin(model)},
                                     {"rows", out_rows}, {"mean_abs", scores_json(rank, "value")}}, m);
        } else if (explain_kind == "lime") {
          const std::size_t n = instances > 0 ? std::min<std::size_t>(static_cast<std::size_t>(instances), X.rows()) : X.rows();
          json inst = json::array();
          std::vector<std::vector<double>> weights;
          for (std::size_t r = 0; r < n; ++r) {
            auto lc = cfg.lime_config();
            lc.seed = cfg.seed + r;
            const auto e = vm::model::lime_explain(model, X.row(r), X, lc);
            inst.push_back({{"id", X.row_ids[r]}, {"weights", e.weights}, {"intercept", e.intercept}});
            weights.push_back(e.weights);
          }
          write_report(out, "lime", {{"features", X.columns}, {"instances", inst},
                                     {"ranking", scores_json(vm::model::aggregate_lime(weights, X.columns), "value")}}, m);
        } else {
          std::vector<std::size_t> picked;
          if (!feature_name.empty()) {
            const auto c = X.column_index(vm::dataset::canonical_feature_name(feature_name));
            if (c < 0) throw std::runtime_error("unknown feature '" + feature_name + "'");
            picked.push_back(static_cast<std::size_t>(c));
          } else {
            for (const auto& s : vm::model::gain_importance(model)) {
              if (picked.size() >= 5 || !(s.value > 0.0)) break;
              picked.push_back(s.index);
            }
          }
          json curves = json::array();
          for (auto c : picked) {
            const auto curve = vm::model::pdp(model, X, c, grid);
            curves.push_back({{"feature", curve.feature}, {"grid", curve.grid}, {"values", curve.values}});
          }
          write_report(out, "pdp", curves, m);
        }
      }
    } else if (ablate->parsed()) {
      std::vector<vm::FeatureMatrix> sets;
      for (const auto& p : feature_paths) sets.push_back(modelling_matrix(vm::dataset::read_feature_csv(p), cfg));
      auto cc = cfg.cv_config();
      if (ablate->count("--k")) cc.k = k;
      const auto manifest = resolve_manifest(cfg);
      const auto table = vm::model::ablation(sets, manifest.groups(), cc);
      std::vector<std::string> names;
      for (const auto& p : feature_paths) names.push_back(fs::path(p).stem().string());
      write_report(out, "ablation", vm::pipeline::ablation_json(table, names), run_manifest(g, cfg, feature_paths));
    } else if (report->parsed()) {
      if (print_defaults) {
        std::cout << vm::pipeline::default_config_text();
        return 0;
      }
      if (!out.empty()) cfg.output = out;
      const auto bundle = vm::pipeline::run_pipeline(cfg, g.argv);
      std::cout << bundle.directory << "\n";
      for (const auto& f : bundle.files) std::cout << "  " << f << "\n";
    } else if (synth->parsed()) {
      if (synth_kind == "features") {
        vm::synthetic::FeatureSynthConfig sc;
        sc.seed = cfg.seed;
        if (subjects > 0) sc.subjects = subjects;
        if (recordings > 0) sc.recordings = recordings;
        vm::dataset::write_feature_csv(out, vm::synthetic::synth_features(sc));
      } else {
        vm::synthetic::CorpusSynthConfig sc;
        sc.seed = cfg.seed;
        if (subjects > 0) sc.subjects = subjects;
        if (recordings > 0) sc.recordings = recordings;
        const auto files = vm::synthetic::synth_corpus(out, sc);
        std::cout << files.index << "\n";
      }
    } else if (manifest_cmd->parsed() && !check_path.empty()) {
      const auto loaded = vm::dataset::load_manifest(check_path);
      vm::dataset::validate_manifest(loaded);
      vm::dataset::check_registries(loaded);
      const auto& builtin = vm::dataset::default_manifest();
      if (loaded.hash() != builtin.hash()) {
        throw std::runtime_error("manifest " + check_path + " (" + loaded.hash() + ") differs from the built-in one (" +
                                 builtin.hash() + ")");
      }
      std::cout << check_path << ": " << loaded.size() << " features, hash " << loaded.hash() << "\n";
    } else if (manifest_cmd->parsed()) {
      write_text(out, vm::dataset::manifest_to_json(resolve_manifest(cfg)).dump(2) + "\n");
    }
  } catch (const vm::pipeline::PipelineError& e) {
    std::cerr << "voicemark: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "voicemark: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
