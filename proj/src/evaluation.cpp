#include "voicemark/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

namespace voicemark::model {
namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

struct SubjectIndex {
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> rows;
  std::vector<int> labels;
};

SubjectIndex index_subjects(const FeatureMatrix& X) {
  SubjectIndex idx;
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const std::string& s = X.subject_ids.empty() ? X.row_ids[r] : X.subject_ids[r];
    auto [it, inserted] = where.emplace(s, idx.ids.size());
    if (inserted) {
      idx.ids.push_back(s);
      idx.rows.emplace_back();
    }
    idx.rows[it->second].push_back(r);
  }
  if (X.labeled()) {
    for (const auto& rows : idx.rows) {
      std::size_t pos = 0;
      for (auto r : rows) pos += static_cast<std::size_t>(X.labels[r] == 1);
      idx.labels.push_back(2 * pos >= rows.size() ? 1 : 0);
    }
  }
  return idx;
}

ClassificationMetrics mean_metrics(const std::vector<FoldResult>& folds) {
  ClassificationMetrics m{0.0, 0.0, 0.0};
  if (folds.empty()) return m;
  for (const auto& f : folds) {
    m.accuracy += f.metrics.accuracy;
    m.f1 += f.metrics.f1;
    m.auc += f.metrics.auc;
  }
  const auto n = static_cast<double>(folds.size());
  m.accuracy /= n;
  m.f1 /= n;
  m.auc /= n;
  return m;
}

}  // namespace

double auc_roc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw std::invalid_argument("auc: length mismatch");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (y_true[i] == 1) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) return 0.5;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

ClassificationMetrics metrics(std::span<const int> y_true, std::span<const double> scores, double threshold) {
  if (y_true.size() != scores.size()) throw std::invalid_argument("metrics: length mismatch");
  ClassificationMetrics m;
  if (y_true.empty()) return m;
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int pred = scores[i] >= threshold ? 1 : 0;
    correct += static_cast<std::size_t>(pred == y_true[i]);
    if (pred == 1 && y_true[i] == 1) ++tp;
    if (pred == 1 && y_true[i] == 0) ++fp;
    if (pred == 0 && y_true[i] == 1) ++fn;
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());
  const double denom = static_cast<double>(2 * tp + fp + fn);
  m.f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
  m.auc = auc_roc(y_true, scores);
  return m;
}

double median(std::vector<double> values) {
  if (values.empty()) return kMissing;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return std::midpoint(lower, upper);
}

FeatureMatrix aggregate_subjects(const FeatureMatrix& rows) {
  const SubjectIndex idx = index_subjects(rows);
  FeatureMatrix out;
  out.columns = rows.columns;
  std::vector<double> agg(rows.cols());
  std::vector<double> buf;
  for (std::size_t s = 0; s < idx.ids.size(); ++s) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      buf.clear();
      for (auto r : idx.rows[s]) {
        if (!is_missing(rows.at(r, c))) buf.push_back(rows.at(r, c));
      }
      agg[c] = median(buf);
    }
    out.append_row(idx.ids[s], idx.ids[s], agg, rows.labeled() ? idx.labels[s] : -1);
  }
  return out;
}

Instrument parse_instrument(const std::string& name) {
  std::string up;
  for (char ch : name) {
    if (ch != '-' && ch != '_') up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
  }
  if (up == "PHQ9") return Instrument::PHQ9;
  if (up == "GAD7") return Instrument::GAD7;
  if (up == "ASRS") return Instrument::ASRS;
  throw std::invalid_argument("unknown instrument: " + name);
}

int instrument_threshold(Instrument instrument) noexcept {
  switch (instrument) {
    case Instrument::PHQ9: return 15;
    case Instrument::GAD7: return 10;
    case Instrument::ASRS: return 13;
  }
  return 0;
}

int instrument_max_score(Instrument instrument) noexcept {
  switch (instrument) {
    case Instrument::PHQ9: return 27;
    case Instrument::GAD7: return 21;
    case Instrument::ASRS: return 72;
  }
  return 0;
}

std::vector<int> binarize_labels(std::span<const int> scores, Instrument instrument) {
  const int threshold = instrument_threshold(instrument);
  const int max_score = instrument_max_score(instrument);
  std::vector<int> out;
  out.reserve(scores.size());
  for (int s : scores) {
    if (s < 0 || s > max_score) {
      throw std::out_of_range("score " + std::to_string(s) + " outside 0.." + std::to_string(max_score));
    }
    out.push_back(s >= threshold ? 1 : 0);
  }
  return out;
}

void MedianImputer::fit(const FeatureMatrix& X) {
  medians_.assign(X.cols(), 0.0);
  imputed_.assign(X.cols(), false);
  std::vector<double> buf;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    buf.clear();
    for (std::size_t r = 0; r < X.rows(); ++r) {
      if (is_missing(X.at(r, c))) {
        imputed_[c] = true;
      } else {
        buf.push_back(X.at(r, c));
      }
    }
    medians_[c] = buf.empty() ? 0.0 : median(buf);
  }
}

FeatureMatrix MedianImputer::transform(const FeatureMatrix& X) const {
  if (X.cols() != medians_.size()) throw std::invalid_argument("impute: column count mismatch");
  FeatureMatrix out = X;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      if (is_missing(out.at(r, c))) out.at(r, c) = medians_[c];
    }
  }
  return out;
}

CVResult cross_validate(const FeatureMatrix& X, const CVConfig& config) {
  if (config.k < 2) throw CVError("cv: k must be at least 2");
  if (config.repeats < 1) throw CVError("cv: repeats must be at least 1");
  if (!X.labeled()) throw CVError("cv: matrix has no labels");
  const SubjectIndex idx = index_subjects(X);
  std::vector<std::size_t> by_class[2];
  for (std::size_t s = 0; s < idx.ids.size(); ++s) by_class[idx.labels[s]].push_back(s);
  const bool loso = static_cast<std::size_t>(config.k) == idx.ids.size();
  for (int c = 0; c < 2; ++c) {
    const std::size_t need = loso ? 2 : static_cast<std::size_t>(config.k);
    if (by_class[c].size() < need) {
      throw CVError("cv: class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                    " subjects, fewer than " + std::to_string(need));
    }
  }

  CVResult result;
  const auto k = static_cast<std::size_t>(config.k);
  for (int rep = 0; rep < config.repeats; ++rep) {
    std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(rep)));
    std::vector<int> fold_of(idx.ids.size(), 0);
    std::size_t offset = 0;
    for (auto& members : by_class) {
      std::vector<std::size_t> order = members;
      shuffle(order, rng);
      for (std::size_t i = 0; i < order.size(); ++i) fold_of[order[i]] = static_cast<int>((offset + i) % k);
      offset += order.size();
    }
    std::map<std::string, int> assignment;
    for (std::size_t s = 0; s < idx.ids.size(); ++s) assignment[idx.ids[s]] = fold_of[s];
    result.assignments.push_back(std::move(assignment));

    std::vector<FoldResult> rep_folds;
    for (std::size_t f = 0; f < k; ++f) {
      std::vector<std::size_t> train_rows, test_rows;
      std::set<std::string> train_subjects, test_subjects;
      for (std::size_t s = 0; s < idx.ids.size(); ++s) {
        const bool test = static_cast<std::size_t>(fold_of[s]) == f;
        auto& rows = test ? test_rows : train_rows;
        rows.insert(rows.end(), idx.rows[s].begin(), idx.rows[s].end());
        (test ? test_subjects : train_subjects).insert(idx.ids[s]);
      }
      std::sort(train_rows.begin(), train_rows.end());
      std::sort(test_rows.begin(), test_rows.end());
      FoldResult fr;
      fr.repeat = rep;
      fr.fold = static_cast<int>(f);
      fr.n_train = train_rows.size();
      fr.n_test = test_rows.size();
      fr.test_subjects.assign(test_subjects.begin(), test_subjects.end());
      for (const auto& s : test_subjects) {
        if (train_subjects.count(s)) fr.speaker_disjoint = false;
      }
      result.speaker_disjoint = result.speaker_disjoint && fr.speaker_disjoint;

      const FeatureMatrix train_raw = X.select_rows(train_rows);
      MedianImputer imputer;
      imputer.fit(train_raw);
      const FeatureMatrix train = imputer.transform(train_raw);
      const FeatureMatrix test = imputer.transform(X.select_rows(test_rows));
      GBTConfig gbt = config.gbt;
      gbt.seed = config.seed;
      const GBTModel model = train_gbt(train, gbt);
      const std::vector<double> p = model.predict_proba(test);
      fr.metrics = metrics(test.labels, p);
      rep_folds.push_back(fr);
    }
    result.repeat_auc.push_back(mean_metrics(rep_folds).auc);
    result.folds.insert(result.folds.end(), rep_folds.begin(), rep_folds.end());
  }
  result.mean = mean_metrics(result.folds);
  if (result.repeat_auc.size() > 1) {
    const double m = std::accumulate(result.repeat_auc.begin(), result.repeat_auc.end(), 0.0) /
                     static_cast<double>(result.repeat_auc.size());
    double ss = 0.0;
    for (double a : result.repeat_auc) ss += (a - m) * (a - m);
    result.auc_variance = ss / static_cast<double>(result.repeat_auc.size() - 1);
  }
  return result;
}

AblationTable ablation(std::span<const FeatureMatrix> datasets, const GroupColumns& groups, const CVConfig& config) {
  AblationTable table;
  for (const auto& g : groups) table.groups.push_back(g.first);
  table.auc.assign(datasets.size(), std::vector<double>(groups.size(), kMissing));
  table.mean_auc.assign(groups.size(), kMissing);
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      std::vector<std::size_t> cols;
      for (const auto& name : groups[g].second) {
        const auto c = datasets[d].column_index(name);
        if (c >= 0) cols.push_back(static_cast<std::size_t>(c));
      }
      if (cols.empty()) continue;
      table.auc[d][g] = cross_validate(datasets[d].select_columns(cols), config).mean.auc;
    }
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      if (!is_missing(table.auc[d][g])) {
        sum += table.auc[d][g];
        ++n;
      }
    }
    if (n > 0) table.mean_auc[g] = sum / static_cast<double>(n);
  }
  return table;
}

}  // namespace voicemark::model
