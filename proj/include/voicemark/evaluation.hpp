#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "voicemark/feature_matrix.hpp"
#include "voicemark/gbt.hpp"

namespace voicemark::model {

struct ClassificationMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;   // positive class
  double auc = 0.5;  // Mann-Whitney with midranks
};

ClassificationMetrics metrics(std::span<const int> y_true, std::span<const double> scores, double threshold = 0.5);
double auc_roc(std::span<const int> y_true, std::span<const double> scores);

/// Per-feature median over each subject's rows (mean of the middle pair for even counts).
/// Subjects appear in order of first occurrence; the subject label is the majority row label.
FeatureMatrix aggregate_subjects(const FeatureMatrix& rows);

enum class Instrument { PHQ9, GAD7, ASRS };
Instrument parse_instrument(const std::string& name);
int instrument_threshold(Instrument instrument) noexcept;
int instrument_max_score(Instrument instrument) noexcept;
/// Positive iff score >= threshold (PHQ-9: 15, GAD-7: 10, ASRS: 13).
std::vector<int> binarize_labels(std::span<const int> scores, Instrument instrument);

/// Training-set medians used to fill missing values.
class MedianImputer {
 public:
  void fit(const FeatureMatrix& X);
  [[nodiscard]] FeatureMatrix transform(const FeatureMatrix& X) const;
  [[nodiscard]] const std::vector<double>& medians() const noexcept { return medians_; }
  [[nodiscard]] const std::vector<bool>& imputed_columns() const noexcept { return imputed_; }

 private:
  std::vector<double> medians_;
  std::vector<bool> imputed_;
};

double median(std::vector<double> values);

struct CVConfig {
  int k = 4;
  int repeats = 1;
  std::uint64_t seed = 0;
  GBTConfig gbt;
};

struct FoldResult {
  int repeat = 0;
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  ClassificationMetrics metrics;
  std::vector<std::string> test_subjects;
  bool speaker_disjoint = true;
};

struct CVResult {
  std::vector<FoldResult> folds;
  ClassificationMetrics mean;
  std::vector<double> repeat_auc;  // mean AUC per repeat
  double auc_variance = 0.0;       // across repeats
  std::vector<std::map<std::string, int>> assignments;  // per repeat: subject -> fold
  bool speaker_disjoint = true;
};

class CVError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stratified, subject-disjoint k-fold cross-validation of the boosted model.
/// k equal to the subject count is leave-one-subject-out and needs two subjects per class.
CVResult cross_validate(const FeatureMatrix& X, const CVConfig& config = {});

/// Ordered (group name, member columns).
using GroupColumns = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct AblationTable {
  std::vector<std::string> groups;
  std::vector<std::vector<double>> auc;  // [dataset][group]; NaN when the group has no columns there
  std::vector<double> mean_auc;          // across datasets
};

AblationTable ablation(std::span<const FeatureMatrix> datasets, const GroupColumns& groups, const CVConfig& config = {});

}  // namespace voicemark::model
