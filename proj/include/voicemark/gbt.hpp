#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "voicemark/feature_matrix.hpp"

namespace voicemark::model {

/// Internal nodes route x[feature] < threshold to `left`; NaN goes right.
struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double gain = 0.0;   // split loss reduction (internal nodes)
  double cover = 0.0;  // hessian sum of training rows reaching the node
  double value = 0.0;  // leaf weight before the learning rate

  [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  [[nodiscard]] const TreeNode& leaf_for(std::span<const double> x) const;
  [[nodiscard]] double predict(std::span<const double> x) const { return leaf_for(x).value; }
  [[nodiscard]] int depth() const;
};

struct GBTConfig {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  double base_score = 0.0;  // initial log-odds
  std::uint64_t seed = 0;
  bool require_both_classes = true;
};

/// Logistic gradient-boosted ensemble: margin = base_score + eta * sum(leaf values).
struct GBTModel {
  std::vector<Tree> trees;
  double base_score = 0.0;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double gamma = 0.0;
  double min_child_weight = 1.0;
  int max_depth = 4;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  std::string manifest_hash;

  [[nodiscard]] double margin(std::span<const double> x) const;
  [[nodiscard]] double predict_proba(std::span<const double> x) const;
  [[nodiscard]] std::vector<double> predict_proba(const FeatureMatrix& X) const;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One accepted split, in training order.
struct SplitRecord {
  int tree = 0;
  int node = 0;
  int feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
  double grad_left = 0.0, hess_left = 0.0, grad_right = 0.0, hess_right = 0.0;
};

double sigmoid(double margin) noexcept;

/// Newton boosting with logistic loss and exact greedy splits.
/// X must be free of missing values; labels come from X.labels.
GBTModel train_gbt(const FeatureMatrix& X, const GBTConfig& config = {}, std::vector<SplitRecord>* log = nullptr);

nlohmann::json to_json(const GBTModel& model);
GBTModel model_from_json(const nlohmann::json& j);
std::string serialize_model(const GBTModel& model);
GBTModel deserialize_model(const std::string& text);

struct FeatureScore {
  std::size_t index = 0;
  std::string name;
  double value = 0.0;
};

/// Total split gain per feature, every feature listed, sorted descending.
std::vector<FeatureScore> gain_importance(const GBTModel& model);

}  // namespace voicemark::model
