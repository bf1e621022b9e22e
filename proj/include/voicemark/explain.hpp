#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voicemark/feature_matrix.hpp"
#include "voicemark/gbt.hpp"

namespace voicemark::model {

struct Explanation {
  std::vector<double> phi;
  double base_value = 0.0;  // expected margin
  double target = 0.0;      // explained margin
};

/// Expected margin under the training cover distribution.
double expected_margin(const GBTModel& model);

/// Exact path-dependent TreeSHAP on the margin scale.
Explanation tree_shap(const GBTModel& model, std::span<const double> x);

struct LimeConfig {
  int samples = 1000;
  double resample_probability = 0.5;
  double kernel_width_factor = 0.75;  // sigma = factor * sqrt(active features)
  double ridge_lambda = 1.0;
  std::uint64_t seed = 0;
};

struct LimeExplanation {
  std::vector<double> weights;  // per feature, standardized units; 0 for excluded
  double intercept = 0.0;
  double kernel_width = 0.0;
  std::vector<bool> excluded;   // zero-variance training features

  // Sampled design, kept so the surrogate can be re-fitted independently.
  std::vector<std::vector<double>> design;  // standardized active features per sample
  std::vector<double> targets;              // predicted probabilities
  std::vector<double> kernel;               // sample weights
};

LimeExplanation lime_explain(const GBTModel& model, std::span<const double> x, const FeatureMatrix& X_train,
                             const LimeConfig& config = {});

/// Mean |weight| per feature across instances, descending, zero entries dropped.
std::vector<FeatureScore> aggregate_lime(std::span<const std::vector<double>> per_instance,
                                         std::span<const std::string> names);

struct PdpCurve {
  std::string feature;
  std::vector<double> grid;
  std::vector<double> values;
};

PdpCurve pdp(const GBTModel& model, const FeatureMatrix& X, std::size_t feature, int grid_size = 20);

}  // namespace voicemark::model
