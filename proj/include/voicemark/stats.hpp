#pragma once

#include <span>
#include <string>
#include <vector>

#include "voicemark/feature_matrix.hpp"

namespace voicemark::stats {

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool degenerate = false;
};

/// Welch unequal-variance t-test with Satterthwaite degrees of freedom.
TTestResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Benjamini-Hochberg step-up adjustment, returned in input order.
std::vector<double> bh_fdr(std::span<const double> p);

struct GroupComparison {
  std::string feature;
  double mean_a = 0.0;  // label 0
  double mean_b = 0.0;  // label 1
  double t_stat = 0.0;
  double df = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  bool significant = false;
  bool degenerate = false;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

struct CompareOptions {
  double alpha = 0.05;
  bool standardize = false;  // z-score each column before reporting means
};

/// One Welch test per column, BH-adjusted jointly, sorted by p_raw then name.
std::vector<GroupComparison> compare_groups(const FeatureMatrix& X, std::span<const int> labels,
                                            const CompareOptions& options = {});

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<double> r;            // n x n, row-major
  std::vector<bool> degenerate;     // constant column
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return r[i * names.size() + j]; }
};

/// Pearson correlations; constant columns correlate 0 with everything but themselves.
CorrelationMatrix correlation_matrix(const FeatureMatrix& X);

}  // namespace voicemark::stats
