#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace voicemark {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Rows x named columns, row-major. NaN marks a missing value.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<std::string> row_ids;
  std::vector<std::string> subject_ids;
  std::vector<int> labels;  // 0/1 per row; empty when unlabeled
  std::vector<double> values;

  [[nodiscard]] std::size_t rows() const noexcept { return row_ids.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return columns.size(); }
  [[nodiscard]] bool labeled() const noexcept { return !labels.empty() && labels.size() == rows(); }

  [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols(), cols());
  }
  [[nodiscard]] std::vector<double> column(std::size_t c) const;
  [[nodiscard]] std::ptrdiff_t column_index(const std::string& name) const;

  [[nodiscard]] FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  [[nodiscard]] FeatureMatrix select_columns(std::span<const std::size_t> cols) const;

  void append_row(std::string row_id, std::string subject_id, std::span<const double> row_values, int label = -1);
};

}  // namespace voicemark
