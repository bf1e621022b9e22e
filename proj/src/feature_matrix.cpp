#include "voicemark/feature_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace voicemark {

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

std::ptrdiff_t FeatureMatrix::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  return it == columns.end() ? -1 : it - columns.begin();
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> picked) const {
  FeatureMatrix out;
  out.columns = columns;
  for (auto r : picked) {
    out.row_ids.push_back(row_ids[r]);
    out.subject_ids.push_back(subject_ids.empty() ? row_ids[r] : subject_ids[r]);
    if (labeled()) out.labels.push_back(labels[r]);
    const auto src = row(r);
    out.values.insert(out.values.end(), src.begin(), src.end());
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> picked) const {
  FeatureMatrix out;
  for (auto c : picked) out.columns.push_back(columns.at(c));
  out.row_ids = row_ids;
  out.subject_ids = subject_ids;
  out.labels = labels;
  out.values.reserve(rows() * picked.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (auto c : picked) out.values.push_back(at(r, c));
  }
  return out;
}

void FeatureMatrix::append_row(std::string row_id, std::string subject_id, std::span<const double> row_values,
                               int label) {
  if (row_values.size() != cols()) throw std::invalid_argument("append_row: width mismatch");
  row_ids.push_back(std::move(row_id));
  subject_ids.push_back(std::move(subject_id));
  if (label >= 0) labels.push_back(label);
  values.insert(values.end(), row_values.begin(), row_values.end());
}

}  // namespace voicemark
