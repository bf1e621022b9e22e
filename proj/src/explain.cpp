#include "voicemark/explain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>


namespace voicemark::model {
namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0.0;
  double one_fraction = 0.0;
  double weight = 0.0;
};

using Path = std::vector<PathElement>;

void extend_path(Path& path, int depth, double zero_fraction, double one_fraction, int feature) {
  path[depth] = PathElement{feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  for (int i = depth - 1; i >= 0; --i) {
    path[i + 1].weight += one_fraction * path[i].weight * (i + 1) / static_cast<double>(depth + 1);
    path[i].weight = zero_fraction * path[i].weight * (depth - i) / static_cast<double>(depth + 1);
  }
}

void unwind_path(Path& path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = path[i].weight;
      path[i].weight = next * (depth + 1) / ((i + 1) * one);
      next = tmp - path[i].weight * zero * (depth - i) / static_cast<double>(depth + 1);
    } else {
      path[i].weight = path[i].weight * (depth + 1) / (zero * (depth - i));
    }
  }
  for (int i = index; i < depth; ++i) {
    path[i].feature = path[i + 1].feature;
    path[i].zero_fraction = path[i + 1].zero_fraction;
    path[i].one_fraction = path[i + 1].one_fraction;
  }
}

double unwound_sum(const Path& path, int depth, int index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  double next = path[depth].weight;
  double total = 0.0;
  for (int i = depth - 1; i >= 0; --i) {
    if (one != 0.0) {
      const double tmp = next * (depth + 1) / ((i + 1) * one);
      total += tmp;
      next = path[i].weight - tmp * zero * ((depth - i) / static_cast<double>(depth + 1));
    } else {
      total += (path[i].weight / zero) / ((depth - i) / static_cast<double>(depth + 1));
    }
  }
  return total;
}

void shap_recurse(const Tree& tree, std::span<const double> x, std::vector<double>& phi, int node_id, Path path,
                  int depth, double zero_fraction, double one_fraction, int feature, double scale) {
  extend_path(path, depth, zero_fraction, one_fraction, feature);
  const TreeNode& node = tree.nodes[node_id];
  if (node.is_leaf()) {
    for (int i = 1; i <= depth; ++i) {
      const double w = unwound_sum(path, depth, i);
      phi[path[i].feature] += w * (path[i].one_fraction - path[i].zero_fraction) * node.value * scale;
    }
    return;
  }
  const int hot = x[node.feature] < node.threshold ? node.left : node.right;
  const int cold = hot == node.left ? node.right : node.left;
  const double cover = node.cover;
  const double hot_zero = cover > 0.0 ? tree.nodes[hot].cover / cover : 0.0;
  const double cold_zero = cover > 0.0 ? tree.nodes[cold].cover / cover : 0.0;
  double incoming_zero = 1.0;
  double incoming_one = 1.0;
  int k = 1;
  while (k <= depth && path[k].feature != node.feature) ++k;
  if (k <= depth) {
    incoming_zero = path[k].zero_fraction;
    incoming_one = path[k].one_fraction;
    unwind_path(path, depth, k);
    --depth;
  }
  shap_recurse(tree, x, phi, hot, path, depth + 1, hot_zero * incoming_zero, incoming_one, node.feature, scale);
  shap_recurse(tree, x, phi, cold, path, depth + 1, cold_zero * incoming_zero, 0.0, node.feature, scale);
}

double node_expectation(const Tree& tree, int id) {
  const TreeNode& n = tree.nodes[id];
  if (n.is_leaf()) return n.value;
  if (!(n.cover > 0.0)) return 0.0;
  return (tree.nodes[n.left].cover * node_expectation(tree, n.left) +
          tree.nodes[n.right].cover * node_expectation(tree, n.right)) /
         n.cover;
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t bounded(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

double expected_margin(const GBTModel& model) {
  double sum = 0.0;
  for (const Tree& t : model.trees) sum += node_expectation(t, 0);
  return model.base_score + model.learning_rate * sum;
}

Explanation tree_shap(const GBTModel& model, std::span<const double> x) {
  if (x.size() != model.n_features) throw std::invalid_argument("shap: feature count mismatch");
  Explanation out;
  out.phi.assign(model.n_features, 0.0);
  for (const Tree& t : model.trees) {
    const int max_path = t.depth() + 2;
    shap_recurse(t, x, out.phi, 0, Path(static_cast<std::size_t>(max_path)), 0, 1.0, 1.0, -1, model.learning_rate);
  }
  out.base_value = expected_margin(model);
  out.target = model.margin(x);
  return out;
}

LimeExplanation lime_explain(const GBTModel& model, std::span<const double> x, const FeatureMatrix& X_train,
                             const LimeConfig& config) {
  const std::size_t p = model.n_features;
  if (x.size() != p || X_train.cols() != p) throw std::invalid_argument("lime: feature count mismatch");
  if (X_train.rows() == 0) throw std::invalid_argument("lime: empty reference set");
  if (config.samples < 2) throw std::invalid_argument("lime: need at least two samples");

  LimeExplanation out;
  out.weights.assign(p, 0.0);
  out.excluded.assign(p, false);
  std::vector<double> mean(p, 0.0), sd(p, 0.0);
  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = X_train.column(j);
    double m = 0.0;
    for (double v : col) m += v;
    m /= static_cast<double>(col.size());
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    mean[j] = m;
    sd[j] = std::sqrt(ss / static_cast<double>(col.size()));
    if (sd[j] > 0.0) {
      active.push_back(j);
    } else {
      out.excluded[j] = true;
    }
  }
  const std::size_t d = active.size();
  out.kernel_width = config.kernel_width_factor * std::sqrt(static_cast<double>(std::max<std::size_t>(d, 1)));
  const double sigma2 = out.kernel_width * out.kernel_width;

  std::mt19937_64 rng(config.seed);
  const auto n = static_cast<std::size_t>(config.samples);
  out.design.assign(n, std::vector<double>(d, 0.0));
  out.targets.resize(n);
  out.kernel.resize(n);
  std::vector<double> z(x.begin(), x.end());
  for (std::size_t s = 0; s < n; ++s) {
    std::copy(x.begin(), x.end(), z.begin());
    // The first sample is the instance itself.
    if (s > 0) {
      for (std::size_t j : active) {
        if (unit_uniform(rng) < config.resample_probability) z[j] = X_train.at(bounded(rng, X_train.rows()), j);
      }
    }
    double dist2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t j = active[a];
      out.design[s][a] = (z[j] - mean[j]) / sd[j];
      const double diff = (z[j] - x[j]) / sd[j];
      dist2 += diff * diff;
    }
    out.kernel[s] = std::exp(-dist2 / sigma2);
    out.targets[s] = model.predict_proba(z);
  }

  double wsum = 0.0, ybar = 0.0;
  Eigen::VectorXd zbar = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t s = 0; s < n; ++s) {
    wsum += out.kernel[s];
    ybar += out.kernel[s] * out.targets[s];
    for (std::size_t a = 0; a < d; ++a) zbar[static_cast<Eigen::Index>(a)] += out.kernel[s] * out.design[s][a];
  }
  ybar /= wsum;
  zbar /= wsum;
  if (d > 0) {
    Eigen::MatrixXd A = config.ridge_lambda * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd row(static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t a = 0; a < d; ++a) row[static_cast<Eigen::Index>(a)] = out.design[s][a];
      row -= zbar;
      A.noalias() += out.kernel[s] * row * row.transpose();
      b += out.kernel[s] * (out.targets[s] - ybar) * row;
    }
    const Eigen::VectorXd beta = A.ldlt().solve(b);
    for (std::size_t a = 0; a < d; ++a) out.weights[active[a]] = beta[static_cast<Eigen::Index>(a)];
    out.intercept = ybar - beta.dot(zbar);
  } else {
    out.intercept = ybar;
  }
  return out;
}

std::vector<FeatureScore> aggregate_lime(std::span<const std::vector<double>> per_instance,
                                         std::span<const std::string> names) {
  std::vector<FeatureScore> out(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    out[j].index = j;
    out[j].name = names[j];
  }
  if (per_instance.empty()) return {};
  for (const auto& w : per_instance) {
    if (w.size() != names.size()) throw std::invalid_argument("aggregate_lime: width mismatch");
    for (std::size_t j = 0; j < w.size(); ++j) out[j].value += std::fabs(w[j]);
  }
  for (auto& s : out) s.value /= static_cast<double>(per_instance.size());
  std::erase_if(out, [](const FeatureScore& s) { return !(s.value > 0.0); });
  std::stable_sort(out.begin(), out.end(), [](const FeatureScore& a, const FeatureScore& b) { return a.value > b.value; });
  return out;
}

PdpCurve pdp(const GBTModel& model, const FeatureMatrix& X, std::size_t feature, int grid_size) {
  if (feature >= X.cols() || X.cols() != model.n_features) throw std::invalid_argument("pdp: feature out of range");
  if (grid_size < 2) throw std::invalid_argument("pdp: grid needs at least two points");
  std::vector<double> observed;
  for (double v : X.column(feature)) {
    if (!is_missing(v)) observed.push_back(v);
  }
  if (observed.empty()) throw std::invalid_argument("pdp: feature has no observed values");
  std::sort(observed.begin(), observed.end());
  PdpCurve out;
  out.feature = X.columns[feature];
  const double last = static_cast<double>(observed.size() - 1);
  for (int g = 0; g < grid_size; ++g) {
    const double pos = last * g / (grid_size - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, observed.size() - 1);
    const double v = observed[lo] + (pos - static_cast<double>(lo)) * (observed[hi] - observed[lo]);
    if (out.grid.empty() || v > out.grid.back()) out.grid.push_back(v);
  }
  std::vector<double> row(X.cols());
  for (double g : out.grid) {
    double total = 0.0;
    for (std::size_t r = 0; r < X.rows(); ++r) {
      const auto src = X.row(r);
      std::copy(src.begin(), src.end(), row.begin());
      row[feature] = g;
      total += model.predict_proba(row);
    }
    out.values.push_back(total / static_cast<double>(X.rows()));
  }
  return out;
}

}  // namespace voicemark::model
