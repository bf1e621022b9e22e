#include "voicemark/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace voicemark::model {
namespace {

constexpr double kProbEps = 1e-15;
constexpr double kMinHessian = 1e-16;

struct NodeStats {
  double grad = 0.0;
  double hess = 0.0;
};

struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double grad_left = 0.0, hess_left = 0.0;
};

// Running state while scanning one feature for one frontier node.
struct ScanState {
  double grad = 0.0;
  double hess = 0.0;
  double last = 0.0;
  bool seen = false;
};

double leaf_weight(const NodeStats& s, double lambda) { return -s.grad / (s.hess + lambda); }

double score(double g, double h, double lambda) { return g * g / (h + lambda); }

double split_threshold(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid > lo ? mid : hi;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& X, const std::vector<std::vector<std::uint32_t>>& order, const GBTConfig& cfg)
      : X_(X), order_(order), cfg_(cfg) {}

  Tree build(std::span<const double> grad, std::span<const double> hess, int tree_index,
             std::vector<SplitRecord>* log) {
    const std::size_t n = X_.rows();
    Tree tree;
    position_.assign(n, 0);
    NodeStats root;
    for (std::size_t i = 0; i < n; ++i) {
      root.grad += grad[i];
      root.hess += hess[i];
    }
    tree.nodes.push_back(TreeNode{});
    tree.nodes[0].cover = root.hess;
    std::vector<NodeStats> stats{root};
    std::vector<int> frontier{0};

    for (int depth = 0; depth < cfg_.max_depth && !frontier.empty(); ++depth) {
      const auto best = find_splits(tree, frontier, stats, grad, hess);
      std::vector<int> next;
      for (std::size_t k = 0; k < frontier.size(); ++k) {
        const int id = frontier[k];
        const SplitCandidate& s = best[k];
        if (s.feature < 0 || !(s.gain > 0.0)) continue;
        const NodeStats left{s.grad_left, s.hess_left};
        const NodeStats right{stats[id].grad - s.grad_left, stats[id].hess - s.hess_left};
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        stats.push_back(left);
        stats.push_back(right);
        TreeNode& node = tree.nodes[id];
        node.feature = s.feature;
        node.threshold = s.threshold;
        node.left = l;
        node.right = l + 1;
        node.gain = s.gain;
        tree.nodes[l].cover = left.hess;
        tree.nodes[l + 1].cover = right.hess;
        next.push_back(l);
        next.push_back(l + 1);
        if (log) {
          log->push_back(SplitRecord{tree_index, id, s.feature, s.threshold, s.gain, left.grad, left.hess,
                                     right.grad, right.hess});
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[position_[i]];
        if (node.is_leaf()) continue;
        position_[i] = X_.at(i, node.feature) < node.threshold ? node.left : node.right;
      }
      frontier = std::move(next);
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      if (tree.nodes[id].is_leaf()) tree.nodes[id].value = leaf_weight(stats[id], cfg_.lambda);
    }
    return tree;
  }

  [[nodiscard]] const std::vector<int>& positions() const noexcept { return position_; }

 private:
  std::vector<SplitCandidate> find_splits(const Tree& tree, const std::vector<int>& frontier,
                                          const std::vector<NodeStats>& stats, std::span<const double> grad,
                                          std::span<const double> hess) {
    std::vector<int> slot(tree.nodes.size(), -1);
    for (std::size_t k = 0; k < frontier.size(); ++k) slot[frontier[k]] = static_cast<int>(k);
    std::vector<SplitCandidate> best(frontier.size());
    std::vector<ScanState> scan(frontier.size());
    for (std::size_t f = 0; f < X_.cols(); ++f) {
      std::fill(scan.begin(), scan.end(), ScanState{});
      for (std::uint32_t i : order_[f]) {
        const int k = slot[position_[i]];
        if (k < 0) continue;
        const double v = X_.at(i, f);
        ScanState& st = scan[k];
        if (st.seen && v > st.last) {
          const NodeStats& parent = stats[frontier[k]];
          const double gr = parent.grad - st.grad;
          const double hr = parent.hess - st.hess;
          if (st.hess >= cfg_.min_child_weight && hr >= cfg_.min_child_weight) {
            const double gain = 0.5 * (score(st.grad, st.hess, cfg_.lambda) + score(gr, hr, cfg_.lambda) -
                                       score(parent.grad, parent.hess, cfg_.lambda)) -
                                cfg_.gamma;
            if (gain > best[k].gain) {
              best[k] = SplitCandidate{static_cast<int>(f), split_threshold(st.last, v), gain, st.grad, st.hess};
            }
          }
        }
        st.grad += grad[i];
        st.hess += hess[i];
        st.last = v;
        st.seen = true;
      }
    }
    return best;
  }

  const FeatureMatrix& X_;
  const std::vector<std::vector<std::uint32_t>>& order_;
  const GBTConfig& cfg_;
  std::vector<int> position_;
};

void validate_config(const GBTConfig& cfg) {
  if (cfg.n_trees < 0) throw std::invalid_argument("gbt: n_trees must be non-negative");
  if (cfg.max_depth < 0) throw std::invalid_argument("gbt: max_depth must be non-negative");
  if (!(cfg.learning_rate > 0.0)) throw std::invalid_argument("gbt: learning_rate must be positive");
  if (cfg.lambda < 0.0 || cfg.gamma < 0.0 || cfg.min_child_weight < 0.0) {
    throw std::invalid_argument("gbt: lambda, gamma and min_child_weight must be non-negative");
  }
}

}  // namespace

double sigmoid(double margin) noexcept { return 1.0 / (1.0 + std::exp(-margin)); }

const TreeNode& Tree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes.at(0);
  while (!node->is_leaf()) {
    node = &nodes[x[node->feature] < node->threshold ? node->left : node->right];
  }
  return *node;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].is_leaf()) continue;
    d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

double GBTModel::margin(std::span<const double> x) const {
  if (x.size() != n_features) {
    throw std::invalid_argument("predict: expected " + std::to_string(n_features) + " features, got " +
                                std::to_string(x.size()));
  }
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.predict(x);
  return base_score + learning_rate * sum;
}

double GBTModel::predict_proba(std::span<const double> x) const {
  return std::clamp(sigmoid(margin(x)), kProbEps, 1.0 - kProbEps);
}

std::vector<double> GBTModel::predict_proba(const FeatureMatrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_proba(X.row(r));
  return out;
}

GBTModel train_gbt(const FeatureMatrix& X, const GBTConfig& config, std::vector<SplitRecord>* log) {
  validate_config(config);
  const std::size_t n = X.rows();
  if (n == 0) throw ModelError("train: empty training set");
  if (!X.labeled()) throw ModelError("train: training set has no labels");
  std::size_t positives = 0;
  for (int y : X.labels) {
    if (y != 0 && y != 1) throw ModelError("train: labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (config.require_both_classes && (positives == 0 || positives == n)) {
    throw ModelError("train: training labels contain a single class");
  }
  for (double v : X.values) {
    if (!std::isfinite(v)) throw ModelError("train: feature matrix contains missing or non-finite values");
  }

  GBTModel model;
  model.base_score = config.base_score;
  model.learning_rate = config.learning_rate;
  model.lambda = config.lambda;
  model.gamma = config.gamma;
  model.min_child_weight = config.min_child_weight;
  model.max_depth = config.max_depth;
  model.seed = config.seed;
  model.n_features = X.cols();
  model.feature_names = X.columns;

  std::vector<std::vector<std::uint32_t>> order(X.cols());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    auto& o = order[f];
    o.resize(n);
    std::iota(o.begin(), o.end(), 0u);
    std::stable_sort(o.begin(), o.end(), [&](std::uint32_t a, std::uint32_t b) { return X.at(a, f) < X.at(b, f); });
  }

  std::vector<double> margin(n, config.base_score);
  std::vector<double> grad(n), hess(n);
  TreeBuilder builder(X, order, config);
  for (int t = 0; t < config.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - X.labels[i];
      hess[i] = std::max(p * (1.0 - p), kMinHessian);
    }
    Tree tree = builder.build(grad, hess, t, log);
    const auto& pos = builder.positions();
    for (std::size_t i = 0; i < n; ++i) margin[i] += config.learning_rate * tree.nodes[pos[i]].value;
    model.trees.push_back(std::move(tree));
  }
  return model;
}

nlohmann::json to_json(const GBTModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& t : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : t.nodes) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.value}, {"cover", n.cover}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"gain", n.gain},
                         {"cover", n.cover}});
      }
    }
    trees.push_back({{"nodes", std::move(nodes)}});
  }
  return {{"format", "voicemark-gbt"},
          {"version", 1},
          {"objective", "binary:logistic"},
          {"base_score", model.base_score},
          {"learning_rate", model.learning_rate},
          {"lambda", model.lambda},
          {"gamma", model.gamma},
          {"min_child_weight", model.min_child_weight},
          {"max_depth", model.max_depth},
          {"seed", model.seed},
          {"n_features", model.n_features},
          {"feature_names", model.feature_names},
          {"manifest_hash", model.manifest_hash},
          {"trees", std::move(trees)}};
}

GBTModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "voicemark-gbt") throw ModelError("model: unknown format");
    GBTModel m;
    m.base_score = j.at("base_score").get<double>();
    m.learning_rate = j.at("learning_rate").get<double>();
    m.lambda = j.at("lambda").get<double>();
    m.gamma = j.at("gamma").get<double>();
    m.min_child_weight = j.at("min_child_weight").get<double>();
    m.max_depth = j.at("max_depth").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.manifest_hash = j.value("manifest_hash", std::string{});
    for (const auto& jt : j.at("trees")) {
      Tree t;
      for (const auto& jn : jt.at("nodes")) {
        TreeNode n;
        n.cover = jn.at("cover").get<double>();
        if (jn.contains("leaf")) {
          n.value = jn.at("leaf").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          n.threshold = jn.at("threshold").get<double>();
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
          n.gain = jn.at("gain").get<double>();
        }
        t.nodes.push_back(n);
      }
      const int size = static_cast<int>(t.nodes.size());
      if (size == 0) throw ModelError("model: empty tree");
      for (const TreeNode& n : t.nodes) {
        if (n.is_leaf()) continue;
        if (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size ||
            n.feature >= static_cast<int>(m.n_features)) {
          throw ModelError("model: node index out of range");
        }
      }
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
}

std::string serialize_model(const GBTModel& model) { return to_json(model).dump(1) + "\n"; }

GBTModel deserialize_model(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model: ") + e.what());
  }
  return model_from_json(j);
}

std::vector<FeatureScore> gain_importance(const GBTModel& model) {
  std::vector<FeatureScore> out(model.n_features);
  for (std::size_t f = 0; f < model.n_features; ++f) {
    out[f].index = f;
    out[f].name = f < model.feature_names.size() ? model.feature_names[f] : "f" + std::to_string(f);
  }
  for (const Tree& t : model.trees) {
    for (const TreeNode& n : t.nodes) {
      if (!n.is_leaf()) out[n.feature].value += n.gain;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const FeatureScore& a, const FeatureScore& b) { return a.value > b.value; });
  return out;
}

}  // namespace voicemark::model
