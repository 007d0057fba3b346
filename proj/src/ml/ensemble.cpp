#include "netprof/ml/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "netprof/ml/anova.hpp"
#include "netprof/parallel.hpp"
#include "netprof/rng.hpp"

#include "json.hpp"

namespace netprof::ml {

const char* algo_name(Algo a) { return a == Algo::RF ? "RF" : "ET"; }

Algo algo_from_name(const std::string& name) {
  if (name == "RF") return Algo::RF;
  if (name == "ET") return Algo::ET;
  throw std::invalid_argument("unknown algorithm: " + name);
}

namespace {

double gini(const std::vector<int>& counts, int total) {
  if (total == 0) return 0;
  double g = 1.0;
  for (int c : counts) {
    double p = static_cast<double>(c) / total;
    g -= p * p;
  }
  return g;
}

struct SplitChoice {
  bool valid = false;
  int feature = -1;  // position in the selected set
  double threshold = 0;
  double decrease = 0;  // impurity decrease at the node
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& cols, const std::vector<int>& y,
              int n_classes, const ModelConfig& cfg, int features_per_split, uint64_t tree_seed)
      : cols_(cols), y_(y), n_classes_(n_classes), cfg_(cfg), m_(features_per_split),
        rng_(tree_seed) {}

  Tree build() {
    int n = static_cast<int>(y_.size());
    std::vector<int> rows;
    rows.reserve(n);
    if (cfg_.algorithm == Algo::RF) {
      for (int i = 0; i < n; ++i)
        rows.push_back(static_cast<int>(rng_.uniform(static_cast<uint64_t>(n))));
    } else {
      for (int i = 0; i < n; ++i) rows.push_back(i);
    }
    root_n_ = static_cast<int>(rows.size());
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int make_leaf(const std::vector<int>& counts, int total) {
    TreeNode leaf;
    leaf.probs.resize(n_classes_);
    for (int c = 0; c < n_classes_; ++c)
      leaf.probs[c] = total ? static_cast<double>(counts[c]) / total : 0.0;
    tree_.nodes.push_back(std::move(leaf));
    return static_cast<int>(tree_.nodes.size() - 1);
  }

  SplitChoice best_split_rf(const std::vector<int>& rows, const std::vector<int>& candidates,
                            const std::vector<int>& counts, double node_gini) {
    SplitChoice best;
    const int n = static_cast<int>(rows.size());
    for (int f : candidates) {
      const std::vector<double>& col = cols_[f];
      sorted_.clear();
      for (int r : rows) sorted_.emplace_back(col[r], y_[r]);
      std::sort(sorted_.begin(), sorted_.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (sorted_.front().first == sorted_.back().first) continue;

      std::fill(left_counts_.begin(), left_counts_.end(), 0);
      int n_left = 0;
      for (int i = 1; i < n; ++i) {
        left_counts_[sorted_[i - 1].second]++;
        n_left++;
        if (sorted_[i].first == sorted_[i - 1].first) continue;
        int n_right = n - n_left;
        double gl = 1.0, gr = 1.0;
        for (int c = 0; c < n_classes_; ++c) {
          double pl = static_cast<double>(left_counts_[c]) / n_left;
          double pr = static_cast<double>(counts[c] - left_counts_[c]) / n_right;
          gl -= pl * pl;
          gr -= pr * pr;
        }
        double dec = node_gini - (static_cast<double>(n_left) / n) * gl -
                     (static_cast<double>(n_right) / n) * gr;
        if (!best.valid || dec > best.decrease) {
          best.valid = true;
          best.feature = f;
          best.threshold = (sorted_[i - 1].first + sorted_[i].first) / 2.0;
          best.decrease = dec;
        }
      }
    }
    return best;
  }

  SplitChoice best_split_et(const std::vector<int>& rows, const std::vector<int>& candidates,
                            const std::vector<int>& counts, double node_gini) {
    SplitChoice best;
    const int n = static_cast<int>(rows.size());
    for (int f : candidates) {
      const std::vector<double>& col = cols_[f];
      double lo = col[rows[0]], hi = col[rows[0]];
      for (int r : rows) {
        lo = std::min(lo, col[r]);
        hi = std::max(hi, col[r]);
      }
      if (lo == hi) continue;
      double t = rng_.uniform_real(lo, hi);
      std::fill(left_counts_.begin(), left_counts_.end(), 0);
      int n_left = 0;
      for (int r : rows) {
        if (col[r] <= t) {
          left_counts_[y_[r]]++;
          n_left++;
        }
      }
      int n_right = n - n_left;
      if (n_left == 0 || n_right == 0) continue;  // fp edge at the boundary
      double gl = 1.0, gr = 1.0;
      for (int c = 0; c < n_classes_; ++c) {
        double pl = static_cast<double>(left_counts_[c]) / n_left;
        double pr = static_cast<double>(counts[c] - left_counts_[c]) / n_right;
        gl -= pl * pl;
        gr -= pr * pr;
      }
      double dec = node_gini - (static_cast<double>(n_left) / n) * gl -
                   (static_cast<double>(n_right) / n) * gr;
      if (!best.valid || dec > best.decrease) {
        best.valid = true;
        best.feature = f;
        best.threshold = t;
        best.decrease = dec;
      }
    }
    return best;
  }

  int grow(const std::vector<int>& rows, int depth) {
    const int n = static_cast<int>(rows.size());
    std::vector<int> counts(n_classes_, 0);
    for (int r : rows) counts[y_[r]]++;
    int nonzero = 0;
    for (int c : counts) nonzero += c > 0;

    bool stop = nonzero <= 1 || n < cfg_.min_samples_split ||
                (cfg_.max_depth >= 0 && depth >= cfg_.max_depth);
    if (stop) return make_leaf(counts, n);

    left_counts_.assign(n_classes_, 0);
    std::vector<int> candidates =
        rng_.sample_without_replacement(static_cast<int>(cols_.size()), m_, scratch_);
    double node_gini = gini(counts, n);
    SplitChoice split = cfg_.algorithm == Algo::RF
                            ? best_split_rf(rows, candidates, counts, node_gini)
                            : best_split_et(rows, candidates, counts, node_gini);
    if (!split.valid) return make_leaf(counts, n);

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(n);
    right_rows.reserve(n);
    const std::vector<double>& col = cols_[split.feature];
    for (int r : rows) {
      if (col[r] <= split.threshold) left_rows.push_back(r);
      else right_rows.push_back(r);
    }
    if (left_rows.empty() || right_rows.empty()) return make_leaf(counts, n);

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.importance_contrib = (static_cast<double>(n) / root_n_) * split.decrease;
    tree_.nodes.push_back(std::move(node));
    int idx = static_cast<int>(tree_.nodes.size() - 1);
    int li = grow(left_rows, depth + 1);
    int ri = grow(right_rows, depth + 1);
    tree_.nodes[idx].left = li;
    tree_.nodes[idx].right = ri;
    return idx;
  }

  const std::vector<std::vector<double>>& cols_;
  const std::vector<int>& y_;
  int n_classes_;
  const ModelConfig& cfg_;
  int m_;
  Rng rng_;
  Tree tree_;
  int root_n_ = 0;
  std::vector<std::pair<double, int>> sorted_;
  std::vector<int> left_counts_;
  std::vector<int> scratch_;
};

}  // namespace

TrainedEnsemble train(const Dataset& dataset, const ModelConfig& config, int threads) {
  const int n = dataset.n();
  const int d = dataset.d();
  if (n < 2) throw EmptyInputError("train: need at least 2 rows");
  {
    std::vector<int> seen;
    for (int v : dataset.y)
      if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
    if (seen.size() < 2) throw DegenerateLabelError("train: single-class labels");
  }

  TrainedEnsemble model;
  model.config = config;
  model.class_list = dataset.class_list;
  model.input_dim = d;
  model.selected_feature_indices =
      select_k_best(dataset.x, n, d, dataset.y, std::max(1, config.k_features));

  const int k = static_cast<int>(model.selected_feature_indices.size());
  std::vector<std::vector<double>> cols(k, std::vector<double>(n));
  for (int c = 0; c < k; ++c) {
    int src = model.selected_feature_indices[c];
    for (int r = 0; r < n; ++r) cols[c][r] = dataset.at(r, src);
  }

  int m = config.features_per_split > 0
              ? std::min(config.features_per_split, k)
              : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(k)))));

  const int n_classes = static_cast<int>(dataset.class_list.size());
  model.trees.resize(config.n_trees);
  parallel_for(config.n_trees, threads, [&](int i) {
    TreeBuilder builder(cols, dataset.y, n_classes, config, m,
                        substream(config.seed, static_cast<uint64_t>(i)));
    model.trees[i] = builder.build();
  });
  return model;
}

namespace {

const TreeNode& descend(const Tree& tree, const TrainedEnsemble& model,
                        const std::vector<double>& row) {
  const TreeNode* node = &tree.nodes[0];
  while (node->feature >= 0) {
    int full_idx = model.selected_feature_indices[node->feature];
    node = row[full_idx] <= node->threshold ? &tree.nodes[node->left] : &tree.nodes[node->right];
  }
  return *node;
}

}  // namespace

std::vector<double> predict_proba(const TrainedEnsemble& model, const std::vector<double>& row) {
  if (static_cast<int>(row.size()) != model.input_dim)
    throw DimensionMismatchError("predict row has " + std::to_string(row.size()) +
                                 " features, expected " + std::to_string(model.input_dim));
  std::vector<double> probs(model.class_list.size(), 0.0);
  for (const auto& tree : model.trees) {
    const TreeNode& leaf = descend(tree, model, row);
    for (size_t c = 0; c < probs.size(); ++c) probs[c] += leaf.probs[c];
  }
  double inv = model.trees.empty() ? 0.0 : 1.0 / static_cast<double>(model.trees.size());
  for (double& p : probs) p *= inv;
  return probs;
}

int predict_class(const TrainedEnsemble& model, const std::vector<double>& row) {
  auto probs = predict_proba(model, row);
  int best = 0;
  for (size_t c = 1; c < probs.size(); ++c)
    if (probs[c] > probs[best]) best = static_cast<int>(c);
  return best;
}

std::vector<std::pair<int, double>> feature_importance(const TrainedEnsemble& model) {
  std::vector<double> acc(model.input_dim, 0.0);
  int counted_trees = 0;
  for (const auto& tree : model.trees) {
    std::vector<double> per_tree(model.selected_feature_indices.size(), 0.0);
    double total = 0;
    for (const auto& node : tree.nodes) {
      if (node.feature >= 0) {
        per_tree[node.feature] += node.importance_contrib;
        total += node.importance_contrib;
      }
    }
    if (total <= 0) continue;  // single-leaf trees stay out of the mean
    ++counted_trees;
    for (size_t f = 0; f < per_tree.size(); ++f)
      acc[model.selected_feature_indices[f]] += per_tree[f] / total;
  }
  if (counted_trees > 0)
    for (double& v : acc) v /= static_cast<double>(counted_trees);

  std::vector<std::pair<int, double>> out;
  out.reserve(acc.size());
  for (int i = 0; i < static_cast<int>(acc.size()); ++i) out.emplace_back(i, acc[i]);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::string TrainedEnsemble::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["config"] = {{"algorithm", algo_name(config.algorithm)},
                 {"k_features", config.k_features},
                 {"n_trees", config.n_trees},
                 {"max_depth", config.max_depth},
                 {"min_samples_split", config.min_samples_split},
                 {"features_per_split", config.features_per_split},
                 {"seed", config.seed}};
  j["class_list"] = class_list;
  j["selected_feature_indices"] = selected_feature_indices;
  nlohmann::json jtrees = nlohmann::json::array();
  for (const auto& tree : trees) {
    nlohmann::json jnodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nlohmann::json jn{{"feature", n.feature},
                        {"threshold", n.threshold},
                        {"left", n.left},
                        {"right", n.right}};
      if (n.feature < 0) jn["probs"] = n.probs;
      jnodes.push_back(std::move(jn));
    }
    jtrees.push_back(std::move(jnodes));
  }
  j["trees"] = std::move(jtrees);
  return j.dump();
}

}  // namespace netprof::ml
