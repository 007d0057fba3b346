#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "netprof/subject_dataset.hpp"

namespace netprof::ml {

struct DimensionMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algo : uint8_t { RF, ET };
const char* algo_name(Algo a);
Algo algo_from_name(const std::string& name);

struct ModelConfig {
  Algo algorithm = Algo::RF;
  int k_features = 30;         // effective k = min(k, d)
  int n_trees = 100;
  int max_depth = -1;          // -1 = unlimited
  int min_samples_split = 2;
  int features_per_split = 0;  // 0 = floor(sqrt(d_selected)), at least 1
  uint64_t seed = 1;
};

struct TreeNode {
  int feature = -1;  // index into the selected feature set; -1 for leaves
  double threshold = 0;
  int left = -1;
  int right = -1;
  std::vector<double> probs;       // leaf class frequencies
  double importance_contrib = 0;   // sample-fraction weighted impurity decrease
};

struct Tree {
  std::vector<TreeNode> nodes;  // node 0 is the root
  const TreeNode& root() const { return nodes[0]; }
};

struct TrainedEnsemble {
  std::vector<Tree> trees;
  std::vector<std::string> class_list;
  std::vector<int> selected_feature_indices;  // into the full feature vector
  ModelConfig config;
  int input_dim = 0;  // expected predict row length (full vector)

  std::string to_json() const;
};

// RF fits each tree on a bootstrap sample with exhaustive midpoint
// thresholds; ET fits on the full sample with one uniform random
// threshold per candidate feature. K-best selection happens here, on
// the training rows only. Tree i draws from substream(seed, i).
TrainedEnsemble train(const Dataset& dataset, const ModelConfig& config, int threads = 1);

// mean of the trees' leaf distributions
std::vector<double> predict_proba(const TrainedEnsemble& model, const std::vector<double>& row);
// argmax with ties to the earlier class
int predict_class(const TrainedEnsemble& model, const std::vector<double>& row);

// Per tree, split-node contributions (sample fraction x impurity
// decrease) normalize to 1; the model importance is their mean.
// Pairs of (full feature index, importance), descending.
std::vector<std::pair<int, double>> feature_importance(const TrainedEnsemble& model);

}  // namespace netprof::ml
