#pragma once

#include <optional>

#include "netprof/ml/ensemble.hpp"
#include "netprof/ml/metrics.hpp"

namespace netprof::ml {

struct FoldDegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Leave-one-out: feature selection and training happen inside each
// fold (fold i uses substream(seed, i)); metrics pool the n held-out
// predictions.
EvalResult loocv(const Dataset& dataset, const ModelConfig& config, int threads = 1);

enum class ReportMode : uint8_t { F1, WAUC };

struct GridSpec {
  std::vector<Algo> algorithms = {Algo::RF, Algo::ET};
  std::vector<int> k_values = {30, 50, 80, 100, 120};
  ModelConfig base;  // trees, depth, seed; algorithm/k overwritten per cell
};

struct GridEntry {
  ModelConfig config;
  EvalResult result;
};

struct GridResult {
  std::vector<GridEntry> entries;  // RF-first, ascending k
  int best_f1 = -1;
  int best_wauc = -1;

  const GridEntry& best(ReportMode mode) const {
    return entries[mode == ReportMode::F1 ? best_f1 : best_wauc];
  }
};

// Full grid evaluation; ties resolve to RF before ET, then smaller k.
GridResult grid_search(const Dataset& dataset, const GridSpec& spec, int threads = 1);

}  // namespace netprof::ml
