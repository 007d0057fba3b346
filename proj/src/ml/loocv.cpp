#include "netprof/ml/loocv.hpp"

#include <set>

#include "netprof/parallel.hpp"
#include "netprof/rng.hpp"

namespace netprof::ml {

EvalResult loocv(const Dataset& dataset, const ModelConfig& config, int threads) {
  const int n = dataset.n();
  const int d = dataset.d();
  if (n < 3) throw std::invalid_argument("loocv needs at least 3 subjects");

  std::vector<Prediction> pooled(n);
  parallel_for(n, threads, [&](int i) {
    Dataset fold;
    fold.feature_names = dataset.feature_names;
    fold.class_list = dataset.class_list;
    fold.label_name = dataset.label_name;
    fold.x.reserve(static_cast<size_t>(n - 1) * d);
    fold.y.reserve(n - 1);
    for (int r = 0; r < n; ++r) {
      if (r == i) continue;
      fold.subject_ids.push_back(dataset.subject_ids[r]);
      fold.x.insert(fold.x.end(), dataset.x.begin() + static_cast<size_t>(r) * d,
                    dataset.x.begin() + static_cast<size_t>(r + 1) * d);
      fold.y.push_back(dataset.y[r]);
    }
    {
      std::set<int> classes(fold.y.begin(), fold.y.end());
      if (classes.size() < 2)
        throw FoldDegenerateError("fold " + std::to_string(i) +
                                  ": training labels collapse to one class");
    }
    ModelConfig fold_cfg = config;
    fold_cfg.seed = substream(config.seed, static_cast<uint64_t>(i));
    TrainedEnsemble model = train(fold, fold_cfg, 1);

    std::vector<double> row(dataset.x.begin() + static_cast<size_t>(i) * d,
                            dataset.x.begin() + static_cast<size_t>(i + 1) * d);
    Prediction p;
    p.true_class = dataset.y[i];
    p.probs = predict_proba(model, row);
    p.predicted_class = 0;
    for (size_t c = 1; c < p.probs.size(); ++c)
      if (p.probs[c] > p.probs[p.predicted_class]) p.predicted_class = static_cast<int>(c);
    pooled[i] = std::move(p);
  });

  return compute_metrics(std::move(pooled), static_cast<int>(dataset.class_list.size()));
}

GridResult grid_search(const Dataset& dataset, const GridSpec& spec, int threads) {
  GridResult out;
  for (Algo algo : spec.algorithms) {
    for (int k : spec.k_values) {
      ModelConfig cfg = spec.base;
      cfg.algorithm = algo;
      cfg.k_features = k;
      GridEntry entry{cfg, loocv(dataset, cfg, threads)};
      out.entries.push_back(std::move(entry));
    }
  }
  for (int i = 0; i < static_cast<int>(out.entries.size()); ++i) {
    if (out.best_f1 < 0 || out.entries[i].result.f1 > out.entries[out.best_f1].result.f1)
      out.best_f1 = i;
    if (out.best_wauc < 0 || out.entries[i].result.wauc > out.entries[out.best_wauc].result.wauc)
      out.best_wauc = i;
  }
  return out;
}

}  // namespace netprof::ml
