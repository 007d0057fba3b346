#include "netprof/ml/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace netprof::ml {

double f1_score(double precision, double recall) {
  double s = precision + recall;
  return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

double binary_auc(const std::vector<double>& scores, const std::vector<int>& positives) {
  const size_t n = scores.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return scores[a] < scores[b]; });

  // average ranks across ties (1-based), i.e. the midpoint rule
  std::vector<double> rank(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t t = i; t <= j; ++t) rank[order[t]] = avg;
    i = j + 1;
  }

  double rank_sum = 0;
  size_t n_pos = 0;
  for (size_t t = 0; t < n; ++t) {
    if (positives[t]) {
      rank_sum += rank[t];
      ++n_pos;
    }
  }
  size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalResult compute_metrics(std::vector<Prediction> pooled, int n_classes) {
  if (pooled.empty()) throw EmptyPredictionsError("no pooled predictions");
  const double n = static_cast<double>(pooled.size());

  EvalResult r;
  std::vector<int> support(n_classes, 0), predicted(n_classes, 0), tp(n_classes, 0);
  int correct = 0;
  for (const auto& p : pooled) {
    support[p.true_class]++;
    predicted[p.predicted_class]++;
    if (p.true_class == p.predicted_class) {
      tp[p.true_class]++;
      ++correct;
    }
  }
  r.accuracy = correct / n;

  double wp = 0, wr = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (support[c] == 0) continue;
    double weight = support[c] / n;
    double precision = predicted[c] > 0 ? static_cast<double>(tp[c]) / predicted[c] : 0.0;
    double recall = static_cast<double>(tp[c]) / support[c];
    wp += weight * precision;
    wr += weight * recall;
  }
  r.w_precision = wp;
  r.w_recall = wr;
  r.f1 = f1_score(wp, wr);

  // support-weighted one-vs-rest AUC over classes with both
  // positives and negatives present
  double auc_sum = 0, auc_weight = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (support[c] == 0 || support[c] == static_cast<int>(pooled.size())) continue;
    std::vector<double> scores;
    std::vector<int> pos;
    scores.reserve(pooled.size());
    pos.reserve(pooled.size());
    for (const auto& p : pooled) {
      scores.push_back(c < static_cast<int>(p.probs.size()) ? p.probs[c] : 0.0);
      pos.push_back(p.true_class == c ? 1 : 0);
    }
    double weight = support[c] / n;
    auc_sum += weight * binary_auc(scores, pos);
    auc_weight += weight;
  }
  r.wauc = auc_weight > 0 ? auc_sum / auc_weight : 0.0;

  r.pooled = std::move(pooled);
  return r;
}

}  // namespace netprof::ml
