#include "netprof/ml/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace netprof::ml {

double anova_f(const std::vector<double>& values, const std::vector<int>& classes) {
  if (values.size() != classes.size() || values.empty())
    throw std::invalid_argument("anova_f: values/classes size mismatch");

  std::map<int, std::pair<double, int>> groups;  // class -> (sum, count)
  double grand_sum = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    auto& g = groups[classes[i]];
    g.first += values[i];
    g.second += 1;
    grand_sum += values[i];
  }
  const size_t k = groups.size();
  const size_t n = values.size();
  if (k < 2) throw SingleClassError("anova_f needs at least two classes");

  const double grand_mean = grand_sum / static_cast<double>(n);
  std::map<int, double> means;
  double ssb = 0;
  for (const auto& [cls, g] : groups) {
    double mean = g.first / g.second;
    means[cls] = mean;
    ssb += g.second * (mean - grand_mean) * (mean - grand_mean);
  }
  double ssw = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    double d = values[i] - means[classes[i]];
    ssw += d * d;
  }

  if (ssb <= 0) return 0.0;
  if (ssw <= 0) return std::numeric_limits<double>::infinity();
  double df_between = static_cast<double>(k - 1);
  double df_within = static_cast<double>(n - k);
  if (df_within <= 0) return std::numeric_limits<double>::infinity();
  return (ssb / df_between) / (ssw / df_within);
}

std::vector<int> select_k_best(const std::vector<double>& x, int n_rows, int n_cols,
                               const std::vector<int>& classes, int k) {
  if (k < 1) throw std::invalid_argument("select_k_best: k must be >= 1");
  std::vector<std::pair<double, int>> scored(n_cols);
  std::vector<double> col(n_rows);
  for (int c = 0; c < n_cols; ++c) {
    for (int r = 0; r < n_rows; ++r) col[r] = x[static_cast<size_t>(r) * n_cols + c];
    scored[c] = {anova_f(col, classes), c};
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  int take = std::min(k, n_cols);
  std::vector<int> out(take);
  for (int i = 0; i < take; ++i) out[i] = scored[i].second;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace netprof::ml
