#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "netprof/ml/anova.hpp"
#include "netprof/ml/loocv.hpp"
#include "netprof/ml/metrics.hpp"
#include "netprof/rng.hpp"

using namespace netprof;
using namespace netprof::ml;

namespace {

Dataset make_ds(int n, int d, const std::vector<int>& y, const std::vector<double>& x,
                int n_classes = 2) {
  Dataset ds;
  for (int i = 0; i < d; ++i) ds.feature_names.push_back("f" + std::to_string(i));
  for (int i = 0; i < n; ++i) ds.subject_ids.push_back("s" + std::to_string(i));
  ds.x = x;
  ds.y = y;
  for (int c = 0; c < n_classes; ++c) ds.class_list.push_back("C" + std::to_string(c));
  ds.label_name = "label";
  return ds;
}

// brute-force F via group sums, an independent route from anova_f
double brute_f(const std::vector<double>& values, const std::vector<int>& classes) {
  std::map<int, std::vector<double>> groups;
  for (size_t i = 0; i < values.size(); ++i) groups[classes[i]].push_back(values[i]);
  double n = static_cast<double>(values.size());
  double k = static_cast<double>(groups.size());
  double grand = 0;
  for (double v : values) grand += v;
  grand /= n;
  double ssb = 0, ssw = 0;
  for (auto& [c, vals] : groups) {
    double m = 0;
    for (double v : vals) m += v;
    m /= static_cast<double>(vals.size());
    ssb += static_cast<double>(vals.size()) * (m - grand) * (m - grand);
    for (double v : vals) ssw += (v - m) * (v - m);
  }
  if (ssb <= 0) return 0;
  if (ssw <= 0) return std::numeric_limits<double>::infinity();
  return (ssb / (k - 1)) / (ssw / (n - k));
}

}  // namespace

TEST_CASE("anova worked examples") {
  CHECK(anova_f({1, 2, 3, 4, 5, 6}, {0, 0, 0, 1, 1, 1}) == doctest::Approx(13.5).epsilon(1e-12));
  CHECK(anova_f({1, 2, 3, 1, 2, 3}, {0, 0, 0, 1, 1, 1}) == 0.0);
  CHECK(std::isinf(anova_f({1, 1, 2, 2}, {0, 0, 1, 1})));
  CHECK_THROWS_AS(anova_f({1, 2, 3}, {0, 0, 0}), SingleClassError);
}

TEST_CASE("select_k_best picks the separating feature") {
  // feature 0 separates, 1 and 2 are flat
  std::vector<double> x = {
      1, 5, 5,
      1, 5, 5,
      9, 5, 5,
      9, 5, 5,
  };
  std::vector<int> y = {0, 0, 1, 1};
  CHECK(select_k_best(x, 4, 3, y, 1) == std::vector<int>{0});
  CHECK(select_k_best(x, 4, 3, y, 99) == std::vector<int>{0, 1, 2});
}

TEST_CASE("select_k_best ties break to the lower index") {
  // two identical informative columns at indices 1 and 2
  std::vector<double> x = {
      0, 7, 7,
      1, 7, 7,
      0, 9, 9,
      1, 9, 9,
  };
  std::vector<int> y = {0, 0, 1, 1};
  auto sel = select_k_best(x, 4, 3, y, 2);
  CHECK(sel == std::vector<int>{1, 2});
  auto sel1 = select_k_best(x, 4, 3, y, 1);
  CHECK(sel1 == std::vector<int>{1});
}

TEST_CASE("select_k_best matches a brute-force ranking on random data") {
  Rng rng(31337);
  for (int iter = 0; iter < 100; ++iter) {
    int n = 8 + static_cast<int>(rng.uniform(20));
    int d = 20;
    std::vector<double> x(static_cast<size_t>(n) * d);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) y[i] = i % 2;
    for (auto& v : x) v = rng.uniform_real() * 10;
    int k = 1 + static_cast<int>(rng.uniform(d));

    auto got = select_k_best(x, n, d, y, k);

    std::vector<std::pair<double, int>> scored;
    for (int c = 0; c < d; ++c) {
      std::vector<double> col(n);
      for (int r = 0; r < n; ++r) col[r] = x[static_cast<size_t>(r) * d + c];
      scored.push_back({brute_f(col, y), c});
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    std::vector<int> want;
    for (int i = 0; i < k; ++i) want.push_back(scored[i].second);
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
}

TEST_CASE("selected set invariant under positive affine transforms") {
  Rng rng(8);
  int n = 16, d = 10;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2;
  for (auto& v : x) v = rng.normal();

  auto base = select_k_best(x, n, d, y, 4);
  std::vector<double> x2 = x;
  for (int r = 0; r < n; ++r) x2[static_cast<size_t>(r) * d + 3] =
      2.5 * x[static_cast<size_t>(r) * d + 3] + 17.0;
  auto transformed = select_k_best(x2, n, d, y, 4);
  CHECK(base == transformed);
}

TEST_CASE("training is deterministic under a fixed seed") {
  Rng rng(4);
  int n = 40, d = 8;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int f = 0; f < d; ++f)
      x[static_cast<size_t>(i) * d + f] = rng.normal() + (f == 2 ? y[i] * 2.0 : 0.0);
  }
  Dataset ds = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.k_features = 5;
  cfg.n_trees = 20;
  cfg.seed = 99;

  for (Algo algo : {Algo::RF, Algo::ET}) {
    cfg.algorithm = algo;
    auto m1 = train(ds, cfg, 1);
    auto m2 = train(ds, cfg, 2);  // thread count must not matter
    CHECK(m1.to_json() == m2.to_json());
  }
}

TEST_CASE("a perfectly separating feature reaches training accuracy 1") {
  int n = 20, d = 3;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  Rng rng(6);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    x[static_cast<size_t>(i) * d + 0] = rng.normal();
    x[static_cast<size_t>(i) * d + 1] = y[i] ? 10.0 + rng.uniform_real() : -10.0 - rng.uniform_real();
    x[static_cast<size_t>(i) * d + 2] = rng.normal();
  }
  Dataset ds = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.k_features = 3;
  cfg.n_trees = 15;
  for (Algo algo : {Algo::RF, Algo::ET}) {
    cfg.algorithm = algo;
    auto model = train(ds, cfg, 1);
    int correct = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> row(ds.x.begin() + static_cast<size_t>(i) * d,
                              ds.x.begin() + static_cast<size_t>(i + 1) * d);
      if (predict_class(model, row) == y[i]) ++correct;
    }
    CHECK(correct == n);
  }
}

TEST_CASE("min_samples_split larger than n gives a single majority leaf") {
  int n = 6, d = 2;
  std::vector<double> x(static_cast<size_t>(n) * d, 1.0);
  std::vector<int> y = {0, 0, 0, 0, 1, 1};
  Dataset ds = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.algorithm = Algo::ET;  // full sample, so leaf counts mirror y exactly
  cfg.n_trees = 1;
  cfg.k_features = 2;
  cfg.min_samples_split = 100;
  auto model = train(ds, cfg, 1);
  REQUIRE(model.trees.size() == 1);
  REQUIRE(model.trees[0].nodes.size() == 1);
  std::vector<double> row{1.0, 1.0};
  CHECK(predict_class(model, row) == 0);
  auto probs = predict_proba(model, row);
  CHECK(probs[0] == doctest::Approx(4.0 / 6));
}

TEST_CASE("predict_proba sums to one and breaks ties to the earlier class") {
  TrainedEnsemble model;
  model.class_list = {"A", "B"};
  model.input_dim = 1;
  model.selected_feature_indices = {0};
  Tree t1, t2;
  TreeNode l1;
  l1.probs = {1.0, 0.0};
  t1.nodes.push_back(l1);
  TreeNode l2;
  l2.probs = {0.0, 1.0};
  t2.nodes.push_back(l2);
  model.trees = {t1, t2};
  std::vector<double> row{0.0};
  auto probs = predict_proba(model, row);
  CHECK(probs[0] == 0.5);
  CHECK(probs[1] == 0.5);
  CHECK(predict_class(model, row) == 0);  // tie -> earlier class
  CHECK_THROWS_AS(predict_proba(model, {1.0, 2.0}), DimensionMismatchError);
}

TEST_CASE("probability vectors sum to one on random models") {
  Rng rng(55);
  int n = 30, d = 6;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<int>(rng.uniform(3));
  {
    std::set<int> seen(y.begin(), y.end());
    int fill = 0;
    for (int c = 0; c < 3; ++c)
      if (!seen.count(c)) y[fill++] = c;
  }
  for (auto& v : x) v = rng.normal();
  Dataset ds = make_ds(n, d, y, x, 3);
  ModelConfig cfg;
  cfg.n_trees = 10;
  cfg.k_features = 4;
  auto model = train(ds, cfg, 1);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<double> row(d);
    for (auto& v : row) v = rng.normal() * 3;
    auto probs = predict_proba(model, row);
    double sum = 0;
    for (double p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("prediction is equivariant under class relabeling") {
  Rng rng(12);
  int n = 24, d = 5;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2;
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = rng.normal() + (i % d == 1 ? y[i / d] * 1.5 : 0.0);

  Dataset ds = make_ds(n, d, y, x);
  Dataset swapped = ds;
  swapped.class_list = {"C1", "C0"};
  for (auto& v : swapped.y) v = 1 - v;

  ModelConfig cfg;
  cfg.n_trees = 12;
  cfg.k_features = 5;
  auto m1 = train(ds, cfg, 1);
  auto m2 = train(swapped, cfg, 1);
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(ds.x.begin() + static_cast<size_t>(i) * d,
                            ds.x.begin() + static_cast<size_t>(i + 1) * d);
    auto p1 = predict_proba(m1, row);
    auto p2 = predict_proba(m2, row);
    CHECK(p1[0] == doctest::Approx(p2[1]).epsilon(1e-12));
    CHECK(p1[1] == doctest::Approx(p2[0]).epsilon(1e-12));
  }
}

TEST_CASE("feature importance concentrates and normalizes") {
  // feature 1 fully decides the class; others are noise
  Rng rng(9);
  int n = 40, d = 6;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int f = 0; f < d; ++f)
      x[static_cast<size_t>(i) * d + f] = f == 1 ? (y[i] ? 5.0 : -5.0) : rng.normal();
  }
  Dataset ds = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.n_trees = 30;
  cfg.k_features = 6;
  auto model = train(ds, cfg, 1);
  auto ranked = feature_importance(model);
  CHECK(ranked.front().first == 1);
  double sum = 0;
  for (const auto& [f, imp] : ranked) sum += imp;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("metrics worked examples") {
  CHECK(f1_score(0.851, 0.793) == doctest::Approx(0.821).epsilon(2e-3));
  CHECK(f1_score(0, 0) == 0.0);

  // y=[M,M,F], pred=[M,F,F]
  std::vector<Prediction> pooled = {
      {0, 0, {0.9, 0.1}},
      {0, 1, {0.4, 0.6}},
      {1, 1, {0.2, 0.8}},
  };
  EvalResult r = compute_metrics(pooled, 2);
  CHECK(r.accuracy == doctest::Approx(2.0 / 3));
  CHECK(r.w_precision == doctest::Approx(0.8333).epsilon(1e-3));
  CHECK(r.w_recall == doctest::Approx(0.6667).epsilon(1e-3));
  CHECK(r.f1 == doctest::Approx(0.7407).epsilon(1e-3));
  CHECK_THROWS_AS(compute_metrics({}, 2), EmptyPredictionsError);
}

TEST_CASE("perfectly ordered probabilities give WAUC 1") {
  std::vector<Prediction> pooled;
  for (int i = 0; i < 10; ++i) {
    double p = i < 5 ? 0.1 + 0.01 * i : 0.8 + 0.01 * i;
    pooled.push_back({i < 5 ? 0 : 1, p > 0.5 ? 1 : 0, {1 - p, p}});
  }
  EvalResult r = compute_metrics(pooled, 2);
  CHECK(r.wauc == doctest::Approx(1.0));
}

TEST_CASE("metrics match a brute-force recomputation") {
  Rng rng(321);
  for (int iter = 0; iter < 200; ++iter) {
    int n_classes = 2 + static_cast<int>(rng.uniform(3));
    int n = 5 + static_cast<int>(rng.uniform(60));
    std::vector<Prediction> pooled(n);
    for (auto& p : pooled) {
      p.true_class = static_cast<int>(rng.uniform(n_classes));
      p.probs.resize(n_classes);
      double sum = 0;
      for (auto& q : p.probs) {
        q = rng.uniform_real() + 1e-6;
        sum += q;
      }
      for (auto& q : p.probs) q /= sum;
      // deliberately quantize so score ties happen
      for (auto& q : p.probs) q = std::floor(q * 8) / 8.0;
      p.predicted_class =
          static_cast<int>(std::max_element(p.probs.begin(), p.probs.end()) - p.probs.begin());
    }
    EvalResult r = compute_metrics(pooled, n_classes);

    // accuracy / weighted P/R by direct confusion counting
    double correct = 0;
    std::vector<double> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0), sup(n_classes, 0);
    for (const auto& p : pooled) {
      sup[p.true_class]++;
      if (p.true_class == p.predicted_class) {
        correct++;
        tp[p.true_class]++;
      } else {
        fp[p.predicted_class]++;
        fn[p.true_class]++;
      }
    }
    CHECK(r.accuracy == correct / n);
    double wp = 0, wr = 0;
    for (int c = 0; c < n_classes; ++c) {
      double prec = tp[c] + fp[c] > 0 ? tp[c] / (tp[c] + fp[c]) : 0;
      double rec = sup[c] > 0 ? tp[c] / sup[c] : 0;
      wp += sup[c] / n * prec;
      wr += sup[c] / n * rec;
    }
    CHECK(r.w_precision == doctest::Approx(wp).epsilon(1e-12));
    CHECK(r.w_recall == doctest::Approx(wr).epsilon(1e-12));
    CHECK(r.f1 == doctest::Approx(f1_score(wp, wr)).epsilon(1e-12));

    // WAUC by O(n^2) pair counting with half credit for ties
    double auc_sum = 0, wsum = 0;
    for (int c = 0; c < n_classes; ++c) {
      if (sup[c] == 0 || sup[c] == n) continue;
      double wins = 0, pairs = 0;
      for (const auto& a : pooled) {
        if (a.true_class != c) continue;
        for (const auto& b : pooled) {
          if (b.true_class == c) continue;
          pairs += 1;
          if (a.probs[c] > b.probs[c]) wins += 1;
          else if (a.probs[c] == b.probs[c]) wins += 0.5;
        }
      }
      auc_sum += sup[c] / n * (wins / pairs);
      wsum += sup[c] / n;
    }
    double want_wauc = wsum > 0 ? auc_sum / wsum : 0.0;
    CHECK(r.wauc == doctest::Approx(want_wauc).epsilon(1e-9));
  }
}

TEST_CASE("loocv on a class indicator hits accuracy 1") {
  // 4 subjects, the single feature equals the class
  std::vector<double> x = {0, 0, 1, 1};
  std::vector<int> y = {0, 0, 1, 1};
  Dataset ds = make_ds(4, 1, y, x);
  ModelConfig cfg;
  cfg.n_trees = 11;
  cfg.k_features = 1;
  for (Algo algo : {Algo::RF, Algo::ET}) {
    cfg.algorithm = algo;
    EvalResult r = loocv(ds, cfg, 1);
    CHECK(r.accuracy == 1.0);
    CHECK(r.pooled.size() == 4);  // one prediction per fold
  }
}

TEST_CASE("loocv flags degenerate folds") {
  std::vector<double> x = {0, 0, 1};
  std::vector<int> y = {0, 0, 1};  // removing the only class-1 row degenerates
  Dataset ds = make_ds(3, 1, y, x);
  ModelConfig cfg;
  CHECK_THROWS_AS(loocv(ds, cfg, 1), FoldDegenerateError);
}

TEST_CASE("loocv under permuted labels stays near the majority baseline") {
  Rng rng(246);
  int n = 60, d = 15;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = i % 2;
  // planted signal in feature 0, then permute the labels away
  for (int i = 0; i < n; ++i)
    for (int f = 0; f < d; ++f)
      x[static_cast<size_t>(i) * d + f] = rng.normal() + (f == 0 ? 2.0 * y[i] : 0.0);
  for (int i = n - 1; i > 0; --i) std::swap(y[i], y[rng.uniform(i + 1)]);

  Dataset ds = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.n_trees = 40;
  cfg.k_features = 10;
  double base = 0.5;
  double sigma = std::sqrt(base * (1 - base) / n);
  double acc_sum = 0;
  int runs = 5;
  for (int s = 0; s < runs; ++s) {
    cfg.seed = 1000 + s;
    acc_sum += loocv(ds, cfg, 2).accuracy;
  }
  double mean_acc = acc_sum / runs;
  CHECK(mean_acc > base - 3 * sigma);
  CHECK(mean_acc < base + 3 * sigma);
}

TEST_CASE("grid search picks the best and ties to RF with smallest k") {
  // perfectly separable data: every config scores f1 = 1 -> tie rule
  int n = 12, d = 4;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  Rng rng(3);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int f = 0; f < d; ++f)
      x[static_cast<size_t>(i) * d + f] = f == 0 ? (y[i] ? 4 : -4) : rng.normal() * 0.1;
  }
  Dataset ds = make_ds(n, d, y, x);
  GridSpec spec;
  spec.k_values = {2, 3};
  spec.base.n_trees = 9;
  GridResult res = grid_search(ds, spec, 1);
  REQUIRE(res.entries.size() == 4);
  CHECK(res.entries[res.best_f1].result.f1 == 1.0);
  CHECK(res.entries[res.best_f1].config.algorithm == Algo::RF);
  CHECK(res.entries[res.best_f1].config.k_features == 2);
}

TEST_CASE("f1 and wauc can rank two prediction sets oppositely") {
  // A: good argmax, poor ranking; B: weaker argmax, perfect ranking
  std::vector<Prediction> a, b;
  for (int i = 0; i < 10; ++i) {
    int truth = i < 5 ? 0 : 1;
    // A predicts argmax right except one, but probabilities are shuffled
    double pa = truth == 1 ? (i == 9 ? 0.2 : 0.6) : (i == 0 ? 0.55 : 0.4);
    a.push_back({truth, pa > 0.5 ? 1 : 0, {1 - pa, pa}});
    // B ranks perfectly but thresholds poorly
    double pb = truth == 1 ? 0.45 + 0.01 * i : 0.1 + 0.01 * i;
    b.push_back({truth, pb > 0.4 ? 1 : 0, {1 - pb, pb}});
  }
  EvalResult ra = compute_metrics(a, 2);
  EvalResult rb = compute_metrics(b, 2);
  CHECK(ra.f1 > rb.f1);
  CHECK(rb.wauc > ra.wauc);
}

TEST_CASE("held-out poisoning cannot change in-fold selection") {
  Rng rng(17);
  int n = 12, d = 6;
  std::vector<double> x(static_cast<size_t>(n) * d);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int f = 0; f < d; ++f)
      x[static_cast<size_t>(i) * d + f] = rng.normal() + (f == 2 ? 1.5 * y[i] : 0.0);
  }
  Dataset base = make_ds(n, d, y, x);
  ModelConfig cfg;
  cfg.n_trees = 15;
  cfg.k_features = 4;  // strictly less than d so the poison column could displace
  EvalResult clean = loocv(base, cfg, 1);

  // per fold: poison column constant on training rows, indicator at the
  // held-out row only
  std::vector<Prediction> poisoned_pool;
  for (int i = 0; i < n; ++i) {
    Dataset poisoned = base;
    poisoned.feature_names.push_back("poison");
    std::vector<double> nx;
    for (int r = 0; r < n; ++r) {
      nx.insert(nx.end(), base.x.begin() + static_cast<size_t>(r) * d,
                base.x.begin() + static_cast<size_t>(r + 1) * d);
      nx.push_back(r == i ? 1000.0 * (y[r] + 1) : 0.0);
    }
    poisoned.x = std::move(nx);
    EvalResult res = loocv(poisoned, cfg, 1);
    poisoned_pool.push_back(res.pooled[i]);
  }
  EvalResult dirty = compute_metrics(poisoned_pool, 2);
  CHECK(dirty.accuracy == clean.accuracy);
  for (int i = 0; i < n; ++i)
    CHECK(dirty.pooled[i].predicted_class == clean.pooled[i].predicted_class);
}
