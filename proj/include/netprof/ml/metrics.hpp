#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netprof::ml {

struct EmptyPredictionsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Prediction {
  int true_class = 0;
  int predicted_class = 0;
  std::vector<double> probs;  // over the class list
};

struct EvalResult {
  double accuracy = 0;
  double wauc = 0;
  double w_precision = 0;
  double w_recall = 0;
  double f1 = 0;
  std::vector<Prediction> pooled;
};

// Support-weighted precision/recall over the pooled confusion matrix,
// one-vs-rest trapezoidal AUC with midpoint tie handling, and the
// harmonic F1 of the weighted pair.
EvalResult compute_metrics(std::vector<Prediction> pooled, int n_classes);

double f1_score(double precision, double recall);

// one-vs-rest ranking AUC; ties count half
double binary_auc(const std::vector<double>& scores, const std::vector<int>& positives);

}  // namespace netprof::ml
