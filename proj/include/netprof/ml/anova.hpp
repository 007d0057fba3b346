#pragma once

#include <stdexcept>
#include <vector>

namespace netprof::ml {

struct SingleClassError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One-way ANOVA F statistic. Zero within-class variance with separated
// means returns +infinity so it ranks above every finite score; zero
// between-class variance returns 0.
double anova_f(const std::vector<double>& values, const std::vector<int>& classes);

// Indices of the k largest F values, ties to the lower feature index.
// x is row-major n_rows x n_cols.
std::vector<int> select_k_best(const std::vector<double>& x, int n_rows, int n_cols,
                               const std::vector<int>& classes, int k);

}  // namespace netprof::ml
