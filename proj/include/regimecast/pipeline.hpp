#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "regimecast/series.hpp"

namespace regimecast {

// Per-column min/max captured from training rows only.
struct ScalerParams {
  std::vector<std::string> feature_order;
  Eigen::VectorXd col_min, col_max;

  int cols() const { return static_cast<int>(col_min.size()); }
  bool degenerate(int j) const { return col_max(j) == col_min(j); }
};

ScalerParams scaler_fit(const Eigen::MatrixXd& rows, std::vector<std::string> names);
// x' = (x - min) / (max - min); degenerate columns map to 0. No clipping.
Eigen::MatrixXd scaler_transform(const ScalerParams& params, const Eigen::MatrixXd& rows);
Eigen::MatrixXd scaler_inverse(const ScalerParams& params, const Eigen::MatrixXd& rows);
double scaler_inverse_value(const ScalerParams& params, int col, double v);

// Row-major [samples][lags][features].
struct Tensor3 {
  int n = 0, lags = 0, feats = 0;
  std::vector<double> d;

  void resize(int n_, int lags_, int feats_) {
    n = n_;
    lags = lags_;
    feats = feats_;
    d.assign(static_cast<std::size_t>(n) * lags * feats, 0.0);
  }
  double& at(int i, int l, int f) {
    return d[(static_cast<std::size_t>(i) * lags + l) * feats + f];
  }
  double at(int i, int l, int f) const {
    return d[(static_cast<std::size_t>(i) * lags + l) * feats + f];
  }
  Eigen::MatrixXd sample(int i) const;  // lags x feats
};

struct SupervisedTensor {
  Tensor3 X;
  Eigen::MatrixXd y;               // n x horizon
  std::vector<int> sample_months;  // month of the first predicted step
  int n_lags = 0, horizon = 0;

  int n() const { return X.n; }
};

// Sample i: inputs rows [i, i+n_lags), targets rows [i+n_lags, i+n_lags+horizon).
SupervisedTensor make_supervised(const SeriesTable& table, int n_lags, int horizon);

Eigen::MatrixXd table_matrix(const SeriesTable& table);
SeriesTable table_from_matrix(const SeriesTable& like, const Eigen::MatrixXd& rows);

std::pair<SupervisedTensor, SupervisedTensor> chrono_split(const SupervisedTensor& tensor,
                                                           double train_fraction);
SupervisedTensor slice_samples(const SupervisedTensor& tensor, int begin, int end);

struct FoldRange {
  int train_begin = 0, train_end = 0;
  int test_begin = 0, test_end = 0;
};

// n_folds+1 contiguous blocks (remainder to the first); fold i trains on
// blocks [0..i] and tests on block i+1.
std::vector<FoldRange> forward_chain_folds(int n_samples, int n_folds);

}  // namespace regimecast
