#include "regimecast/pipeline.hpp"

#include <cmath>

#include "regimecast/common.hpp"

namespace regimecast {

ScalerParams scaler_fit(const Eigen::MatrixXd& rows, std::vector<std::string> names) {
  if (rows.rows() < 1) throw DataError("scaler_fit: empty input");
  if (!rows.allFinite()) throw DataError("scaler_fit: non-finite input");
  ScalerParams p;
  p.feature_order = std::move(names);
  p.col_min = rows.colwise().minCoeff().transpose();
  p.col_max = rows.colwise().maxCoeff().transpose();
  return p;
}

Eigen::MatrixXd scaler_transform(const ScalerParams& params, const Eigen::MatrixXd& rows) {
  if (rows.cols() != params.cols())
    throw std::invalid_argument("scaler_transform: column count mismatch");
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (int j = 0; j < rows.cols(); ++j) {
    if (params.degenerate(j)) {
      out.col(j).setZero();
    } else {
      out.col(j) = (rows.col(j).array() - params.col_min(j)) /
                   (params.col_max(j) - params.col_min(j));
    }
  }
  return out;
}

Eigen::MatrixXd scaler_inverse(const ScalerParams& params, const Eigen::MatrixXd& rows) {
  if (rows.cols() != params.cols())
    throw std::invalid_argument("scaler_inverse: column count mismatch");
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (int j = 0; j < rows.cols(); ++j)
    out.col(j) = rows.col(j).array() * (params.col_max(j) - params.col_min(j)) +
                 params.col_min(j);
  return out;
}

double scaler_inverse_value(const ScalerParams& params, int col, double v) {
  return v * (params.col_max(col) - params.col_min(col)) + params.col_min(col);
}

Eigen::MatrixXd Tensor3::sample(int i) const {
  Eigen::MatrixXd m(lags, feats);
  for (int l = 0; l < lags; ++l)
    for (int f = 0; f < feats; ++f) m(l, f) = at(i, l, f);
  return m;
}

Eigen::MatrixXd table_matrix(const SeriesTable& table) {
  Eigen::MatrixXd m(table.rows(), table.cols());
  for (int c = 0; c < table.cols(); ++c)
    for (int r = 0; r < table.rows(); ++r) m(r, c) = table.columns[c][r];
  return m;
}

SeriesTable table_from_matrix(const SeriesTable& like, const Eigen::MatrixXd& rows) {
  if (rows.rows() != like.rows() || rows.cols() != like.cols())
    throw std::invalid_argument("table_from_matrix: shape mismatch");
  SeriesTable out;
  out.index = like.index;
  out.names = like.names;
  out.target_name = like.target_name;
  out.columns.resize(like.cols());
  for (int c = 0; c < like.cols(); ++c) {
    out.columns[c].resize(like.rows());
    for (int r = 0; r < like.rows(); ++r) out.columns[c][r] = rows(r, c);
  }
  return out;
}

SupervisedTensor make_supervised(const SeriesTable& table, int n_lags, int horizon) {
  if (n_lags < 1 || horizon < 1)
    throw std::invalid_argument("make_supervised: n_lags and horizon must be >= 1");
  const int rows = table.rows();
  const int n_samples = rows - n_lags - horizon + 1;
  if (n_samples < 1)
    throw DataError("make_supervised: " + std::to_string(rows) +
                    " rows are insufficient for " + std::to_string(n_lags) + " lags and horizon " +
                    std::to_string(horizon));
  const int target = table.col_index(table.target_name);
  if (target < 0) throw DataError("make_supervised: table has no target column");

  SupervisedTensor t;
  t.n_lags = n_lags;
  t.horizon = horizon;
  t.X.resize(n_samples, n_lags, table.cols());
  t.y.resize(n_samples, horizon);
  t.sample_months.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    for (int l = 0; l < n_lags; ++l)
      for (int f = 0; f < table.cols(); ++f) t.X.at(i, l, f) = table.columns[f][i + l];
    for (int h = 0; h < horizon; ++h) t.y(i, h) = table.columns[target][i + n_lags + h];
    t.sample_months[i] = table.index[i + n_lags];
  }
  return t;
}

SupervisedTensor slice_samples(const SupervisedTensor& tensor, int begin, int end) {
  if (begin < 0 || end > tensor.n() || begin > end)
    throw std::invalid_argument("slice_samples: range out of bounds");
  SupervisedTensor out;
  out.n_lags = tensor.n_lags;
  out.horizon = tensor.horizon;
  out.X.resize(end - begin, tensor.X.lags, tensor.X.feats);
  out.y = tensor.y.middleRows(begin, end - begin);
  out.sample_months.assign(tensor.sample_months.begin() + begin,
                           tensor.sample_months.begin() + end);
  const std::size_t stride = static_cast<std::size_t>(tensor.X.lags) * tensor.X.feats;
  std::copy(tensor.X.d.begin() + begin * stride, tensor.X.d.begin() + end * stride,
            out.X.d.begin());
  return out;
}

std::pair<SupervisedTensor, SupervisedTensor> chrono_split(const SupervisedTensor& tensor,
                                                           double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("chrono_split: fraction must be in (0,1)");
  const int split = static_cast<int>(std::floor(train_fraction * tensor.n()));
  if (split < 1 || split >= tensor.n())
    throw DataError("chrono_split: split leaves an empty partition");
  return {slice_samples(tensor, 0, split), slice_samples(tensor, split, tensor.n())};
}

std::vector<FoldRange> forward_chain_folds(int n_samples, int n_folds) {
  if (n_folds < 1) throw std::invalid_argument("forward_chain_folds: need at least 1 fold");
  if (n_samples < (n_folds + 1) * 2)
    throw DataError("forward_chain_folds: too few samples for " + std::to_string(n_folds) +
                    " folds");
  const int blocks = n_folds + 1;
  const int base = n_samples / blocks;
  const int remainder = n_samples % blocks;
  std::vector<int> bounds(blocks + 1);  // block b spans [bounds[b], bounds[b+1])
  bounds[0] = 0;
  for (int b = 0; b < blocks; ++b) bounds[b + 1] = bounds[b] + base + (b == 0 ? remainder : 0);

  std::vector<FoldRange> folds(n_folds);
  for (int i = 0; i < n_folds; ++i) {
    folds[i].train_begin = 0;
    folds[i].train_end = bounds[i + 1];
    folds[i].test_begin = bounds[i + 1];
    folds[i].test_end = bounds[i + 2];
  }
  return folds;
}

}  // namespace regimecast
