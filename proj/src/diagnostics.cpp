#include "regimecast/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "regimecast/common.hpp"

namespace regimecast {

ColumnStats column_stats(const std::string& name, const std::vector<double>& values) {
  if (values.empty()) throw DataError("summary_stats: empty column '" + name + "'");
  ColumnStats s;
  s.name = name;
  s.count = static_cast<long>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q75 = quantile_sorted(sorted, 0.75);
  return s;
}

std::vector<ColumnStats> summary_stats(const SeriesTable& table) {
  if (table.rows() == 0) throw DataError("summary_stats: empty table");
  std::vector<ColumnStats> out;
  out.reserve(table.names.size());
  for (int c = 0; c < table.cols(); ++c)
    out.push_back(column_stats(table.names[c], table.columns[c]));
  return out;
}

Eigen::MatrixXd correlation_matrix(const SeriesTable& table) {
  const int n = table.rows();
  const int d = table.cols();
  if (n < 2) throw DataError("correlation_matrix: need at least 2 rows");
  Eigen::MatrixXd x(n, d);
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < n; ++r) x(r, c) = table.columns[c][r];
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::VectorXd norms(d);
  for (int c = 0; c < d; ++c) {
    norms(c) = x.col(c).norm();
    if (norms(c) == 0.0)
      throw NumericError("correlation_matrix: zero-variance column '" + table.names[c] + "'");
  }
  Eigen::MatrixXd corr(d, d);
  for (int i = 0; i < d; ++i) {
    corr(i, i) = 1.0;
    for (int j = i + 1; j < d; ++j) {
      const double r = x.col(i).dot(x.col(j)) / (norms(i) * norms(j));
      corr(i, j) = r;
      corr(j, i) = r;
    }
  }
  return corr;
}

namespace {

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd se;
  double ssr = 0;
  int n = 0;
  int k = 0;
};

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  OlsFit fit;
  fit.n = static_cast<int>(x.rows());
  fit.k = static_cast<int>(x.cols());
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < fit.k) throw NumericError("adf_test: singular regression matrix");
  fit.beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * fit.beta;
  fit.ssr = resid.squaredNorm();
  const double sigma2 = fit.ssr / static_cast<double>(fit.n - fit.k);
  const Eigen::MatrixXd xtx_inv =
      (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(fit.k, fit.k));
  fit.se = (sigma2 * xtx_inv.diagonal()).cwiseMax(0.0).cwiseSqrt();
  return fit;
}

// Design for lag order p over dx rows [first_row, n_dx): y = dx_t,
// X = [1, level_{t-1}, dx_{t-1}..dx_{t-p}].
void build_design(const std::vector<double>& x, const std::vector<double>& dx,
                  int p, int first_row, Eigen::MatrixXd& X, Eigen::VectorXd& y) {
  const int n_rows = static_cast<int>(dx.size()) - first_row;
  X.resize(n_rows, p + 2);
  y.resize(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    const int t = first_row + r;  // dx index; dx[t] = x[t+1] - x[t]
    y(r) = dx[t];
    X(r, 0) = 1.0;
    X(r, 1) = x[t];  // level lagged one step
    for (int j = 1; j <= p; ++j) X(r, 1 + j) = dx[t - j];
  }
}

}  // namespace

AdfResult adf_test(const std::vector<double>& series, int max_lag) {
  const int n = static_cast<int>(series.size());
  if (max_lag < 0) throw std::invalid_argument("adf_test: max_lag must be >= 0");
  if (n <= max_lag + 10)
    throw DataError("adf_test: series too short for max_lag " + std::to_string(max_lag));
  for (double v : series)
    if (!std::isfinite(v)) throw DataError("adf_test: non-finite observation");

  std::vector<double> dx(n - 1);
  for (int t = 0; t + 1 < n; ++t) dx[t] = series[t + 1] - series[t];

  // Lag selection by AIC on the common sample (trimmed for max_lag).
  int best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  const int sel_rows = static_cast<int>(dx.size()) - max_lag;
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  for (int p = 0; p <= max_lag; ++p) {
    build_design(series, dx, p, max_lag, X, y);
    const OlsFit fit = ols(X, y);
    const double aic =
        sel_rows * std::log(fit.ssr / static_cast<double>(sel_rows)) + 2.0 * (p + 2);
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = p;
    }
  }

  // Final regression uses all rows available for the chosen lag.
  build_design(series, dx, best_lag, best_lag, X, y);
  const OlsFit fit = ols(X, y);
  if (fit.se(1) <= 0.0) throw NumericError("adf_test: degenerate level regressor");

  AdfResult res;
  res.statistic = fit.beta(1) / fit.se(1);
  res.used_lag = best_lag;
  res.n_obs = fit.n;
  res.stationary = res.statistic < res.crit_5;
  return res;
}

}  // namespace regimecast
