#include "regimecast/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "regimecast/common.hpp"

namespace regimecast {

ForecastResult forecast_horizon(const SeriesTable& features, const GaussianHmm* hmm,
                                const DecodedPath* path, AugmentMode mode,
                                const ForecastOptions& options) {
  if (options.ensemble < 2) throw std::invalid_argument("forecast: ensemble size must be >= 2");
  if (features.rows() <= options.n_lags + options.horizon)
    throw DataError("forecast: insufficient history for " + std::to_string(options.n_lags) +
                    " lags and horizon " + std::to_string(options.horizon));

  SeriesTable table = features;
  if (mode != AugmentMode::original) {
    if (!hmm || !path)
      throw DataError("mode '" + to_string(mode) + "' requires fitted regime artifacts");
    table = augment_features(features, *hmm, *path, mode);
  }

  // All history is training data at forecast time; the scaler sees it all.
  const Eigen::MatrixXd raw = table_matrix(table);
  const ScalerParams scaler = scaler_fit(raw, table.names);
  const SeriesTable scaled = table_from_matrix(table, scaler_transform(scaler, raw));
  const SupervisedTensor tensor = make_supervised(scaled, options.n_lags, options.horizon);

  // Final observed window drives the forecast.
  Tensor3 window;
  window.resize(1, options.n_lags, table.cols());
  const Eigen::MatrixXd scaled_rows = table_matrix(scaled);
  const int first_row = table.rows() - options.n_lags;
  for (int l = 0; l < options.n_lags; ++l)
    for (int f = 0; f < table.cols(); ++f) window.at(0, l, f) = scaled_rows(first_row + l, f);

  const int target_col = table.col_index(table.target_name);
  ForecastResult result;
  result.member_paths.resize(options.ensemble, options.horizon);
  for (int s = 0; s < options.ensemble; ++s) {
    TrainOptions topt = options.train;
    topt.seed = options.base_seed + static_cast<std::uint64_t>(s) * options.seed_stride;
    auto [net, report] = train(tensor, topt, scaler);
    const Eigen::MatrixXd pred = forward_batch(net, window, {0}, nullptr);
    for (int h = 0; h < options.horizon; ++h)
      result.member_paths(s, h) = scaler_inverse_value(scaler, target_col, pred(0, h));
  }

  result.point.resize(options.horizon);
  result.lower.resize(options.horizon);
  result.upper.resize(options.horizon);
  std::vector<double> column(options.ensemble);
  for (int h = 0; h < options.horizon; ++h) {
    for (int s = 0; s < options.ensemble; ++s) column[s] = result.member_paths(s, h);
    std::sort(column.begin(), column.end());
    result.lower(h) = quantile_sorted(column, 0.05);
    result.point(h) = quantile_sorted(column, 0.50);
    result.upper(h) = quantile_sorted(column, 0.95);
  }

  const int last_month = table.index.back();
  for (int h = 1; h <= options.horizon; ++h) result.horizon_months.push_back(last_month + h);
  return result;
}

ExperimentResult run_fold(const SeriesTable& table_aug, const ExperimentConfig& cfg,
                          const FoldRange& fold) {
  const int train_rows_end = fold.train_end - 1 + cfg.n_lags + cfg.horizon;
  const Eigen::MatrixXd raw = table_matrix(table_aug);
  const ScalerParams scaler = scaler_fit(raw.topRows(train_rows_end), table_aug.names);
  const SeriesTable scaled = table_from_matrix(table_aug, scaler_transform(scaler, raw));
  const SupervisedTensor tensor = make_supervised(scaled, cfg.n_lags, cfg.horizon);
  const SupervisedTensor train_t = slice_samples(tensor, fold.train_begin, fold.train_end);
  const SupervisedTensor test_t = slice_samples(tensor, fold.test_begin, fold.test_end);

  ExperimentResult res;
  auto [net, report] = train(train_t, cfg.train, scaler);
  res.net = std::move(net);
  res.report = std::move(report);
  res.n_train = train_t.n();
  res.n_test = test_t.n();
  res.test_months = test_t.sample_months;

  const Eigen::MatrixXd pred_scaled = predict(res.net, test_t.X);
  const int target_col = table_aug.col_index(table_aug.target_name);
  res.y_pred.resize(pred_scaled.rows(), pred_scaled.cols());
  for (int i = 0; i < pred_scaled.rows(); ++i)
    for (int h = 0; h < pred_scaled.cols(); ++h)
      res.y_pred(i, h) = scaler_inverse_value(scaler, target_col, pred_scaled(i, h));
  res.y_true.resize(test_t.n(), cfg.horizon);
  const auto& target_vals = table_aug.columns[target_col];
  for (int i = 0; i < test_t.n(); ++i)
    for (int h = 0; h < cfg.horizon; ++h)
      res.y_true(i, h) = target_vals[fold.test_begin + i + cfg.n_lags + h];
  res.metrics = evaluate(res.y_true, res.y_pred);
  return res;
}

std::vector<ModeMetrics> compare_configs(const SeriesTable& features, const GaussianHmm* hmm,
                                         const DecodedPath* path,
                                         const std::vector<AugmentMode>& modes,
                                         const ExperimentConfig& base,
                                         std::optional<int> n_folds) {
  std::vector<ModeMetrics> rows;
  for (const AugmentMode mode : modes) {
    ExperimentConfig cfg = base;
    cfg.mode = mode;
    if (!n_folds) {
      const ExperimentResult res = run_experiment(features, hmm, path, cfg);
      rows.push_back({mode, -1, res.metrics});
      continue;
    }
    SeriesTable table = features;
    if (mode != AugmentMode::original) {
      if (!hmm || !path)
        throw DataError("mode '" + to_string(mode) + "' requires fitted regime artifacts");
      table = augment_features(features, *hmm, *path, mode);
    }
    const int n_samples = table.rows() - cfg.n_lags - cfg.horizon + 1;
    if (n_samples < 2) throw DataError("compare_configs: too few samples");
    const auto folds = forward_chain_folds(n_samples, *n_folds);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const ExperimentResult res = run_fold(table, cfg, folds[f]);
      rows.push_back({mode, static_cast<int>(f) + 1, res.metrics});
    }
  }
  return rows;
}

}  // namespace regimecast
