#include "regimecast/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "regimecast/common.hpp"
#include "regimecast/json_util.hpp"

namespace regimecast {

std::pair<LstmNetwork, TrainReport> train(const SupervisedTensor& tensor,
                                          const TrainOptions& options,
                                          const ScalerParams& scaler) {
  const int n = tensor.n();
  if (n < 1) throw DataError("train: empty tensor");
  if (options.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (options.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");

  NetConfig cfg;
  cfg.input_dim = tensor.X.feats;
  cfg.n_lags = tensor.X.lags;
  cfg.horizon = tensor.horizon;
  cfg.hidden1 = options.hidden1;
  cfg.hidden2 = options.hidden2;
  cfg.dense = options.dense;

  LstmNetwork net = init_network(cfg, options.seed);
  net.scaler = scaler;
  AdamState adam = init_adam(net);
  TrainReport report;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(options.seed ^ 0x9e3779b97f4a7c15ull);

  ForwardCache cache;
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0;
    for (int start = 0; start < n; start += options.batch_size) {
      const int count = std::min(options.batch_size, n - start);
      std::vector<int> idx(order.begin() + start, order.begin() + start + count);
      const Eigen::MatrixXd pred = forward_batch(net, tensor.X, idx, &cache);
      Eigen::MatrixXd y(count, tensor.horizon);
      for (int b = 0; b < count; ++b) y.row(b) = tensor.y.row(idx[b]);
      const Eigen::MatrixXd resid = pred - y;
      const double batch_mse = resid.squaredNorm() / resid.size();
      if (!std::isfinite(batch_mse)) throw NumericError("train: loss diverged");
      loss_sum += batch_mse * count;

      const Eigen::MatrixXd dY = 2.0 * resid / static_cast<double>(resid.size());
      NetGrads grads = backward_batch(net, cache, dY);
      clip_grads(grads, options.clip_norm);
      adam_step(net, grads, adam, options.lr);
    }
    report.loss_curve.push_back(loss_sum / n);
  }
  report.epochs_run = options.epochs;
  report.checksum = weight_checksum(net);
  return {std::move(net), std::move(report)};
}

RegressionMetrics evaluate(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols())
    throw std::invalid_argument("evaluate: shape mismatch");
  if (y_true.size() == 0) throw std::invalid_argument("evaluate: empty input");
  RegressionMetrics m;
  const Eigen::MatrixXd resid = y_pred - y_true;
  m.mse = resid.squaredNorm() / resid.size();
  m.mae = resid.cwiseAbs().sum() / resid.size();
  const double mean = y_true.mean();
  const double sst = (y_true.array() - mean).square().sum();
  if (sst > 0) {
    m.r2 = 1.0 - resid.squaredNorm() / sst;
    m.r2_defined = true;
  } else {
    m.r2 = std::numeric_limits<double>::quiet_NaN();
    m.r2_defined = false;
  }
  return m;
}

ExperimentResult run_experiment(const SeriesTable& features, const GaussianHmm* hmm,
                                const DecodedPath* path, const ExperimentConfig& cfg) {
  SeriesTable table = features;
  if (cfg.mode != AugmentMode::original) {
    if (!hmm || !path)
      throw DataError("mode '" + to_string(cfg.mode) + "' requires fitted regime artifacts");
    table = augment_features(features, *hmm, *path, cfg.mode);
  }

  const int n_samples = table.rows() - cfg.n_lags - cfg.horizon + 1;
  if (n_samples < 4)
    throw DataError("run_experiment: too few rows for the lag/horizon configuration");

  int split;
  if (cfg.split_month) {
    split = 0;
    while (split < n_samples && table.index[split + cfg.n_lags] < *cfg.split_month) ++split;
  } else {
    split = static_cast<int>(std::floor(cfg.train_fraction * n_samples));
  }
  if (split < 1 || split >= n_samples)
    throw DataError("run_experiment: split leaves an empty partition");

  // Rows touched by training samples: inputs and targets of samples [0, split).
  const int train_rows_end = split - 1 + cfg.n_lags + cfg.horizon;
  const Eigen::MatrixXd raw = table_matrix(table);
  const ScalerParams scaler = scaler_fit(raw.topRows(train_rows_end), table.names);
  const SeriesTable scaled = table_from_matrix(table, scaler_transform(scaler, raw));

  const SupervisedTensor tensor = make_supervised(scaled, cfg.n_lags, cfg.horizon);
  const SupervisedTensor train_t = slice_samples(tensor, 0, split);
  const SupervisedTensor test_t = slice_samples(tensor, split, tensor.n());

  ExperimentResult res;
  auto [net, report] = train(train_t, cfg.train, scaler);
  res.net = std::move(net);
  res.report = std::move(report);
  res.n_train = train_t.n();
  res.n_test = test_t.n();
  res.test_months = test_t.sample_months;

  const Eigen::MatrixXd pred_scaled = predict(res.net, test_t.X);
  const int target_col = table.col_index(table.target_name);
  res.y_pred.resize(pred_scaled.rows(), pred_scaled.cols());
  for (int i = 0; i < pred_scaled.rows(); ++i)
    for (int h = 0; h < pred_scaled.cols(); ++h)
      res.y_pred(i, h) = scaler_inverse_value(scaler, target_col, pred_scaled(i, h));
  res.y_true.resize(test_t.n(), cfg.horizon);
  const auto& target_vals = table.columns[target_col];
  for (int i = 0; i < test_t.n(); ++i)
    for (int h = 0; h < cfg.horizon; ++h)
      res.y_true(i, h) = target_vals[split + i + cfg.n_lags + h];

  res.metrics = evaluate(res.y_true, res.y_pred);
  return res;
}

namespace {

nlohmann::json layer_to_json(const LstmLayerParams& p) {
  return {{"W", matrix_to_json(p.W)}, {"U", matrix_to_json(p.U)}, {"b", vector_to_json(p.b)}};
}

LstmLayerParams layer_from_json(const nlohmann::json& j) {
  LstmLayerParams p;
  p.W = matrix_from_json(j.at("W"));
  p.U = matrix_from_json(j.at("U"));
  p.b = vector_from_json(j.at("b"));
  return p;
}

nlohmann::json dense_to_json(const DenseParams& p) {
  return {{"W", matrix_to_json(p.W)}, {"b", vector_to_json(p.b)}};
}

DenseParams dense_from_json(const nlohmann::json& j) {
  DenseParams p;
  p.W = matrix_from_json(j.at("W"));
  p.b = vector_from_json(j.at("b"));
  return p;
}

}  // namespace

std::string bundle_to_json(const ModelBundle& bundle) {
  const LstmNetwork& net = bundle.net;
  nlohmann::json j;
  j["architecture"] = {{"input_dim", net.cfg.input_dim}, {"n_lags", net.cfg.n_lags},
                       {"horizon", net.cfg.horizon},     {"hidden1", net.cfg.hidden1},
                       {"hidden2", net.cfg.hidden2},     {"dense", net.cfg.dense}};
  j["weights"] = {{"layer1", layer_to_json(net.layer1)},
                  {"layer2", layer_to_json(net.layer2)},
                  {"dense1", dense_to_json(net.dense1)},
                  {"head", dense_to_json(net.head)}};
  j["scaler"] = {{"features", net.scaler.feature_order},
                 {"min", vector_to_json(net.scaler.col_min)},
                 {"max", vector_to_json(net.scaler.col_max)}};
  j["seed"] = net.seed;
  j["mode"] = to_string(bundle.mode);
  j["train_fraction"] = bundle.train_fraction;
  j["config"] = {{"epochs", bundle.train.epochs},   {"batch_size", bundle.train.batch_size},
                 {"lr", bundle.train.lr},           {"clip_norm", bundle.train.clip_norm},
                 {"hidden1", bundle.train.hidden1}, {"hidden2", bundle.train.hidden2},
                 {"dense", bundle.train.dense}};
  return j.dump(2) + "\n";
}

ModelBundle bundle_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ModelBundle bundle;
  LstmNetwork& net = bundle.net;
  const auto& arch = j.at("architecture");
  net.cfg.input_dim = arch.at("input_dim").get<int>();
  net.cfg.n_lags = arch.at("n_lags").get<int>();
  net.cfg.horizon = arch.at("horizon").get<int>();
  net.cfg.hidden1 = arch.at("hidden1").get<int>();
  net.cfg.hidden2 = arch.at("hidden2").get<int>();
  net.cfg.dense = arch.at("dense").get<int>();
  const auto& w = j.at("weights");
  net.layer1 = layer_from_json(w.at("layer1"));
  net.layer2 = layer_from_json(w.at("layer2"));
  net.dense1 = dense_from_json(w.at("dense1"));
  net.head = dense_from_json(w.at("head"));
  const auto& sc = j.at("scaler");
  net.scaler.feature_order = sc.at("features").get<std::vector<std::string>>();
  net.scaler.col_min = vector_from_json(sc.at("min"));
  net.scaler.col_max = vector_from_json(sc.at("max"));
  net.seed = j.at("seed").get<std::uint64_t>();
  bundle.mode = augment_mode_from_string(j.at("mode").get<std::string>());
  bundle.train_fraction = j.at("train_fraction").get<double>();
  const auto& cfgj = j.at("config");
  bundle.train.epochs = cfgj.at("epochs").get<int>();
  bundle.train.batch_size = cfgj.at("batch_size").get<int>();
  bundle.train.lr = cfgj.at("lr").get<double>();
  bundle.train.clip_norm = cfgj.at("clip_norm").get<double>();
  bundle.train.hidden1 = cfgj.at("hidden1").get<int>();
  bundle.train.hidden2 = cfgj.at("hidden2").get<int>();
  bundle.train.dense = cfgj.at("dense").get<int>();
  bundle.train.seed = net.seed;
  return bundle;
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << bundle_to_json(bundle);
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bundle_from_json(text);
}

}  // namespace regimecast
