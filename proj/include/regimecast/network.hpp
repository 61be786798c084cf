#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regimecast/lstm.hpp"
#include "regimecast/regime.hpp"

namespace regimecast {

struct TrainOptions {
  int epochs = 100;
  int batch_size = 32;
  double lr = 1e-3;
  double clip_norm = 5.0;  // <= 0 disables clipping
  std::uint64_t seed = 0;
  int hidden1 = 50;
  int hidden2 = 50;
  int dense = 25;
};

struct TrainReport {
  std::vector<double> loss_curve;  // per-epoch training MSE (scaled units)
  int epochs_run = 0;
  std::uint64_t checksum = 0;
};

// Deterministic given (tensor, options): fixed init, seeded batch shuffle.
std::pair<LstmNetwork, TrainReport> train(const SupervisedTensor& tensor,
                                          const TrainOptions& options,
                                          const ScalerParams& scaler);

struct RegressionMetrics {
  double mse = 0, mae = 0, r2 = 0;
  bool r2_defined = true;
};

RegressionMetrics evaluate(const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred);

struct ExperimentConfig {
  AugmentMode mode = AugmentMode::original;
  int n_lags = 24;
  int horizon = 1;
  double train_fraction = 0.7;
  std::optional<int> split_month;  // overrides the fraction when set
  TrainOptions train;
};

struct ExperimentResult {
  RegressionMetrics metrics;
  std::vector<int> test_months;
  Eigen::MatrixXd y_true, y_pred;  // original units, n_test x horizon
  TrainReport report;
  LstmNetwork net;
  int n_train = 0, n_test = 0;
};

// scale -> lag -> split -> train -> predict -> inverse-scale -> evaluate.
// The scaler is fit on rows touched by training samples only.
ExperimentResult run_experiment(const SeriesTable& features, const GaussianHmm* hmm,
                                const DecodedPath* path, const ExperimentConfig& cfg);

// Model bundle: architecture + weights + scaler + run settings, JSON.
struct ModelBundle {
  LstmNetwork net;
  AugmentMode mode = AugmentMode::original;
  double train_fraction = 0.7;
  TrainOptions train;
};

std::string bundle_to_json(const ModelBundle& bundle);
ModelBundle bundle_from_json(const std::string& text);
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

}  // namespace regimecast
