#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "regimecast/network.hpp"

namespace regimecast {

struct ForecastResult {
  std::vector<int> horizon_months;  // consecutive months after the last index date
  Eigen::VectorXd point;            // per-step ensemble median, original units
  Eigen::VectorXd lower, upper;     // empirical 5th/95th percentiles
  Eigen::MatrixXd member_paths;     // S x horizon
};

struct ForecastOptions {
  int horizon = 12;
  int n_lags = 48;
  int ensemble = 20;
  std::uint64_t base_seed = 1;
  int seed_stride = 1;  // member seed = base_seed + s * stride
  TrainOptions train;
};

// Trains `ensemble` networks on all available supervised samples (seeds
// differing by stride), feeds the final window, aggregates per step.
ForecastResult forecast_horizon(const SeriesTable& features, const GaussianHmm* hmm,
                                const DecodedPath* path, AugmentMode mode,
                                const ForecastOptions& options);

struct ModeMetrics {
  AugmentMode mode = AugmentMode::original;
  int fold = -1;  // -1 for a single chronological split
  RegressionMetrics metrics;
};

// One row per mode (single split) or per mode x fold (forward chaining).
std::vector<ModeMetrics> compare_configs(const SeriesTable& features, const GaussianHmm* hmm,
                                         const DecodedPath* path,
                                         const std::vector<AugmentMode>& modes,
                                         const ExperimentConfig& base,
                                         std::optional<int> n_folds);

// Per-fold experiment used by compare_configs and the CV command.
ExperimentResult run_fold(const SeriesTable& table_aug, const ExperimentConfig& cfg,
                          const FoldRange& fold);

}  // namespace regimecast
