#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "regimecast/series.hpp"

namespace regimecast {

struct ColumnStats {
  std::string name;
  long count = 0;
  double mean = 0, std = 0, min = 0, q25 = 0, q50 = 0, q75 = 0, max = 0;
};

// Sample std (n-1); quartiles by linear interpolation between order statistics.
std::vector<ColumnStats> summary_stats(const SeriesTable& table);
ColumnStats column_stats(const std::string& name, const std::vector<double>& values);

// Pearson correlations, column order as in the table. Throws NumericError on
// a zero-variance column.
Eigen::MatrixXd correlation_matrix(const SeriesTable& table);

struct AdfResult {
  double statistic = 0;
  int used_lag = 0;
  int n_obs = 0;
  double crit_1 = -3.43, crit_5 = -2.86, crit_10 = -2.57;
  bool stationary = false;
};

// Augmented Dickey-Fuller with constant: regress dx_t on [1, x_{t-1},
// dx_{t-1}..dx_{t-p}], lag order p picked by AIC over 0..max_lag on a common
// sample, final fit on the full sample for the chosen p. The decision uses
// the large-sample 5% critical value.
AdfResult adf_test(const std::vector<double>& series, int max_lag);

}  // namespace regimecast
