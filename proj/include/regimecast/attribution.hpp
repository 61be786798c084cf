#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "regimecast/lstm.hpp"

namespace regimecast {

// Evaluates F at a window and writes dF/dx into grad_out; returns F(x).
using PointGradFn =
    std::function<double(const Eigen::MatrixXd& x, Eigen::MatrixXd& grad_out)>;

// Exact reverse-mode gradient of output `output_index` w.r.t. every input
// entry of one window (lags x feats).
Eigen::MatrixXd input_gradient(const LstmNetwork& net, const Eigen::MatrixXd& window,
                               int output_index);

// Right-endpoint Riemann sum:
// IG_i = (x_i - x'_i) * (1/m) * sum_{k=1..m} dF(x' + (k/m)(x - x'))/dx_i.
Eigen::MatrixXd integrated_gradients(const PointGradFn& grad_fn, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& baseline, int m);

// Network version; evaluates the m path points as one batch.
Eigen::MatrixXd integrated_gradients(const LstmNetwork& net, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& baseline, int m,
                                     int output_index);

// Arithmetic mean over samples and the lag axis; per-feature vector.
// `magnitude` averages absolute values instead of signed ones.
Eigen::VectorXd average_attributions(const std::vector<Eigen::MatrixXd>& maps,
                                     bool magnitude = false);

enum class BaselineKind { zeros, train_mean };
std::string to_string(BaselineKind kind);
BaselineKind baseline_from_string(const std::string& s);

struct AttributionMap {
  std::vector<int> sample_months;
  std::vector<Eigen::MatrixXd> values;  // one lags x feats map per sample
  BaselineKind baseline_kind = BaselineKind::zeros;
  int m_steps = 50;
  std::vector<std::string> feature_order;
};

}  // namespace regimecast
