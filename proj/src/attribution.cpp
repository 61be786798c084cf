#include "regimecast/attribution.hpp"

#include "regimecast/common.hpp"

namespace regimecast {

Eigen::MatrixXd input_gradient(const LstmNetwork& net, const Eigen::MatrixXd& window,
                               int output_index) {
  if (output_index < 0 || output_index >= net.cfg.horizon)
    throw std::invalid_argument("input_gradient: output index out of range");
  if (window.rows() != net.cfg.n_lags || window.cols() != net.cfg.input_dim)
    throw std::invalid_argument("input_gradient: window shape mismatch");

  Tensor3 X;
  X.resize(1, net.cfg.n_lags, net.cfg.input_dim);
  for (int l = 0; l < X.lags; ++l)
    for (int f = 0; f < X.feats; ++f) X.at(0, l, f) = window(l, f);

  ForwardCache cache;
  forward_batch(net, X, {0}, &cache);
  Eigen::MatrixXd dY = Eigen::MatrixXd::Zero(1, net.cfg.horizon);
  dY(0, output_index) = 1.0;
  std::vector<Eigen::MatrixXd> input_grads;
  backward_batch(net, cache, dY, &input_grads);

  Eigen::MatrixXd grad(net.cfg.n_lags, net.cfg.input_dim);
  for (int l = 0; l < net.cfg.n_lags; ++l) grad.row(l) = input_grads[l].row(0);
  return grad;
}

Eigen::MatrixXd integrated_gradients(const PointGradFn& grad_fn, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& baseline, int m) {
  if (x.rows() != baseline.rows() || x.cols() != baseline.cols())
    throw std::invalid_argument("integrated_gradients: shape mismatch");
  if (m < 1) throw std::invalid_argument("integrated_gradients: m must be >= 1");
  const Eigen::MatrixXd delta = x - baseline;
  Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd grad(x.rows(), x.cols());
  for (int k = 1; k <= m; ++k) {
    const Eigen::MatrixXd point = baseline + (static_cast<double>(k) / m) * delta;
    grad_fn(point, grad);
    grad_sum += grad;
  }
  return delta.cwiseProduct(grad_sum / static_cast<double>(m));
}

Eigen::MatrixXd integrated_gradients(const LstmNetwork& net, const Eigen::MatrixXd& x,
                                     const Eigen::MatrixXd& baseline, int m,
                                     int output_index) {
  if (x.rows() != net.cfg.n_lags || x.cols() != net.cfg.input_dim)
    throw std::invalid_argument("integrated_gradients: window shape mismatch");
  if (x.rows() != baseline.rows() || x.cols() != baseline.cols())
    throw std::invalid_argument("integrated_gradients: shape mismatch");
  if (m < 1) throw std::invalid_argument("integrated_gradients: m must be >= 1");
  if (output_index < 0 || output_index >= net.cfg.horizon)
    throw std::invalid_argument("integrated_gradients: output index out of range");

  const Eigen::MatrixXd delta = x - baseline;
  constexpr int kChunk = 256;
  Eigen::MatrixXd grad_sum = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  ForwardCache cache;
  std::vector<Eigen::MatrixXd> input_grads;
  for (int k0 = 1; k0 <= m; k0 += kChunk) {
    const int count = std::min(kChunk, m - k0 + 1);
    Tensor3 X;
    X.resize(count, net.cfg.n_lags, net.cfg.input_dim);
    std::vector<int> idx(count);
    for (int r = 0; r < count; ++r) {
      idx[r] = r;
      const double w = static_cast<double>(k0 + r) / m;
      for (int l = 0; l < X.lags; ++l)
        for (int f = 0; f < X.feats; ++f)
          X.at(r, l, f) = baseline(l, f) + w * delta(l, f);
    }
    forward_batch(net, X, idx, &cache);
    Eigen::MatrixXd dY = Eigen::MatrixXd::Zero(count, net.cfg.horizon);
    dY.col(output_index).setOnes();
    backward_batch(net, cache, dY, &input_grads);
    for (int l = 0; l < X.lags; ++l)
      grad_sum.row(l) += input_grads[l].colwise().sum();
  }
  return delta.cwiseProduct(grad_sum / static_cast<double>(m));
}

Eigen::VectorXd average_attributions(const std::vector<Eigen::MatrixXd>& maps,
                                     bool magnitude) {
  if (maps.empty()) throw std::invalid_argument("average_attributions: empty sample set");
  const int feats = static_cast<int>(maps[0].cols());
  Eigen::VectorXd total = Eigen::VectorXd::Zero(feats);
  long count = 0;
  for (const auto& map : maps) {
    if (map.cols() != feats)
      throw std::invalid_argument("average_attributions: inconsistent feature count");
    if (magnitude)
      total += map.cwiseAbs().colwise().sum().transpose();
    else
      total += map.colwise().sum().transpose();
    count += map.rows();
  }
  return total / static_cast<double>(count);
}

std::string to_string(BaselineKind kind) {
  return kind == BaselineKind::zeros ? "zeros" : "train_mean";
}

BaselineKind baseline_from_string(const std::string& s) {
  if (s == "zeros") return BaselineKind::zeros;
  if (s == "train_mean") return BaselineKind::train_mean;
  throw ConfigError("unknown baseline kind: '" + s + "'");
}

}  // namespace regimecast
