#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "regimecast/pipeline.hpp"

namespace regimecast {

// Stacked gate parameters, row blocks ordered (i, f, o, g).
struct LstmLayerParams {
  Eigen::MatrixXd W;  // 4H x D_in
  Eigen::MatrixXd U;  // 4H x H
  Eigen::VectorXd b;  // 4H

  int hidden() const { return static_cast<int>(U.cols()); }
  int input() const { return static_cast<int>(W.cols()); }
};

struct DenseParams {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;  // out
};

struct NetConfig {
  int input_dim = 0;
  int n_lags = 0;
  int horizon = 1;
  int hidden1 = 50;
  int hidden2 = 50;
  int dense = 25;
};

struct LstmNetwork {
  NetConfig cfg;
  LstmLayerParams layer1;  // sequence to sequence
  LstmLayerParams layer2;  // sequence to last state
  DenseParams dense1;      // linear
  DenseParams head;        // linear, width = horizon
  ScalerParams scaler;
  std::uint64_t seed = 0;
};

// Glorot-uniform input/dense weights, orthogonalized recurrent weights,
// forget-gate bias 1. Deterministic per seed.
LstmNetwork init_network(const NetConfig& cfg, std::uint64_t seed);

// One cell step per the stacked affine map: (i,f,o) sigmoid, g tanh,
// c = f.c_prev + i.g, h = o.tanh(c).
std::pair<Eigen::VectorXd, Eigen::VectorXd> cell_forward(const Eigen::VectorXd& x,
                                                         const Eigen::VectorXd& h_prev,
                                                         const Eigen::VectorXd& c_prev,
                                                         const LstmLayerParams& params);

struct LayerCache {
  std::vector<Eigen::MatrixXd> x, gi, gf, go, gg, c, tanh_c, h;  // per step, B x *
};

struct ForwardCache {
  std::vector<int> idx;  // tensor sample indices of the batch rows
  LayerCache l1, l2;
  Eigen::MatrixXd dense_in;   // B x H2 (layer2 last state)
  Eigen::MatrixXd dense_out;  // B x dense
  Eigen::MatrixXd pred;       // B x horizon
};

// Batched forward over tensor samples `idx`; fills `cache` when given.
Eigen::MatrixXd forward_batch(const LstmNetwork& net, const Tensor3& X,
                              const std::vector<int>& idx, ForwardCache* cache);

// Full-tensor prediction, chunked internally.
Eigen::MatrixXd predict(const LstmNetwork& net, const Tensor3& X);

// Scalar output F_k for a single input window (lags x feats).
double net_output(const LstmNetwork& net, const Eigen::MatrixXd& window, int output_index);

struct NetGrads {
  LstmLayerParams layer1, layer2;
  DenseParams dense1, head;
};

NetGrads zero_grads(const LstmNetwork& net);

// Reverse-mode pass for an arbitrary upstream gradient dY (B x horizon).
// Optionally accumulates gradients w.r.t. the batch inputs (per step, B x D).
NetGrads backward_batch(const LstmNetwork& net, const ForwardCache& cache,
                        const Eigen::MatrixXd& dY,
                        std::vector<Eigen::MatrixXd>* input_grads = nullptr);

double global_grad_norm(const NetGrads& grads);
void clip_grads(NetGrads& grads, double max_norm);

struct AdamState {
  std::vector<Eigen::VectorXd> m, v;
  long t = 0;
};

AdamState init_adam(const LstmNetwork& net);
void adam_step(LstmNetwork& net, const NetGrads& grads, AdamState& state, double lr,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

std::uint64_t weight_checksum(const LstmNetwork& net);

// Parameter blocks in a fixed order; grads expose the same layout.
std::vector<std::pair<double*, long>> param_blocks(LstmNetwork& net);
std::vector<std::pair<const double*, long>> param_blocks(const LstmNetwork& net);
std::vector<std::pair<const double*, long>> grad_blocks(const NetGrads& grads);
std::vector<std::pair<double*, long>> grad_blocks(NetGrads& grads);

}  // namespace regimecast
