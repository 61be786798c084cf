#include "regimecast/lstm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "regimecast/common.hpp"

namespace regimecast {

namespace {

Eigen::MatrixXd glorot_uniform(int rows, int cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / (rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

// Orthonormal columns from a seeded Gaussian draw, sign-fixed via R's diagonal.
Eigen::MatrixXd orthogonal_init(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXd g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = dist(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(cols);
  for (int j = 0; j < cols; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

LstmLayerParams init_layer(int input_dim, int hidden, Rng& rng) {
  LstmLayerParams p;
  p.W = glorot_uniform(4 * hidden, input_dim, rng);
  p.U = orthogonal_init(4 * hidden, hidden, rng);
  p.b = Eigen::VectorXd::Zero(4 * hidden);
  p.b.segment(hidden, hidden).setOnes();  // forget gate opens at init
  return p;
}

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return ((-z.array()).exp() + 1.0).inverse().matrix();
}

// One layer over the whole batch sequence; returns h per step.
void layer_forward(const LstmLayerParams& p, const std::vector<Eigen::MatrixXd>& xs,
                   std::vector<Eigen::MatrixXd>& h_seq, LayerCache* cache) {
  const int steps = static_cast<int>(xs.size());
  const int batch = static_cast<int>(xs[0].rows());
  const int hidden = p.hidden();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(batch, hidden);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(batch, hidden);
  h_seq.resize(steps);
  if (cache) {
    cache->x = xs;
    cache->gi.resize(steps);
    cache->gf.resize(steps);
    cache->go.resize(steps);
    cache->gg.resize(steps);
    cache->c.resize(steps);
    cache->tanh_c.resize(steps);
    cache->h.resize(steps);
  }
  for (int t = 0; t < steps; ++t) {
    Eigen::MatrixXd z = xs[t] * p.W.transpose() + h * p.U.transpose();
    z.rowwise() += p.b.transpose();
    const Eigen::MatrixXd gi = sigmoid(z.leftCols(hidden));
    const Eigen::MatrixXd gf = sigmoid(z.middleCols(hidden, hidden));
    const Eigen::MatrixXd go = sigmoid(z.middleCols(2 * hidden, hidden));
    const Eigen::MatrixXd gg = z.rightCols(hidden).array().tanh().matrix();
    c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    const Eigen::MatrixXd tc = c.array().tanh().matrix();
    h = go.cwiseProduct(tc);
    h_seq[t] = h;
    if (cache) {
      cache->gi[t] = gi;
      cache->gf[t] = gf;
      cache->go[t] = go;
      cache->gg[t] = gg;
      cache->c[t] = c;
      cache->tanh_c[t] = tc;
      cache->h[t] = h;
    }
  }
}

// BPTT through one layer. dh_in[t] is the gradient arriving at h_t from
// above (empty matrices are treated as zero). Returns dx per step when
// requested.
void layer_backward(const LstmLayerParams& p, const LayerCache& cache,
                    const std::vector<Eigen::MatrixXd>& dh_in, LstmLayerParams& g,
                    std::vector<Eigen::MatrixXd>* dx_out) {
  const int steps = static_cast<int>(cache.h.size());
  const int batch = static_cast<int>(cache.h[0].rows());
  const int hidden = p.hidden();
  Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(batch, hidden);
  Eigen::MatrixXd dc_rec = Eigen::MatrixXd::Zero(batch, hidden);
  Eigen::MatrixXd dz(batch, 4 * hidden);
  if (dx_out) dx_out->assign(steps, Eigen::MatrixXd());
  for (int t = steps - 1; t >= 0; --t) {
    Eigen::MatrixXd dh = dh_rec;
    if (t < static_cast<int>(dh_in.size()) && dh_in[t].size() > 0) dh += dh_in[t];
    const Eigen::MatrixXd& tc = cache.tanh_c[t];
    const Eigen::MatrixXd dgo = dh.cwiseProduct(tc);
    Eigen::MatrixXd dc =
        dc_rec + dh.cwiseProduct(cache.go[t])
                     .cwiseProduct((1.0 - tc.array().square()).matrix());
    const Eigen::MatrixXd dgi = dc.cwiseProduct(cache.gg[t]);
    const Eigen::MatrixXd dgg = dc.cwiseProduct(cache.gi[t]);
    Eigen::MatrixXd dgf;
    if (t > 0)
      dgf = dc.cwiseProduct(cache.c[t - 1]);
    else
      dgf = Eigen::MatrixXd::Zero(batch, hidden);

    dz.leftCols(hidden) =
        dgi.cwiseProduct(cache.gi[t]).cwiseProduct((1.0 - cache.gi[t].array()).matrix());
    dz.middleCols(hidden, hidden) =
        dgf.cwiseProduct(cache.gf[t]).cwiseProduct((1.0 - cache.gf[t].array()).matrix());
    dz.middleCols(2 * hidden, hidden) =
        dgo.cwiseProduct(cache.go[t]).cwiseProduct((1.0 - cache.go[t].array()).matrix());
    dz.rightCols(hidden) = dgg.cwiseProduct((1.0 - cache.gg[t].array().square()).matrix());

    g.W.noalias() += dz.transpose() * cache.x[t];
    if (t > 0) g.U.noalias() += dz.transpose() * cache.h[t - 1];
    g.b += dz.colwise().sum().transpose();
    if (dx_out) (*dx_out)[t] = dz * p.W;
    dh_rec.noalias() = dz * p.U;
    dc_rec = dc.cwiseProduct(cache.gf[t]);
  }
}

void gather_steps(const Tensor3& X, const std::vector<int>& idx,
                  std::vector<Eigen::MatrixXd>& xs) {
  const int batch = static_cast<int>(idx.size());
  xs.resize(X.lags);
  for (int t = 0; t < X.lags; ++t) {
    xs[t].resize(batch, X.feats);
    for (int b = 0; b < batch; ++b)
      for (int f = 0; f < X.feats; ++f) xs[t](b, f) = X.at(idx[b], t, f);
  }
}

}  // namespace

LstmNetwork init_network(const NetConfig& cfg, std::uint64_t seed) {
  if (cfg.input_dim < 1 || cfg.n_lags < 1 || cfg.horizon < 1 || cfg.hidden1 < 1 ||
      cfg.hidden2 < 1 || cfg.dense < 1)
    throw std::invalid_argument("init_network: invalid architecture");
  Rng rng(seed);
  LstmNetwork net;
  net.cfg = cfg;
  net.seed = seed;
  net.layer1 = init_layer(cfg.input_dim, cfg.hidden1, rng);
  net.layer2 = init_layer(cfg.hidden1, cfg.hidden2, rng);
  net.dense1.W = glorot_uniform(cfg.dense, cfg.hidden2, rng);
  net.dense1.b = Eigen::VectorXd::Zero(cfg.dense);
  net.head.W = glorot_uniform(cfg.horizon, cfg.dense, rng);
  net.head.b = Eigen::VectorXd::Zero(cfg.horizon);
  return net;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> cell_forward(const Eigen::VectorXd& x,
                                                         const Eigen::VectorXd& h_prev,
                                                         const Eigen::VectorXd& c_prev,
                                                         const LstmLayerParams& params) {
  const int hidden = params.hidden();
  if (x.size() != params.input() || h_prev.size() != hidden || c_prev.size() != hidden)
    throw std::invalid_argument("cell_forward: shape mismatch");
  if (!x.allFinite() || !h_prev.allFinite() || !c_prev.allFinite())
    throw DataError("cell_forward: non-finite input");
  const Eigen::VectorXd z = params.W * x + params.U * h_prev + params.b;
  const auto seg = [&](int block) { return z.segment(block * hidden, hidden).array(); };
  const Eigen::ArrayXd gi = 1.0 / (1.0 + (-seg(0)).exp());
  const Eigen::ArrayXd gf = 1.0 / (1.0 + (-seg(1)).exp());
  const Eigen::ArrayXd go = 1.0 / (1.0 + (-seg(2)).exp());
  const Eigen::ArrayXd gg = seg(3).tanh();
  const Eigen::ArrayXd c = gf * c_prev.array() + gi * gg;
  const Eigen::ArrayXd h = go * c.tanh();
  return {h.matrix(), c.matrix()};
}

Eigen::MatrixXd forward_batch(const LstmNetwork& net, const Tensor3& X,
                              const std::vector<int>& idx, ForwardCache* cache) {
  if (X.feats != net.cfg.input_dim || X.lags != net.cfg.n_lags)
    throw std::invalid_argument("forward: tensor shape does not match network");
  if (idx.empty()) throw std::invalid_argument("forward: empty batch");
  std::vector<Eigen::MatrixXd> xs;
  gather_steps(X, idx, xs);

  std::vector<Eigen::MatrixXd> h1, h2;
  layer_forward(net.layer1, xs, h1, cache ? &cache->l1 : nullptr);
  layer_forward(net.layer2, h1, h2, cache ? &cache->l2 : nullptr);

  const Eigen::MatrixXd& last = h2.back();
  Eigen::MatrixXd a = last * net.dense1.W.transpose();
  a.rowwise() += net.dense1.b.transpose();
  Eigen::MatrixXd pred = a * net.head.W.transpose();
  pred.rowwise() += net.head.b.transpose();

  if (cache) {
    cache->idx = idx;
    cache->dense_in = last;
    cache->dense_out = a;
    cache->pred = pred;
  }
  return pred;
}

Eigen::MatrixXd predict(const LstmNetwork& net, const Tensor3& X) {
  constexpr int kChunk = 512;
  Eigen::MatrixXd out(X.n, net.cfg.horizon);
  for (int start = 0; start < X.n; start += kChunk) {
    const int count = std::min(kChunk, X.n - start);
    std::vector<int> idx(count);
    for (int i = 0; i < count; ++i) idx[i] = start + i;
    out.middleRows(start, count) = forward_batch(net, X, idx, nullptr);
  }
  return out;
}

double net_output(const LstmNetwork& net, const Eigen::MatrixXd& window, int output_index) {
  if (output_index < 0 || output_index >= net.cfg.horizon)
    throw std::invalid_argument("output index out of range");
  Tensor3 X;
  X.resize(1, static_cast<int>(window.rows()), static_cast<int>(window.cols()));
  for (int l = 0; l < X.lags; ++l)
    for (int f = 0; f < X.feats; ++f) X.at(0, l, f) = window(l, f);
  return forward_batch(net, X, {0}, nullptr)(0, output_index);
}

NetGrads zero_grads(const LstmNetwork& net) {
  NetGrads g;
  g.layer1.W = Eigen::MatrixXd::Zero(net.layer1.W.rows(), net.layer1.W.cols());
  g.layer1.U = Eigen::MatrixXd::Zero(net.layer1.U.rows(), net.layer1.U.cols());
  g.layer1.b = Eigen::VectorXd::Zero(net.layer1.b.size());
  g.layer2.W = Eigen::MatrixXd::Zero(net.layer2.W.rows(), net.layer2.W.cols());
  g.layer2.U = Eigen::MatrixXd::Zero(net.layer2.U.rows(), net.layer2.U.cols());
  g.layer2.b = Eigen::VectorXd::Zero(net.layer2.b.size());
  g.dense1.W = Eigen::MatrixXd::Zero(net.dense1.W.rows(), net.dense1.W.cols());
  g.dense1.b = Eigen::VectorXd::Zero(net.dense1.b.size());
  g.head.W = Eigen::MatrixXd::Zero(net.head.W.rows(), net.head.W.cols());
  g.head.b = Eigen::VectorXd::Zero(net.head.b.size());
  return g;
}

NetGrads backward_batch(const LstmNetwork& net, const ForwardCache& cache,
                        const Eigen::MatrixXd& dY,
                        std::vector<Eigen::MatrixXd>* input_grads) {
  if (dY.rows() != cache.pred.rows() || dY.cols() != cache.pred.cols())
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  NetGrads g = zero_grads(net);

  g.head.W.noalias() = dY.transpose() * cache.dense_out;
  g.head.b = dY.colwise().sum().transpose();
  const Eigen::MatrixXd da = dY * net.head.W;

  g.dense1.W.noalias() = da.transpose() * cache.dense_in;
  g.dense1.b = da.colwise().sum().transpose();
  const Eigen::MatrixXd dlast = da * net.dense1.W;

  // Layer2 receives gradient only at its final step.
  const int steps = net.cfg.n_lags;
  std::vector<Eigen::MatrixXd> dh2(steps);
  dh2[steps - 1] = dlast;
  std::vector<Eigen::MatrixXd> dh1;
  layer_backward(net.layer2, cache.l2, dh2, g.layer2, &dh1);
  layer_backward(net.layer1, cache.l1, dh1, g.layer1, input_grads);
  return g;
}

double global_grad_norm(const NetGrads& grads) {
  double total = 0;
  for (const auto& [ptr, size] : grad_blocks(grads))
    total += Eigen::Map<const Eigen::VectorXd>(ptr, size).squaredNorm();
  return std::sqrt(total);
}

void clip_grads(NetGrads& grads, double max_norm) {
  if (max_norm <= 0) return;
  const double norm = global_grad_norm(grads);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& [ptr, size] : grad_blocks(grads))
    Eigen::Map<Eigen::VectorXd>(ptr, size) *= scale;
}

namespace {

template <typename Net, typename Ptr>
std::vector<std::pair<Ptr, long>> blocks_of(Net& net) {
  return {
      {net.layer1.W.data(), net.layer1.W.size()}, {net.layer1.U.data(), net.layer1.U.size()},
      {net.layer1.b.data(), net.layer1.b.size()}, {net.layer2.W.data(), net.layer2.W.size()},
      {net.layer2.U.data(), net.layer2.U.size()}, {net.layer2.b.data(), net.layer2.b.size()},
      {net.dense1.W.data(), net.dense1.W.size()}, {net.dense1.b.data(), net.dense1.b.size()},
      {net.head.W.data(), net.head.W.size()},     {net.head.b.data(), net.head.b.size()},
  };
}

}  // namespace

std::vector<std::pair<double*, long>> param_blocks(LstmNetwork& net) {
  return blocks_of<LstmNetwork, double*>(net);
}
std::vector<std::pair<const double*, long>> param_blocks(const LstmNetwork& net) {
  return blocks_of<const LstmNetwork, const double*>(net);
}
std::vector<std::pair<double*, long>> grad_blocks(NetGrads& grads) {
  return blocks_of<NetGrads, double*>(grads);
}
std::vector<std::pair<const double*, long>> grad_blocks(const NetGrads& grads) {
  return blocks_of<const NetGrads, const double*>(grads);
}

AdamState init_adam(const LstmNetwork& net) {
  AdamState state;
  for (const auto& [ptr, size] : param_blocks(net)) {
    (void)ptr;
    state.m.push_back(Eigen::VectorXd::Zero(size));
    state.v.push_back(Eigen::VectorXd::Zero(size));
  }
  return state;
}

void adam_step(LstmNetwork& net, const NetGrads& grads, AdamState& state, double lr,
               double beta1, double beta2, double eps) {
  auto params = param_blocks(net);
  auto gblocks = grad_blocks(grads);
  if (state.m.size() != params.size()) throw std::invalid_argument("adam state mismatch");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::Map<Eigen::VectorXd> p(params[i].first, params[i].second);
    Eigen::Map<const Eigen::VectorXd> g(gblocks[i].first, gblocks[i].second);
    if (!g.allFinite()) throw NumericError("adam_step: non-finite gradient");
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g.matrix();
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g.array().square().matrix();
    p.array() -=
        lr * (state.m[i].array() / bc1) / ((state.v[i].array() / bc2).sqrt() + eps);
  }
}

std::uint64_t weight_checksum(const LstmNetwork& net) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& [ptr, size] : param_blocks(net))
    h = fnv1a(ptr, static_cast<std::size_t>(size) * sizeof(double), h);
  return h;
}

}  // namespace regimecast
