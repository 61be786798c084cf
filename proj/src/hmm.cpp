#include "regimecast/hmm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "regimecast/common.hpp"
#include "regimecast/json_util.hpp"

namespace regimecast {

namespace {

constexpr double kLogFloor = 1e-300;

double safe_log(double x) { return std::log(std::max(x, kLogFloor)); }

void check_obs(const GaussianHmm& model, const Eigen::MatrixXd& obs) {
  if (obs.cols() != model.dim())
    throw std::invalid_argument("observation dimension " + std::to_string(obs.cols()) +
                                " does not match model dimension " +
                                std::to_string(model.dim()));
  if (!obs.allFinite()) throw DataError("non-finite observation");
}

// log N(o_t; mu_k, diag(var_k)) for all t, k.
Eigen::MatrixXd emission_logprob(const GaussianHmm& model, const Eigen::MatrixXd& obs) {
  const int n = static_cast<int>(obs.rows());
  const int k = model.n_states;
  const int d = model.dim();
  Eigen::MatrixXd logb(n, k);
  for (int s = 0; s < k; ++s) {
    double log_norm = 0;
    for (int j = 0; j < d; ++j)
      log_norm += std::log(2.0 * M_PI * model.variances(s, j));
    log_norm *= -0.5;
    const Eigen::RowVectorXd mu = model.means.row(s);
    const Eigen::RowVectorXd inv_var = model.variances.row(s).cwiseInverse();
    for (int t = 0; t < n; ++t) {
      const Eigen::RowVectorXd diff = obs.row(t) - mu;
      logb(t, s) = log_norm - 0.5 * diff.cwiseProduct(diff).dot(inv_var);
    }
  }
  return logb;
}

}  // namespace

void GaussianHmm::validate() const {
  if (n_states < 1) throw std::invalid_argument("model needs at least one state");
  if (std::abs(init_prob.sum() - 1.0) > 1e-10)
    throw NumericError("initial probabilities do not sum to 1");
  if (init_prob.minCoeff() < 0) throw NumericError("negative initial probability");
  for (int i = 0; i < n_states; ++i) {
    if (std::abs(trans.row(i).sum() - 1.0) > 1e-10)
      throw NumericError("transition row " + std::to_string(i) + " does not sum to 1");
    if (trans.row(i).minCoeff() < 0) throw NumericError("negative transition probability");
  }
  if (variances.minCoeff() <= 0) throw NumericError("non-positive emission variance");
}

Posteriors forward_backward(const GaussianHmm& model, const Eigen::MatrixXd& obs) {
  check_obs(model, obs);
  const int n = static_cast<int>(obs.rows());
  const int k = model.n_states;
  if (n < 2) throw std::invalid_argument("forward_backward needs at least 2 observations");

  const Eigen::MatrixXd logb = emission_logprob(model, obs);
  // Shift emissions per step so exp() stays in range regardless of D.
  Eigen::VectorXd shift(n);
  Eigen::MatrixXd b(n, k);
  for (int t = 0; t < n; ++t) {
    shift(t) = logb.row(t).maxCoeff();
    b.row(t) = (logb.row(t).array() - shift(t)).exp();
  }

  Eigen::MatrixXd alpha(n, k);
  Eigen::VectorXd scale(n);
  double loglik = 0;
  alpha.row(0) = model.init_prob.transpose().cwiseProduct(b.row(0));
  scale(0) = alpha.row(0).sum();
  if (scale(0) <= 0) throw NumericError("forward_backward: zero forward mass at t=0");
  alpha.row(0) /= scale(0);
  loglik += std::log(scale(0)) + shift(0);
  for (int t = 1; t < n; ++t) {
    alpha.row(t) = (alpha.row(t - 1) * model.trans).cwiseProduct(b.row(t));
    scale(t) = alpha.row(t).sum();
    if (scale(t) <= 0)
      throw NumericError("forward_backward: zero forward mass at t=" + std::to_string(t));
    alpha.row(t) /= scale(t);
    loglik += std::log(scale(t)) + shift(t);
  }

  Eigen::MatrixXd beta(n, k);
  beta.row(n - 1).setOnes();
  for (int t = n - 2; t >= 0; --t)
    beta.row(t) =
        (model.trans * beta.row(t + 1).cwiseProduct(b.row(t + 1)).transpose()).transpose() /
        scale(t + 1);

  Posteriors post;
  post.log_likelihood = loglik;
  post.gamma = alpha.cwiseProduct(beta);
  post.xi.reserve(n - 1);
  for (int t = 0; t + 1 < n; ++t) {
    Eigen::MatrixXd x(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        x(i, j) = alpha(t, i) * model.trans(i, j) * b(t + 1, j) * beta(t + 1, j) / scale(t + 1);
    post.xi.push_back(std::move(x));
  }
  return post;
}

GaussianHmm init_hmm(const Eigen::MatrixXd& obs, int n_states, std::uint64_t seed) {
  const int n = static_cast<int>(obs.rows());
  const int d = static_cast<int>(obs.cols());
  if (n_states < 1) throw std::invalid_argument("n_states must be >= 1");
  if (n <= n_states) throw DataError("need more observations than states");
  if (!obs.allFinite()) throw DataError("non-finite observation");

  const Eigen::RowVectorXd col_mean = obs.colwise().mean();
  Eigen::RowVectorXd col_var(d);
  for (int j = 0; j < d; ++j)
    col_var(j) = (obs.col(j).array() - col_mean(j)).square().sum() / std::max(1, n - 1);
  if (col_var.maxCoeff() <= 0.0)
    throw NumericError("degenerate data: all observation rows identical");

  // Farthest-point seeding: first center drawn from `seed`, the rest maximize
  // the distance to the chosen set. Ties go to the lower row index.
  Rng rng(seed);
  std::vector<int> centers;
  centers.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
  Eigen::VectorXd min_dist(n);
  for (int t = 0; t < n; ++t)
    min_dist(t) = (obs.row(t) - obs.row(centers[0])).squaredNorm();
  while (static_cast<int>(centers.size()) < n_states) {
    int best = 0;
    for (int t = 1; t < n; ++t)
      if (min_dist(t) > min_dist(best)) best = t;
    centers.push_back(best);
    for (int t = 0; t < n; ++t)
      min_dist(t) = std::min(min_dist(t), (obs.row(t) - obs.row(best)).squaredNorm());
  }

  GaussianHmm model;
  model.n_states = n_states;
  model.seed = seed;
  model.init_prob = Eigen::VectorXd::Constant(n_states, 1.0 / n_states);
  model.trans = Eigen::MatrixXd::Constant(n_states, n_states, 1.0 / n_states);
  model.means.resize(n_states, d);
  for (int s = 0; s < n_states; ++s) model.means.row(s) = obs.row(centers[s]);
  model.variances = col_var.replicate(n_states, 1).cwiseMax(1e-4);
  return model;
}

EmFit fit_em_from(GaussianHmm initial, const Eigen::MatrixXd& obs, const EmOptions& options) {
  const int n = static_cast<int>(obs.rows());
  const int k = initial.n_states;
  const int d = static_cast<int>(obs.cols());
  if (n <= k) throw DataError("need more observations than states");
  check_obs(initial, obs);

  EmFit fit;
  fit.model = std::move(initial);
  const double c = options.prior_pseudocount;

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const Posteriors post = forward_backward(fit.model, obs);
    fit.loglik_trace.push_back(post.log_likelihood);

    // M-step. Dirichlet pseudocounts smooth pi and the transition rows.
    GaussianHmm& m = fit.model;
    m.init_prob = ((post.gamma.row(0).transpose().array() + c) / (1.0 + k * c)).matrix();

    Eigen::MatrixXd xi_sum = Eigen::MatrixXd::Zero(k, k);
    for (const auto& x : post.xi) xi_sum += x;
    for (int i = 0; i < k; ++i) {
      const double row_total = xi_sum.row(i).sum() + k * c;
      m.trans.row(i) = ((xi_sum.row(i).array() + c) / row_total).matrix();
    }

    const Eigen::VectorXd occupancy = post.gamma.colwise().sum().transpose();
    for (int s = 0; s < k; ++s) {
      const double w = occupancy(s);
      if (w <= 0) throw NumericError("EM degenerate: state " + std::to_string(s) +
                                     " lost all posterior mass");
      m.means.row(s) = (post.gamma.col(s).transpose() * obs) / w;
      Eigen::RowVectorXd var = Eigen::RowVectorXd::Zero(d);
      for (int t = 0; t < n; ++t) {
        const Eigen::RowVectorXd diff = obs.row(t) - m.means.row(s);
        var += post.gamma(t, s) * diff.cwiseProduct(diff);
      }
      m.variances.row(s) = (var / w).cwiseMax(options.variance_floor);
    }

    if (fit.loglik_trace.size() >= 2) {
      const double improvement =
          fit.loglik_trace[fit.loglik_trace.size() - 1] - fit.loglik_trace[fit.loglik_trace.size() - 2];
      if (improvement < options.tol) break;
    }
  }
  return fit;
}

EmFit fit_em(const Eigen::MatrixXd& obs, int n_states, std::uint64_t seed,
             const EmOptions& options) {
  EmFit fit = fit_em_from(init_hmm(obs, n_states, seed), obs, options);
  fit.model = canonicalize(fit.model);
  fit.model.seed = seed;
  return fit;
}

DecodedPath viterbi(const GaussianHmm& model, const Eigen::MatrixXd& obs) {
  check_obs(model, obs);
  const int n = static_cast<int>(obs.rows());
  const int k = model.n_states;
  const Eigen::MatrixXd logb = emission_logprob(model, obs);

  Eigen::MatrixXd log_trans(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) log_trans(i, j) = safe_log(model.trans(i, j));

  Eigen::MatrixXd score(n, k);
  Eigen::MatrixXi back(n, k);
  for (int s = 0; s < k; ++s) score(0, s) = safe_log(model.init_prob(s)) + logb(0, s);
  for (int t = 1; t < n; ++t) {
    for (int j = 0; j < k; ++j) {
      int arg = 0;
      double best = score(t - 1, 0) + log_trans(0, j);
      for (int i = 1; i < k; ++i) {
        const double cand = score(t - 1, i) + log_trans(i, j);
        if (cand > best) {  // strict: ties keep the lower index
          best = cand;
          arg = i;
        }
      }
      score(t, j) = best + logb(t, j);
      back(t, j) = arg;
    }
  }

  DecodedPath path;
  path.n_states = k;
  path.states.resize(n);
  int last = 0;
  for (int s = 1; s < k; ++s)
    if (score(n - 1, s) > score(n - 1, last)) last = s;
  path.log_likelihood = score(n - 1, last);
  path.states[n - 1] = last;
  for (int t = n - 2; t >= 0; --t) path.states[t] = back(t + 1, path.states[t + 1]);
  return path;
}

Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& trans) {
  const int k = static_cast<int>(trans.rows());
  if (trans.cols() != k) throw std::invalid_argument("transition matrix must be square");
  for (int i = 0; i < k; ++i) {
    if (std::abs(trans.row(i).sum() - 1.0) > 1e-8 || trans.row(i).minCoeff() < -1e-12)
      throw NumericError("stationary_distribution: matrix is not row-stochastic");
  }
  if (k == 1) return Eigen::VectorXd::Ones(1);

  // (A^T - I) pi = 0 with the normalization row appended.
  Eigen::MatrixXd m = trans.transpose() - Eigen::MatrixXd::Identity(k, k);
  m.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  Eigen::VectorXd pi = m.colPivHouseholderQr().solve(rhs);

  const double residual = ((trans.transpose() * pi) - pi).cwiseAbs().maxCoeff();
  if (!pi.allFinite() || pi.minCoeff() < -1e-9 || residual > 1e-9) {
    // Reducible or ill-conditioned chain: fall back to the eigenvector of the
    // eigenvalue closest to 1.
    Eigen::EigenSolver<Eigen::MatrixXd> es(trans.transpose());
    int best = 0;
    for (int i = 1; i < k; ++i)
      if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
    pi = es.eigenvectors().col(best).real();
    if (pi.sum() < 0) pi = -pi;
    pi = pi.cwiseMax(0.0);
  }
  const double total = pi.sum();
  if (total <= 0) throw NumericError("stationary_distribution: no valid fixed point");
  return pi / total;
}

std::vector<int> canonical_state_order(const GaussianHmm& model) {
  const Eigen::VectorXd pi = stationary_distribution(model.trans);
  std::vector<int> order(model.n_states);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pi(a) != pi(b)) return pi(a) > pi(b);
    if (model.means(a, 0) != model.means(b, 0)) return model.means(a, 0) < model.means(b, 0);
    return a < b;
  });
  return order;
}

GaussianHmm permute_states(const GaussianHmm& model, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != model.n_states)
    throw std::invalid_argument("permutation size mismatch");
  GaussianHmm out = model;
  for (int s = 0; s < model.n_states; ++s) {
    out.init_prob(s) = model.init_prob(order[s]);
    out.means.row(s) = model.means.row(order[s]);
    out.variances.row(s) = model.variances.row(order[s]);
    for (int j = 0; j < model.n_states; ++j)
      out.trans(s, j) = model.trans(order[s], order[j]);
  }
  return out;
}

GaussianHmm canonicalize(const GaussianHmm& model) {
  return permute_states(model, canonical_state_order(model));
}

std::string hmm_to_json(const GaussianHmm& model) {
  nlohmann::json j;
  j["K"] = model.n_states;
  j["pi"] = std::vector<double>(model.init_prob.data(),
                                model.init_prob.data() + model.init_prob.size());
  j["A"] = matrix_to_json(model.trans);
  j["means"] = matrix_to_json(model.means);
  j["variances"] = matrix_to_json(model.variances);
  j["feature_names"] = model.feature_names;
  j["seed"] = model.seed;
  return j.dump(2) + "\n";
}

GaussianHmm hmm_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GaussianHmm model;
  model.n_states = j.at("K").get<int>();
  const auto pi = j.at("pi").get<std::vector<double>>();
  model.init_prob = Eigen::Map<const Eigen::VectorXd>(pi.data(), pi.size());
  model.trans = matrix_from_json(j.at("A"));
  model.means = matrix_from_json(j.at("means"));
  model.variances = matrix_from_json(j.at("variances"));
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.validate();
  return model;
}

void save_hmm(const GaussianHmm& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << hmm_to_json(model);
}

GaussianHmm load_hmm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hmm_from_json(text);
}

}  // namespace regimecast
