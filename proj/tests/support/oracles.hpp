#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <vector>

#include "regimecast/hmm.hpp"

namespace regimecast::testsupport {

// Joint log-probability of one state sequence, accumulated step by step in
// the same order the Viterbi recursion uses.
inline double joint_logprob(const GaussianHmm& m, const Eigen::MatrixXd& obs,
                            const std::vector<int>& seq) {
  auto logn = [&](int t, int s) {
    double lp = 0;
    for (int j = 0; j < m.dim(); ++j) {
      const double diff = obs(t, j) - m.means(s, j);
      lp += -0.5 * (std::log(2.0 * M_PI * m.variances(s, j)) +
                    diff * diff / m.variances(s, j));
    }
    return lp;
  };
  auto slog = [](double x) { return std::log(std::max(x, 1e-300)); };
  double lp = slog(m.init_prob(seq[0])) + logn(0, seq[0]);
  for (std::size_t t = 1; t < seq.size(); ++t) {
    lp = lp + slog(m.trans(seq[t - 1], seq[t]));
    lp = lp + logn(static_cast<int>(t), seq[t]);
  }
  return lp;
}

// Visits every K^T state sequence.
inline void for_each_sequence(int n_states, int length,
                              const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> seq(length, 0);
  while (true) {
    fn(seq);
    int pos = length - 1;
    while (pos >= 0 && seq[pos] == n_states - 1) seq[pos--] = 0;
    if (pos < 0) break;
    seq[pos] += 1;
  }
}

inline double logsumexp(const std::vector<double>& xs) {
  double m = xs[0];
  for (double x : xs) m = std::max(m, x);
  double acc = 0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

struct EnumeratedPosterior {
  Eigen::MatrixXd gamma;
  double log_likelihood = 0;
  std::vector<int> best_path;
  double best_logprob = -1e300;
};

// Exhaustive-enumeration reference for forward_backward and viterbi.
inline EnumeratedPosterior enumerate_posterior(const GaussianHmm& m,
                                               const Eigen::MatrixXd& obs) {
  const int n = static_cast<int>(obs.rows());
  EnumeratedPosterior out;
  std::vector<double> all;
  std::vector<std::vector<std::vector<double>>> per_state(
      n, std::vector<std::vector<double>>(m.n_states));
  for_each_sequence(m.n_states, n, [&](const std::vector<int>& seq) {
    const double lp = joint_logprob(m, obs, seq);
    all.push_back(lp);
    for (int t = 0; t < n; ++t) per_state[t][seq[t]].push_back(lp);
    if (lp > out.best_logprob) {
      out.best_logprob = lp;
      out.best_path = seq;
    }
  });
  out.log_likelihood = logsumexp(all);
  out.gamma.resize(n, m.n_states);
  for (int t = 0; t < n; ++t)
    for (int s = 0; s < m.n_states; ++s)
      out.gamma(t, s) = per_state[t][s].empty()
                            ? 0.0
                            : std::exp(logsumexp(per_state[t][s]) - out.log_likelihood);
  return out;
}

// Central finite differences over a scalar function of one mutable value.
inline double central_difference(const std::function<double()>& f, double& x,
                                 double eps = 1e-5) {
  const double saved = x;
  x = saved + eps;
  const double up = f();
  x = saved - eps;
  const double down = f();
  x = saved;
  return (up - down) / (2.0 * eps);
}

}  // namespace regimecast::testsupport
