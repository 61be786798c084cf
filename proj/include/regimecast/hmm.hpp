#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace regimecast {

// K-state HMM with diagonal-covariance Gaussian emissions.
struct GaussianHmm {
  int n_states = 0;
  Eigen::VectorXd init_prob;   // K
  Eigen::MatrixXd trans;       // K x K, row-stochastic
  Eigen::MatrixXd means;       // K x D
  Eigen::MatrixXd variances;   // K x D
  std::vector<std::string> feature_names;
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(means.cols()); }
  void validate() const;  // simplex/row-sum invariants within 1e-10
};

struct Posteriors {
  Eigen::MatrixXd gamma;               // N x K state posteriors
  std::vector<Eigen::MatrixXd> xi;     // N-1 entries of K x K pair posteriors
  double log_likelihood = 0;
};

// Scaled forward-backward; robust for long sequences.
Posteriors forward_backward(const GaussianHmm& model, const Eigen::MatrixXd& obs);

struct EmOptions {
  int max_iter = 200;
  double tol = 1e-6;
  double prior_pseudocount = 1.0;  // Dirichlet smoothing on pi and A updates
  double variance_floor = 1e-4;
};

struct EmFit {
  GaussianHmm model;
  std::vector<double> loglik_trace;  // one entry per EM iteration
};

// Deterministic initialization: farthest-point mean seeding from `seed`,
// per-feature sample variances, uniform pi and A.
GaussianHmm init_hmm(const Eigen::MatrixXd& obs, int n_states, std::uint64_t seed);

EmFit fit_em(const Eigen::MatrixXd& obs, int n_states, std::uint64_t seed,
             const EmOptions& options = {});
EmFit fit_em_from(GaussianHmm initial, const Eigen::MatrixXd& obs,
                  const EmOptions& options = {});

struct DecodedPath {
  std::vector<int> states;
  double log_likelihood = 0;  // joint log-prob of the decoded path
  int n_states = 0;
};

// Max-probability state sequence; ties break toward the lower state index.
DecodedPath viterbi(const GaussianHmm& model, const Eigen::MatrixXd& obs);

// Solves pi A = pi with sum(pi) = 1, pi >= 0.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& trans);

// Canonical order: descending stationary probability, ties by first-feature
// mean ascending. order[new_state] = old_state.
std::vector<int> canonical_state_order(const GaussianHmm& model);
GaussianHmm permute_states(const GaussianHmm& model, const std::vector<int>& order);
GaussianHmm canonicalize(const GaussianHmm& model);

// Flat JSON document {K, pi, A, means, variances, feature_names, seed};
// doubles round-trip bit-faithfully.
std::string hmm_to_json(const GaussianHmm& model);
GaussianHmm hmm_from_json(const std::string& text);
void save_hmm(const GaussianHmm& model, const std::string& path);
GaussianHmm load_hmm(const std::string& path);

}  // namespace regimecast
