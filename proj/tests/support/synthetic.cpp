#include "support/synthetic.hpp"

#include <cmath>
#include <random>

#include "regimecast/dates.hpp"

namespace regimecast::testsupport {

Eigen::MatrixXd sample_hmm(const GaussianHmm& model, int n, Rng& rng,
                           std::vector<int>* states_out) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  const int d = model.dim();
  Eigen::MatrixXd obs(n, d);
  if (states_out) states_out->resize(n);

  auto draw_state = [&](const Eigen::VectorXd& probs) {
    double u = unif(rng);
    for (int s = 0; s + 1 < probs.size(); ++s) {
      u -= probs(s);
      if (u < 0) return s;
    }
    return static_cast<int>(probs.size()) - 1;
  };

  int state = draw_state(model.init_prob);
  for (int t = 0; t < n; ++t) {
    if (t > 0) state = draw_state(model.trans.row(state).transpose());
    if (states_out) (*states_out)[t] = state;
    for (int j = 0; j < d; ++j)
      obs(t, j) = model.means(state, j) + std::sqrt(model.variances(state, j)) * norm(rng);
  }
  return obs;
}

GaussianHmm two_state_model(int dim) {
  GaussianHmm m;
  m.n_states = 2;
  m.init_prob = Eigen::VectorXd::Constant(2, 0.5);
  m.trans.resize(2, 2);
  m.trans << 0.9, 0.1, 0.2, 0.8;
  m.means.resize(2, dim);
  m.variances = Eigen::MatrixXd::Ones(2, dim);
  for (int j = 0; j < dim; ++j) {
    m.means(0, j) = -5.0;
    m.means(1, j) = 5.0;
  }
  return m;
}

SeriesTable make_regime_dataset(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);

  constexpr int kStates = 4;
  const double intercept[kStates] = {0.3, 1.8, -0.9, 3.0};
  const double phi = 0.7;

  Eigen::MatrixXd trans(kStates, kStates);
  trans.setConstant(0.02);
  for (int s = 0; s < kStates; ++s) trans(s, s) = 1.0 - 0.02 * (kStates - 1);

  auto step_state = [&](int s) {
    double u = unif(rng);
    for (int j = 0; j + 1 < kStates; ++j) {
      u -= trans(s, j);
      if (u < 0) return j;
    }
    return kStates - 1;
  };

  std::vector<int> states(n);
  states[0] = static_cast<int>(rng() % kStates);
  for (int t = 1; t < n; ++t) states[t] = step_state(states[t - 1]);

  std::vector<double> target(n);
  target[0] = intercept[states[0]] / (1.0 - phi);
  for (int t = 1; t < n; ++t)
    target[t] = intercept[states[t]] + phi * target[t - 1] + 0.35 * norm(rng);

  SeriesTable table;
  const int start = month_index(Date{1970, 1, 1});
  for (int t = 0; t < n; ++t) table.index.push_back(start + t);
  table.add_column("target", target);
  // Informative covariates: state-dependent shifts buried in unit noise.
  for (int j = 0; j < 4; ++j) {
    std::vector<double> col(n);
    for (int t = 0; t < n; ++t) {
      const double level = 1.2 * ((states[t] + j) % kStates) - 1.8;
      col[t] = level + norm(rng);
    }
    table.add_column("signal_" + std::to_string(j), std::move(col));
  }
  for (int j = 0; j < 4; ++j) {
    std::vector<double> col(n);
    for (int t = 0; t < n; ++t) col[t] = norm(rng);
    table.add_column("noise_" + std::to_string(j), std::move(col));
  }
  table.target_name = "target";
  return table;
}

}  // namespace regimecast::testsupport
