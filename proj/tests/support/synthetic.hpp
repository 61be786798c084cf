#pragma once

#include <Eigen/Core>
#include <vector>

#include "regimecast/common.hpp"
#include "regimecast/hmm.hpp"
#include "regimecast/series.hpp"

namespace regimecast::testsupport {

// Draws a state path and observations from a Gaussian-emission HMM.
Eigen::MatrixXd sample_hmm(const GaussianHmm& model, int n, Rng& rng,
                           std::vector<int>* states_out = nullptr);

// Regime-switching benchmark: a sticky 4-state chain drives an AR(1) target
// with regime-dependent intercepts; 4 covariates carry noisy regime
// information and 4 are pure noise. Index starts 1970-01.
SeriesTable make_regime_dataset(int n, std::uint64_t seed);

// A small well-separated 2-state model for recovery tests.
GaussianHmm two_state_model(int dim);

}  // namespace regimecast::testsupport
