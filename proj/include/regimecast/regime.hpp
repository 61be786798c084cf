#pragma once

#include <string>
#include <vector>

#include "regimecast/hmm.hpp"
#include "regimecast/series.hpp"

namespace regimecast {

// 0 where the decoded state equals `stable_state`, 1 elsewhere.
std::vector<int> binarize_states(const DecodedPath& path, int stable_state);

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;
  long support = 0;
};

struct ClassificationReport {
  ClassMetrics negative;      // class 0
  ClassMetrics positive;      // class 1
  ClassMetrics macro_avg;     // unweighted mean, support = total
  ClassMetrics weighted_avg;  // support-weighted mean
  double accuracy = 0;
  long total = 0;
};

ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth);

enum class AugmentMode { original, states, means, all };
std::string to_string(AugmentMode mode);
AugmentMode augment_mode_from_string(const std::string& s);

// Appends the decoded state column and/or the per-state feature means.
// Original columns are preserved bit-exactly; `original` returns a copy.
SeriesTable augment_features(const SeriesTable& table, const GaussianHmm& model,
                             const DecodedPath& path, AugmentMode mode);

// CSV `date,state,binary_state`.
void write_decoded_csv(const std::string& path, const std::vector<int>& months,
                       const DecodedPath& decoded, const std::vector<int>& binary);
DecodedPath read_decoded_csv(const std::string& path, int n_states);

}  // namespace regimecast
