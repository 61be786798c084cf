#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regimecast/attribution.hpp"
#include "regimecast/dates.hpp"
#include "regimecast/regime.hpp"
#include "regimecast/series.hpp"

namespace regimecast {

// Ordered INI document: [section] headers, key = value lines, # comments.
struct IniDoc {
  std::vector<std::string> section_order;
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
};

IniDoc parse_ini(const std::string& text);

struct SeriesSpec {
  std::string id;
  std::string source;
  Frequency frequency = Frequency::monthly;
  bool pct_change = false;
  GrowthScale scale = GrowthScale::percent;
};

struct RunConfig {
  // data
  std::vector<SeriesSpec> series;
  Date start{1970, 1, 1};
  Date end{2023, 11, 1};
  std::string target;
  std::string label;                  // optional 0/1 ground-truth column
  std::vector<std::string> features;  // modeling columns, ordered

  // hmm
  int hmm_states = 4;
  std::uint64_t hmm_seed = 7;
  int hmm_max_iter = 200;
  double hmm_tol = 1e-6;
  double hmm_prior = 1.0;
  double hmm_variance_floor = 1e-4;
  int stable_state = -1;  // -1 = auto (canonical state 0)
  bool hmm_fit_scaled = false;

  // model
  int lags = 24;
  int horizon = 1;
  int epochs = 100;
  int batch = 32;
  double lr = 1e-3;
  double clip = 5.0;
  int hidden = 50;
  int dense = 25;
  AugmentMode mode = AugmentMode::means;
  double train_fraction = 0.7;
  std::optional<Date> split_date;
  std::uint64_t model_seed = 1;

  // cv
  int cv_folds = 5;

  // forecast
  int fc_horizon = 12;
  int fc_lags = 48;
  int fc_ensemble = 20;
  int fc_seed_stride = 1;
  std::uint64_t fc_base_seed = 1;
  bool fc_write_members = false;

  // explain
  int ig_steps = 50;
  int ig_output_index = 0;
  BaselineKind ig_baseline = BaselineKind::zeros;
  bool ig_magnitude = false;

  std::string out_dir = "out";

  static RunConfig load(const std::string& path);
  static RunConfig from_ini(const IniDoc& doc);
  // Every effective setting, sorted, for the provenance artifact.
  std::string resolved_ini() const;
};

}  // namespace regimecast
