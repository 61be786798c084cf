#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regimecast/attribution.hpp"
#include "regimecast/common.hpp"
#include "regimecast/config.hpp"
#include "regimecast/csv.hpp"
#include "regimecast/diagnostics.hpp"
#include "regimecast/forecast.hpp"
#include "regimecast/hmm.hpp"
#include "regimecast/network.hpp"
#include "regimecast/pipeline.hpp"
#include "regimecast/regime.hpp"
#include "regimecast/series.hpp"
#include "regimecast/svg.hpp"

namespace rc = regimecast;
namespace fs = std::filesystem;

namespace {

// Prevents two runs from interleaving artifacts in one output directory.
class OutputLock {
 public:
  explicit OutputLock(const std::string& dir) {
    fs::create_directories(dir);
    path_ = dir + "/.lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw rc::DataError("cannot open lock file " + path_);
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw rc::ConfigError("output directory '" + dir + "' is locked by another run");
    }
  }
  ~OutputLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  int fd_ = -1;
  std::string path_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rc::DataError("cannot write " + path);
  out << text;
}

void write_resolved_config(const rc::RunConfig& cfg) {
  write_text(cfg.out_dir + "/resolved_config.ini", cfg.resolved_ini());
}

std::string resolve_source(const rc::SeriesSpec& spec) {
  const bool is_url = spec.source.rfind("http://", 0) == 0 ||
                      spec.source.rfind("https://", 0) == 0;
  if (!is_url) return spec.source;
  const char* cache = std::getenv("REGIMECAST_CACHE");
  if (!cache || !*cache) return spec.source;
  const std::string cached = std::string(cache) + "/" + spec.id + ".csv";
  if (fs::exists(cached)) return cached;
  const std::string body = rc::http_get(spec.source);
  fs::create_directories(cache);
  write_text(cached, body);
  return cached;
}

rc::SeriesTable load_dataset(const rc::RunConfig& cfg) {
  const std::string path = cfg.out_dir + "/dataset.csv";
  if (!fs::exists(path))
    throw rc::DataError("dataset not found at " + path + "; run `fetch` first");
  return rc::read_table_csv(path, cfg.target);
}

rc::SeriesTable feature_view(const rc::SeriesTable& dataset, const rc::RunConfig& cfg) {
  rc::SeriesTable features = dataset.select(cfg.features);
  features.target_name = cfg.target;
  if (features.col_index(cfg.target) < 0)
    throw rc::ConfigError("target '" + cfg.target + "' is not among the features");
  return features;
}

rc::TrainOptions train_options(const rc::RunConfig& cfg) {
  rc::TrainOptions opt;
  opt.epochs = cfg.epochs;
  opt.batch_size = cfg.batch;
  opt.lr = cfg.lr;
  opt.clip_norm = cfg.clip;
  opt.seed = cfg.model_seed;
  opt.hidden1 = cfg.hidden;
  opt.hidden2 = cfg.hidden;
  opt.dense = cfg.dense;
  return opt;
}

rc::ExperimentConfig experiment_config(const rc::RunConfig& cfg) {
  rc::ExperimentConfig ecfg;
  ecfg.mode = cfg.mode;
  ecfg.n_lags = cfg.lags;
  ecfg.horizon = cfg.horizon;
  ecfg.train_fraction = cfg.train_fraction;
  if (cfg.split_date) ecfg.split_month = rc::month_index(*cfg.split_date);
  ecfg.train = train_options(cfg);
  return ecfg;
}

// Regime artifacts for augmented modes: fitted model plus a fresh decode of
// the dataset at hand.
struct RegimeArtifacts {
  rc::GaussianHmm model;
  rc::DecodedPath path;
};

std::optional<RegimeArtifacts> load_regime(const rc::RunConfig& cfg,
                                           const rc::SeriesTable& features,
                                           bool required) {
  const std::string path = cfg.out_dir + "/hmm_model.json";
  if (!fs::exists(path)) {
    if (required)
      throw rc::DataError("regime artifacts not found at " + path + "; run `hmm` first");
    return std::nullopt;
  }
  RegimeArtifacts art;
  art.model = rc::load_hmm(path);
  if (art.model.dim() != features.cols())
    throw rc::DataError("fitted model dimension does not match the feature set");
  art.path = rc::viterbi(art.model, rc::table_matrix(features));
  return art;
}

std::vector<std::string> month_labels(const std::vector<int>& months) {
  std::vector<std::string> out;
  out.reserve(months.size());
  for (int m : months) out.push_back(rc::format_month(m));
  return out;
}

int cmd_fetch(const rc::RunConfig& cfg) {
  std::vector<rc::RawSeries> monthly;
  for (const auto& spec : cfg.series) {
    rc::RawSeries raw;
    try {
      raw = rc::fetch_csv(resolve_source(spec), spec.id);
    } catch (const rc::DataError& e) {
      throw rc::DataError("series '" + spec.id + "': " + e.what());
    }
    if (raw.frequency != spec.frequency)
      throw rc::DataError("series '" + spec.id + "' looks " + rc::to_string(raw.frequency) +
                          " but the config says " + rc::to_string(spec.frequency));
    rc::RawSeries m = raw;
    if (raw.frequency == rc::Frequency::daily)
      m = rc::to_monthly(raw, rc::MonthlyMethod::aggregate_mean);
    else if (raw.frequency == rc::Frequency::quarterly)
      m = rc::to_monthly(raw, rc::MonthlyMethod::interpolate_linear);
    if (spec.pct_change) m = rc::pct_change_year(m, spec.scale);
    monthly.push_back(std::move(m));
  }
  const rc::SeriesTable table = rc::align(monthly, cfg.start, cfg.end, cfg.target);
  rc::write_table_csv(table, cfg.out_dir + "/dataset.csv");

  // Diagnostics: stats over every column, correlations and unit-root tests
  // over the non-label columns.
  const auto stats = rc::summary_stats(table);
  {
    rc::CsvWriter w(cfg.out_dir + "/summary_stats.csv");
    std::vector<std::string> header{"stat"};
    for (const auto& s : stats) header.push_back(s.name);
    w.row(header);
    const std::vector<std::pair<std::string, double rc::ColumnStats::*>> rows = {
        {"mean", &rc::ColumnStats::mean}, {"std", &rc::ColumnStats::std},
        {"min", &rc::ColumnStats::min},   {"25%", &rc::ColumnStats::q25},
        {"50%", &rc::ColumnStats::q50},   {"75%", &rc::ColumnStats::q75},
        {"max", &rc::ColumnStats::max}};
    std::vector<std::string> count_row{"count"};
    for (const auto& s : stats) count_row.push_back(std::to_string(s.count));
    w.row(count_row);
    for (const auto& [name, member] : rows) {
      std::vector<std::string> fields{name};
      for (const auto& s : stats) fields.push_back(rc::format_double(s.*member));
      w.row(fields);
    }
  }

  std::vector<std::string> numeric_cols;
  for (const auto& name : table.names)
    if (name != cfg.label) numeric_cols.push_back(name);
  const rc::SeriesTable numeric = table.select(numeric_cols);

  {
    const Eigen::MatrixXd corr = rc::correlation_matrix(numeric);
    rc::CsvWriter w(cfg.out_dir + "/correlations.csv");
    std::vector<std::string> header{""};
    header.insert(header.end(), numeric_cols.begin(), numeric_cols.end());
    w.row(header);
    for (int i = 0; i < corr.rows(); ++i) {
      std::vector<std::string> fields{numeric_cols[i]};
      for (int j = 0; j < corr.cols(); ++j) fields.push_back(rc::format_double(corr(i, j)));
      w.row(fields);
    }
  }

  {
    rc::CsvWriter w(cfg.out_dir + "/adf.csv");
    w.row({"variable", "statistic", "used_lag", "n_obs", "crit_1", "crit_5", "crit_10",
           "stationary"});
    const int n = table.rows();
    // Schwert rule for the lag ceiling.
    const int max_lag = std::max(
        1, static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25))));
    for (const auto& name : numeric_cols) {
      const rc::AdfResult res = rc::adf_test(numeric.col(name), max_lag);
      w.row({name, rc::format_double(res.statistic), std::to_string(res.used_lag),
             std::to_string(res.n_obs), rc::format_double(res.crit_1),
             rc::format_double(res.crit_5), rc::format_double(res.crit_10),
             res.stationary ? "yes" : "no"});
    }
  }

  std::cout << "dataset: " << table.rows() << " rows x " << table.cols()
            << " columns -> " << cfg.out_dir << "/dataset.csv\n";
  return 0;
}

int cmd_hmm(const rc::RunConfig& cfg) {
  const rc::SeriesTable dataset = load_dataset(cfg);
  const rc::SeriesTable features = feature_view(dataset, cfg);
  Eigen::MatrixXd obs = rc::table_matrix(features);
  if (cfg.hmm_fit_scaled) {
    const rc::ScalerParams scaler = rc::scaler_fit(obs, features.names);
    obs = rc::scaler_transform(scaler, obs);
  }

  rc::EmOptions opts;
  opts.max_iter = cfg.hmm_max_iter;
  opts.tol = cfg.hmm_tol;
  opts.prior_pseudocount = cfg.hmm_prior;
  opts.variance_floor = cfg.hmm_variance_floor;
  rc::EmFit fit = rc::fit_em(obs, cfg.hmm_states, cfg.hmm_seed, opts);
  fit.model.feature_names = features.names;
  rc::save_hmm(fit.model, cfg.out_dir + "/hmm_model.json");

  {
    rc::CsvWriter w(cfg.out_dir + "/hmm_loglik.csv");
    w.row({"iteration", "log_likelihood"});
    for (std::size_t i = 0; i < fit.loglik_trace.size(); ++i)
      w.row({std::to_string(i), rc::format_double(fit.loglik_trace[i])});
  }

  const rc::DecodedPath decoded = rc::viterbi(fit.model, obs);
  const int stable = cfg.stable_state < 0 ? 0 : cfg.stable_state;
  const std::vector<int> binary = rc::binarize_states(decoded, stable);
  rc::write_decoded_csv(cfg.out_dir + "/decoded_states.csv", features.index, decoded, binary);

  const Eigen::VectorXd stationary = rc::stationary_distribution(fit.model.trans);
  {
    rc::CsvWriter w(cfg.out_dir + "/markov_chain.csv");
    std::vector<std::string> header{"row"};
    for (int s = 0; s < fit.model.n_states; ++s) header.push_back("state_" + std::to_string(s));
    w.row(header);
    for (int i = 0; i < fit.model.n_states; ++i) {
      std::vector<std::string> fields{"state_" + std::to_string(i)};
      for (int j = 0; j < fit.model.n_states; ++j)
        fields.push_back(rc::format_double(fit.model.trans(i, j)));
      w.row(fields);
    }
    std::vector<std::string> fields{"stationary"};
    for (int s = 0; s < fit.model.n_states; ++s)
      fields.push_back(rc::format_double(stationary(s)));
    w.row(fields);
  }
  std::cout << "stationary distribution:";
  for (int s = 0; s < fit.model.n_states; ++s)
    std::cout << " state " << s << ": " << rc::format_fixed(stationary(s), 3);
  std::cout << "\n";

  if (!cfg.label.empty()) {
    const int label_col = dataset.col_index(cfg.label);
    if (label_col < 0) throw rc::DataError("label column '" + cfg.label + "' missing");
    std::vector<int> truth(dataset.rows());
    for (int r = 0; r < dataset.rows(); ++r) {
      const double v = dataset.columns[label_col][r];
      if (v != 0.0 && v != 1.0)
        throw rc::DataError("label column must be 0/1, found " + rc::format_double(v));
      truth[r] = static_cast<int>(v);
    }
    const rc::ClassificationReport rep = rc::classification_report(binary, truth);
    rc::CsvWriter w(cfg.out_dir + "/classification_report.csv");
    w.row({"", "precision", "recall", "f1-score", "support"});
    const auto line = [&](const std::string& name, const rc::ClassMetrics& m) {
      w.row({name, rc::format_fixed(m.precision, 4), rc::format_fixed(m.recall, 4),
             rc::format_fixed(m.f1, 4), std::to_string(m.support)});
    };
    line("0.0", rep.negative);
    line("1.0", rep.positive);
    w.row({"accuracy", "", "", rc::format_fixed(rep.accuracy, 4), std::to_string(rep.total)});
    line("macro avg", rep.macro_avg);
    line("weighted avg", rep.weighted_avg);
    std::cout << "decoded vs " << cfg.label << ": accuracy "
              << rc::format_fixed(rep.accuracy, 3) << "\n";
  }
  return 0;
}

void write_predictions_csv(const std::string& path, const std::vector<int>& months,
                           const Eigen::MatrixXd& y_true, const Eigen::MatrixXd& y_pred) {
  rc::CsvWriter w(path);
  if (y_true.cols() == 1) {
    w.row({"date", "y_true", "y_pred"});
    for (int i = 0; i < y_true.rows(); ++i)
      w.row({rc::format_month(months[i]), rc::format_double(y_true(i, 0)),
             rc::format_double(y_pred(i, 0))});
  } else {
    w.row({"date", "step", "y_true", "y_pred"});
    for (int i = 0; i < y_true.rows(); ++i)
      for (int h = 0; h < y_true.cols(); ++h)
        w.row({rc::format_month(months[i]), std::to_string(h + 1),
               rc::format_double(y_true(i, h)), rc::format_double(y_pred(i, h))});
  }
}

int cmd_train(const rc::RunConfig& cfg) {
  const rc::SeriesTable dataset = load_dataset(cfg);
  const rc::SeriesTable features = feature_view(dataset, cfg);
  const bool augmented = cfg.mode != rc::AugmentMode::original;
  const auto regime = load_regime(cfg, features, augmented);

  const rc::ExperimentConfig ecfg = experiment_config(cfg);
  const rc::ExperimentResult res =
      rc::run_experiment(features, regime ? &regime->model : nullptr,
                         regime ? &regime->path : nullptr, ecfg);

  const std::string mode = rc::to_string(cfg.mode);
  rc::save_bundle({res.net, cfg.mode, cfg.train_fraction, ecfg.train},
                  cfg.out_dir + "/model_" + mode + ".json");
  write_predictions_csv(cfg.out_dir + "/predictions_" + mode + ".csv", res.test_months,
                        res.y_true, res.y_pred);
  {
    rc::CsvWriter w(cfg.out_dir + "/loss_curve_" + mode + ".csv");
    w.row({"epoch", "mse"});
    for (std::size_t e = 0; e < res.report.loss_curve.size(); ++e)
      w.row({std::to_string(e + 1), rc::format_double(res.report.loss_curve[e])});
  }
  {
    rc::CsvWriter w(cfg.out_dir + "/metrics_" + mode + ".csv");
    w.row({"mode", "mse", "mae", "r2"});
    w.row({mode, rc::format_double(res.metrics.mse), rc::format_double(res.metrics.mae),
           res.metrics.r2_defined ? rc::format_double(res.metrics.r2) : "nan"});
  }
  {
    std::vector<double> truth(res.y_true.col(0).data(),
                              res.y_true.col(0).data() + res.y_true.rows());
    std::vector<double> pred(res.y_pred.col(0).data(),
                             res.y_pred.col(0).data() + res.y_pred.rows());
    rc::svg::write_line_chart(cfg.out_dir + "/predictions_" + mode + ".svg",
                              "Test predictions (" + mode + ")",
                              month_labels(res.test_months),
                              {{"actual", truth}, {"predicted", pred}});
    rc::svg::write_line_chart(cfg.out_dir + "/loss_curve_" + mode + ".svg",
                              "Training loss (" + mode + ")", {},
                              {{"mse", res.report.loss_curve}});
  }
  std::cout << mode << ": mse " << rc::format_fixed(res.metrics.mse, 4) << ", mae "
            << rc::format_fixed(res.metrics.mae, 4) << ", r2 "
            << rc::format_fixed(res.metrics.r2, 4) << " (" << res.n_train << " train / "
            << res.n_test << " test)\n";
  return 0;
}

int cmd_cv(const rc::RunConfig& cfg) {
  const rc::SeriesTable dataset = load_dataset(cfg);
  const rc::SeriesTable features = feature_view(dataset, cfg);
  const auto regime = load_regime(cfg, features, true);
  const rc::ExperimentConfig base = experiment_config(cfg);

  const std::vector<rc::AugmentMode> modes = {
      rc::AugmentMode::original, rc::AugmentMode::states, rc::AugmentMode::means,
      rc::AugmentMode::all};

  rc::CsvWriter w(cfg.out_dir + "/cv_metrics.csv");
  w.row({"mode", "fold", "mse", "mae", "r2"});
  for (const rc::AugmentMode mode : modes) {
    rc::ExperimentConfig ecfg = base;
    ecfg.mode = mode;
    const rc::SeriesTable table =
        rc::augment_features(features, regime->model, regime->path, mode);
    const int n_samples = table.rows() - ecfg.n_lags - ecfg.horizon + 1;
    const auto folds = rc::forward_chain_folds(n_samples, cfg.cv_folds);

    std::vector<int> all_months;
    std::vector<double> all_true, all_pred;
    rc::CsvWriter pw(cfg.out_dir + "/cv_predictions_" + rc::to_string(mode) + ".csv");
    pw.row({"date", "fold", "y_true", "y_pred"});
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const rc::ExperimentResult res = rc::run_fold(table, ecfg, folds[f]);
      w.row({rc::to_string(mode), std::to_string(f + 1), rc::format_double(res.metrics.mse),
             rc::format_double(res.metrics.mae),
             res.metrics.r2_defined ? rc::format_double(res.metrics.r2) : "nan"});
      for (int i = 0; i < res.y_true.rows(); ++i) {
        pw.row({rc::format_month(res.test_months[i]), std::to_string(f + 1),
                rc::format_double(res.y_true(i, 0)), rc::format_double(res.y_pred(i, 0))});
        all_months.push_back(res.test_months[i]);
        all_true.push_back(res.y_true(i, 0));
        all_pred.push_back(res.y_pred(i, 0));
      }
      std::cout << rc::to_string(mode) << " fold " << f + 1 << ": mse "
                << rc::format_fixed(res.metrics.mse, 4) << "\n";
    }
    rc::svg::write_line_chart(
        cfg.out_dir + "/cv_predictions_" + rc::to_string(mode) + ".svg",
        "Forward-chaining CV predictions (" + rc::to_string(mode) + ")",
        month_labels(all_months), {{"actual", all_true}, {"predicted", all_pred}});
  }
  return 0;
}

int cmd_forecast(const rc::RunConfig& cfg) {
  const rc::SeriesTable dataset = load_dataset(cfg);
  const rc::SeriesTable features = feature_view(dataset, cfg);
  const bool augmented = cfg.mode != rc::AugmentMode::original;
  const auto regime = load_regime(cfg, features, augmented);

  rc::ForecastOptions opts;
  opts.horizon = cfg.fc_horizon;
  opts.n_lags = cfg.fc_lags;
  opts.ensemble = cfg.fc_ensemble;
  opts.base_seed = cfg.fc_base_seed;
  opts.seed_stride = cfg.fc_seed_stride;
  opts.train = train_options(cfg);

  const rc::ForecastResult res =
      rc::forecast_horizon(features, regime ? &regime->model : nullptr,
                           regime ? &regime->path : nullptr, cfg.mode, opts);

  const std::string mode = rc::to_string(cfg.mode);
  const std::string stem =
      cfg.out_dir + "/forecast_" + mode + "_h" + std::to_string(cfg.fc_horizon);
  {
    rc::CsvWriter w(stem + ".csv");
    w.row({"date", "point", "lower", "upper"});
    for (int h = 0; h < opts.horizon; ++h)
      w.row({rc::format_month(res.horizon_months[h]), rc::format_double(res.point(h)),
             rc::format_double(res.lower(h)), rc::format_double(res.upper(h))});
  }
  if (cfg.fc_write_members) {
    rc::CsvWriter w(stem + "_members.csv");
    w.row({"member", "date", "value"});
    for (int s = 0; s < opts.ensemble; ++s)
      for (int h = 0; h < opts.horizon; ++h)
        w.row({std::to_string(s), rc::format_month(res.horizon_months[h]),
               rc::format_double(res.member_paths(s, h))});
  }
  rc::svg::write_fan_chart(
      stem + ".svg", "Forecast with 5-95% band (" + mode + ")",
      month_labels(res.horizon_months),
      std::vector<double>(res.point.data(), res.point.data() + res.point.size()),
      std::vector<double>(res.lower.data(), res.lower.data() + res.lower.size()),
      std::vector<double>(res.upper.data(), res.upper.data() + res.upper.size()));
  std::cout << "forecast " << mode << " h=" << opts.horizon << ": first step "
            << rc::format_fixed(res.point(0), 4) << " [" << rc::format_fixed(res.lower(0), 4)
            << ", " << rc::format_fixed(res.upper(0), 4) << "]\n";
  return 0;
}

int cmd_explain(const rc::RunConfig& cfg) {
  const rc::SeriesTable dataset = load_dataset(cfg);
  const rc::SeriesTable features = feature_view(dataset, cfg);
  const std::string mode = rc::to_string(cfg.mode);
  const std::string bundle_path = cfg.out_dir + "/model_" + mode + ".json";
  if (!fs::exists(bundle_path))
    throw rc::DataError("model bundle not found at " + bundle_path + "; run `train` first");
  const rc::ModelBundle bundle = rc::load_bundle(bundle_path);

  const bool augmented = cfg.mode != rc::AugmentMode::original;
  const auto regime = load_regime(cfg, features, augmented);
  rc::SeriesTable table = features;
  if (augmented)
    table = rc::augment_features(features, regime->model, regime->path, cfg.mode);
  if (table.names != bundle.net.scaler.feature_order)
    throw rc::DataError("dataset columns do not match the trained model's scaler");

  const Eigen::MatrixXd raw = rc::table_matrix(table);
  const Eigen::MatrixXd scaled_rows = rc::scaler_transform(bundle.net.scaler, raw);
  const rc::SeriesTable scaled = rc::table_from_matrix(table, scaled_rows);
  const rc::SupervisedTensor tensor =
      rc::make_supervised(scaled, bundle.net.cfg.n_lags, bundle.net.cfg.horizon);
  const int split = static_cast<int>(std::floor(bundle.train_fraction * tensor.n()));
  const rc::SupervisedTensor test_t = rc::slice_samples(tensor, split, tensor.n());

  Eigen::MatrixXd baseline =
      Eigen::MatrixXd::Zero(bundle.net.cfg.n_lags, bundle.net.cfg.input_dim);
  if (cfg.ig_baseline == rc::BaselineKind::train_mean) {
    const Eigen::RowVectorXd mean = scaled_rows.topRows(split + bundle.net.cfg.n_lags +
                                                        bundle.net.cfg.horizon - 1)
                                        .colwise()
                                        .mean();
    baseline = mean.replicate(bundle.net.cfg.n_lags, 1);
  }

  rc::AttributionMap attr;
  attr.baseline_kind = cfg.ig_baseline;
  attr.m_steps = cfg.ig_steps;
  attr.feature_order = table.names;
  attr.sample_months = test_t.sample_months;
  for (int i = 0; i < test_t.n(); ++i)
    attr.values.push_back(rc::integrated_gradients(
        bundle.net, test_t.X.sample(i), baseline, cfg.ig_steps, cfg.ig_output_index));

  {
    rc::CsvWriter w(cfg.out_dir + "/attributions_" + mode + ".csv");
    w.row({"sample_date", "lag", "feature", "value"});
    for (std::size_t i = 0; i < attr.values.size(); ++i)
      for (int l = 0; l < attr.values[i].rows(); ++l)
        for (int f = 0; f < attr.values[i].cols(); ++f)
          w.row({rc::format_month(attr.sample_months[i]), std::to_string(l),
                 attr.feature_order[f], rc::format_double(attr.values[i](l, f))});
  }
  const Eigen::VectorXd means = rc::average_attributions(attr.values, cfg.ig_magnitude);
  {
    rc::CsvWriter w(cfg.out_dir + "/attribution_means_" + mode + ".csv");
    w.row({"feature", "mean_value"});
    for (int f = 0; f < means.size(); ++f)
      w.row({attr.feature_order[f], rc::format_double(means(f))});
  }
  rc::svg::write_bar_chart(cfg.out_dir + "/attribution_" + mode + ".svg",
                           "Average feature attribution (" + mode + ")", attr.feature_order,
                           std::vector<double>(means.data(), means.data() + means.size()));
  std::cout << "attributions over " << test_t.n() << " test samples, m=" << cfg.ig_steps
            << "\n";
  return 0;
}

int cmd_report(const rc::RunConfig& cfg) {
  std::ostringstream md;
  md << "# Run report\n";
  const auto append_csv = [&](const std::string& file, const std::string& heading) {
    const std::string path = cfg.out_dir + "/" + file;
    if (!fs::exists(path)) return;
    md << "\n## " << heading << "\n\n";
    const auto rows = rc::read_csv_rows(path);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      md << "|";
      for (const auto& f : rows[r]) md << " " << f << " |";
      md << "\n";
      if (r == 0) {
        md << "|";
        for (std::size_t i = 0; i < rows[r].size(); ++i) md << " --- |";
        md << "\n";
      }
    }
  };
  append_csv("summary_stats.csv", "Summary statistics");
  append_csv("adf.csv", "Stationarity tests");
  append_csv("classification_report.csv", "Decoded states vs label");
  append_csv("markov_chain.csv", "Markov chain");
  for (const std::string mode : {"original", "states", "means", "all"})
    append_csv("metrics_" + std::string(mode) + ".csv", "Metrics (" + std::string(mode) + ")");
  append_csv("cv_metrics.csv", "Cross-validation metrics");
  write_text(cfg.out_dir + "/report.md", md.str());
  std::cout << "wrote " << cfg.out_dir << "/report.md\n";
  return 0;
}

struct CliOverrides {
  std::string config_path = "config.ini";
  std::optional<std::string> out;
  std::optional<std::string> mode;
  std::optional<long> seed;
  std::optional<int> horizon;
  std::optional<int> lags;
  std::optional<int> folds;
  std::optional<int> epochs;
  std::optional<int> ensemble;
  std::optional<int> stable_state;
  bool magnitude = false;
};

rc::RunConfig effective_config(const CliOverrides& ov, bool forecast_scope) {
  rc::RunConfig cfg = rc::RunConfig::load(ov.config_path);
  if (ov.out) cfg.out_dir = *ov.out;
  if (ov.mode) cfg.mode = rc::augment_mode_from_string(*ov.mode);
  if (ov.seed) {
    cfg.model_seed = static_cast<std::uint64_t>(*ov.seed);
    cfg.hmm_seed = static_cast<std::uint64_t>(*ov.seed);
    cfg.fc_base_seed = static_cast<std::uint64_t>(*ov.seed);
  }
  if (ov.horizon) (forecast_scope ? cfg.fc_horizon : cfg.horizon) = *ov.horizon;
  if (ov.lags) (forecast_scope ? cfg.fc_lags : cfg.lags) = *ov.lags;
  if (ov.folds) cfg.cv_folds = *ov.folds;
  if (ov.epochs) cfg.epochs = *ov.epochs;
  if (ov.ensemble) cfg.fc_ensemble = *ov.ensemble;
  if (ov.stable_state) cfg.stable_state = *ov.stable_state;
  if (ov.magnitude) cfg.ig_magnitude = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HMM-augmented LSTM forecasting toolkit"};
  app.require_subcommand(1);

  CliOverrides ov;
  app.add_option("-c,--config", ov.config_path, "Config file (INI)");
  app.add_option("--out", ov.out, "Output directory override");
  app.add_option("--mode", ov.mode, "Dataset mode: original|states|means|all");
  app.add_option("--seed", ov.seed, "Seed override (hmm, model, forecast base)");
  app.add_option("--horizon", ov.horizon, "Horizon override");
  app.add_option("--lags", ov.lags, "Lag-window override");
  app.add_option("--folds", ov.folds, "CV fold count override");
  app.add_option("--epochs", ov.epochs, "Training epoch override");
  app.add_option("--ensemble", ov.ensemble, "Forecast ensemble size override");
  app.add_option("--stable-state", ov.stable_state, "Stable (non-crisis) state index");
  app.add_flag("--abs", ov.magnitude, "Average attribution magnitudes instead of signed values");

  auto* fetch = app.add_subcommand("fetch", "Acquire series and build the aligned dataset");
  auto* hmm = app.add_subcommand("hmm", "Fit the regime model and decode states");
  auto* train = app.add_subcommand("train", "Train and evaluate on a chronological split");
  auto* cv = app.add_subcommand("cv", "Forward-chaining cross-validation over all modes");
  auto* forecast = app.add_subcommand("forecast", "Out-of-sample ensemble forecast");
  auto* explain = app.add_subcommand("explain", "Integrated-gradients attributions");
  auto* report = app.add_subcommand("report", "Collate artifacts into report.md");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const bool forecast_scope = forecast->parsed();
    const rc::RunConfig cfg = effective_config(ov, forecast_scope);
    OutputLock lock(cfg.out_dir);
    write_resolved_config(cfg);
    if (fetch->parsed()) return cmd_fetch(cfg);
    if (hmm->parsed()) return cmd_hmm(cfg);
    if (train->parsed()) return cmd_train(cfg);
    if (cv->parsed()) return cmd_cv(cfg);
    if (forecast->parsed()) return cmd_forecast(cfg);
    if (explain->parsed()) return cmd_explain(cfg);
    if (report->parsed()) return cmd_report(cfg);
    return 2;
  } catch (const rc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const rc::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
