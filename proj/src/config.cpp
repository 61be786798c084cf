#include "regimecast/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "regimecast/common.hpp"
#include "regimecast/csv.hpp"

namespace regimecast {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

long to_long(const std::string& v, const std::string& what) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("expected integer for " + what + ", got '" + v + "'");
  return x;
}

double to_double(const std::string& v, const std::string& what) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("expected number for " + what + ", got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, const std::string& what) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected boolean for " + what + ", got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

bool IniDoc::has(const std::string& section, const std::string& key) const {
  const auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string IniDoc::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  const auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  const auto kit = it->second.find(key);
  return kit == it->second.end() ? fallback : kit->second;
}

std::string IniDoc::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing config key [" + section + "] " + key);
  return sections.at(section).at(key);
}

IniDoc parse_ini(const std::string& text) {
  IniDoc doc;
  std::string line;
  std::string current;
  std::istringstream in(text);
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header at line " + std::to_string(lineno));
      current = trim(line.substr(1, line.size() - 2));
      if (!doc.sections.count(current)) doc.section_order.push_back(current);
      doc.sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (current.empty()) throw ConfigError("key before any [section] at line " +
                                           std::to_string(lineno));
    doc.sections[current][key] = value;
  }
  return doc;
}

RunConfig RunConfig::from_ini(const IniDoc& doc) {
  RunConfig cfg;
  cfg.start = parse_date(doc.get("data", "start", "1970-01"));
  cfg.end = parse_date(doc.get("data", "end", "2023-11"));
  cfg.target = doc.require("data", "target");
  cfg.label = doc.get("data", "label", "");

  for (const auto& section : doc.section_order) {
    if (section.rfind("series.", 0) != 0) continue;
    SeriesSpec spec;
    spec.id = section.substr(7);
    spec.source = doc.require(section, "source");
    spec.frequency = frequency_from_string(doc.get(section, "frequency", "monthly"));
    const std::string transform = doc.get(section, "transform", "none");
    if (transform == "pct_change_year")
      spec.pct_change = true;
    else if (transform != "none")
      throw ConfigError("unknown transform '" + transform + "' for series " + spec.id);
    const std::string scale = doc.get(section, "scale", "percent");
    if (scale == "percent")
      spec.scale = GrowthScale::percent;
    else if (scale == "fraction")
      spec.scale = GrowthScale::fraction;
    else
      throw ConfigError("unknown scale '" + scale + "' for series " + spec.id);
    cfg.series.push_back(std::move(spec));
  }

  if (doc.has("data", "features")) {
    cfg.features = split_list(doc.require("data", "features"));
  } else {
    for (const auto& s : cfg.series)
      if (s.id != cfg.label) cfg.features.push_back(s.id);
  }

  cfg.hmm_states = static_cast<int>(to_long(doc.get("hmm", "states", "4"), "[hmm] states"));
  cfg.hmm_seed = static_cast<std::uint64_t>(to_long(doc.get("hmm", "seed", "7"), "[hmm] seed"));
  cfg.hmm_max_iter =
      static_cast<int>(to_long(doc.get("hmm", "max_iter", "200"), "[hmm] max_iter"));
  cfg.hmm_tol = to_double(doc.get("hmm", "tol", "1e-6"), "[hmm] tol");
  cfg.hmm_prior = to_double(doc.get("hmm", "prior", "1"), "[hmm] prior");
  cfg.hmm_variance_floor =
      to_double(doc.get("hmm", "variance_floor", "1e-4"), "[hmm] variance_floor");
  const std::string stable = doc.get("hmm", "stable_state", "auto");
  cfg.stable_state =
      stable == "auto" ? -1 : static_cast<int>(to_long(stable, "[hmm] stable_state"));
  cfg.hmm_fit_scaled = to_bool(doc.get("hmm", "fit_scaled", "false"), "[hmm] fit_scaled");

  cfg.lags = static_cast<int>(to_long(doc.get("model", "lags", "24"), "[model] lags"));
  cfg.horizon = static_cast<int>(to_long(doc.get("model", "horizon", "1"), "[model] horizon"));
  cfg.epochs = static_cast<int>(to_long(doc.get("model", "epochs", "100"), "[model] epochs"));
  cfg.batch = static_cast<int>(to_long(doc.get("model", "batch", "32"), "[model] batch"));
  cfg.lr = to_double(doc.get("model", "lr", "0.001"), "[model] lr");
  cfg.clip = to_double(doc.get("model", "clip", "5"), "[model] clip");
  cfg.hidden = static_cast<int>(to_long(doc.get("model", "hidden", "50"), "[model] hidden"));
  cfg.dense = static_cast<int>(to_long(doc.get("model", "dense", "25"), "[model] dense"));
  cfg.mode = augment_mode_from_string(doc.get("model", "mode", "means"));
  cfg.train_fraction =
      to_double(doc.get("model", "train_fraction", "0.7"), "[model] train_fraction");
  if (doc.has("model", "split_date"))
    cfg.split_date = parse_date(doc.require("model", "split_date"));
  cfg.model_seed =
      static_cast<std::uint64_t>(to_long(doc.get("model", "seed", "1"), "[model] seed"));

  cfg.cv_folds = static_cast<int>(to_long(doc.get("cv", "folds", "5"), "[cv] folds"));

  cfg.fc_horizon =
      static_cast<int>(to_long(doc.get("forecast", "horizon", "12"), "[forecast] horizon"));
  cfg.fc_lags = static_cast<int>(to_long(doc.get("forecast", "lags", "48"), "[forecast] lags"));
  cfg.fc_ensemble =
      static_cast<int>(to_long(doc.get("forecast", "ensemble", "20"), "[forecast] ensemble"));
  cfg.fc_seed_stride = static_cast<int>(
      to_long(doc.get("forecast", "seed_stride", "1"), "[forecast] seed_stride"));
  cfg.fc_base_seed = static_cast<std::uint64_t>(
      to_long(doc.get("forecast", "base_seed", "1"), "[forecast] base_seed"));
  cfg.fc_write_members =
      to_bool(doc.get("forecast", "write_members", "false"), "[forecast] write_members");

  cfg.ig_steps = static_cast<int>(to_long(doc.get("explain", "m", "50"), "[explain] m"));
  cfg.ig_output_index = static_cast<int>(
      to_long(doc.get("explain", "output_index", "0"), "[explain] output_index"));
  cfg.ig_baseline = baseline_from_string(doc.get("explain", "baseline", "zeros"));
  cfg.ig_magnitude = to_bool(doc.get("explain", "magnitude", "false"), "[explain] magnitude");

  cfg.out_dir = doc.get("output", "dir", "out");

  // Range checks for the numeric settings.
  if (cfg.hmm_states < 1) throw ConfigError("[hmm] states must be >= 1");
  if (cfg.lags < 1 || cfg.horizon < 1) throw ConfigError("[model] lags/horizon must be >= 1");
  if (cfg.epochs < 0) throw ConfigError("[model] epochs must be >= 0");
  if (cfg.batch < 1) throw ConfigError("[model] batch must be >= 1");
  if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
    throw ConfigError("[model] train_fraction must be in (0,1)");
  if (cfg.cv_folds < 1) throw ConfigError("[cv] folds must be >= 1");
  if (cfg.fc_ensemble < 2) throw ConfigError("[forecast] ensemble must be >= 2");
  if (cfg.ig_steps < 1) throw ConfigError("[explain] m must be >= 1");
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  return from_ini(parse_ini(text));
}

std::string RunConfig::resolved_ini() const {
  std::ostringstream out;
  out << "[data]\n";
  out << "start = " << format_date(start) << "\n";
  out << "end = " << format_date(end) << "\n";
  out << "target = " << target << "\n";
  if (!label.empty()) out << "label = " << label << "\n";
  out << "features = ";
  for (std::size_t i = 0; i < features.size(); ++i)
    out << (i ? ", " : "") << features[i];
  out << "\n";
  for (const auto& s : series) {
    out << "\n[series." << s.id << "]\n";
    out << "source = " << s.source << "\n";
    out << "frequency = " << to_string(s.frequency) << "\n";
    out << "transform = " << (s.pct_change ? "pct_change_year" : "none") << "\n";
    out << "scale = " << (s.scale == GrowthScale::percent ? "percent" : "fraction") << "\n";
  }
  out << "\n[hmm]\n";
  out << "states = " << hmm_states << "\n";
  out << "seed = " << hmm_seed << "\n";
  out << "max_iter = " << hmm_max_iter << "\n";
  out << "tol = " << format_double(hmm_tol) << "\n";
  out << "prior = " << format_double(hmm_prior) << "\n";
  out << "variance_floor = " << format_double(hmm_variance_floor) << "\n";
  out << "stable_state = " << (stable_state < 0 ? "auto" : std::to_string(stable_state)) << "\n";
  out << "fit_scaled = " << (hmm_fit_scaled ? "true" : "false") << "\n";
  out << "\n[model]\n";
  out << "lags = " << lags << "\n";
  out << "horizon = " << horizon << "\n";
  out << "epochs = " << epochs << "\n";
  out << "batch = " << batch << "\n";
  out << "lr = " << format_double(lr) << "\n";
  out << "clip = " << format_double(clip) << "\n";
  out << "hidden = " << hidden << "\n";
  out << "dense = " << dense << "\n";
  out << "mode = " << to_string(mode) << "\n";
  out << "train_fraction = " << format_double(train_fraction) << "\n";
  if (split_date) out << "split_date = " << format_date(*split_date) << "\n";
  out << "seed = " << model_seed << "\n";
  out << "\n[cv]\n";
  out << "folds = " << cv_folds << "\n";
  out << "\n[forecast]\n";
  out << "horizon = " << fc_horizon << "\n";
  out << "lags = " << fc_lags << "\n";
  out << "ensemble = " << fc_ensemble << "\n";
  out << "seed_stride = " << fc_seed_stride << "\n";
  out << "base_seed = " << fc_base_seed << "\n";
  out << "write_members = " << (fc_write_members ? "true" : "false") << "\n";
  out << "\n[explain]\n";
  out << "m = " << ig_steps << "\n";
  out << "output_index = " << ig_output_index << "\n";
  out << "baseline = " << to_string(ig_baseline) << "\n";
  out << "magnitude = " << (ig_magnitude ? "true" : "false") << "\n";
  out << "\n[output]\n";
  out << "dir = " << out_dir << "\n";
  return out.str();
}

}  // namespace regimecast
