#include "regimecast/regime.hpp"

#include <cstdlib>

#include "regimecast/common.hpp"
#include "regimecast/csv.hpp"

namespace regimecast {

std::vector<int> binarize_states(const DecodedPath& path, int stable_state) {
  if (stable_state < 0 || stable_state >= path.n_states)
    throw std::invalid_argument("stable_state " + std::to_string(stable_state) +
                                " out of range [0," + std::to_string(path.n_states) + ")");
  std::vector<int> out(path.states.size());
  for (std::size_t i = 0; i < path.states.size(); ++i)
    out[i] = path.states[i] == stable_state ? 0 : 1;
  return out;
}

ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("classification_report: length mismatch");
  if (pred.empty()) throw std::invalid_argument("classification_report: empty input");
  long counts[2][2] = {{0, 0}, {0, 0}};  // [truth][pred]
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((pred[i] != 0 && pred[i] != 1) || (truth[i] != 0 && truth[i] != 1))
      throw std::invalid_argument("classification_report: labels must be 0 or 1");
    counts[truth[i]][pred[i]] += 1;
  }

  auto cls = [&](int c) {
    ClassMetrics m;
    const long tp = counts[c][c];
    const long fp = counts[1 - c][c];
    const long fn = counts[c][1 - c];
    m.support = counts[c][0] + counts[c][1];
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
  };

  ClassificationReport rep;
  rep.negative = cls(0);
  rep.positive = cls(1);
  rep.total = static_cast<long>(pred.size());
  rep.accuracy = static_cast<double>(counts[0][0] + counts[1][1]) / rep.total;
  rep.macro_avg.precision = (rep.negative.precision + rep.positive.precision) / 2.0;
  rep.macro_avg.recall = (rep.negative.recall + rep.positive.recall) / 2.0;
  rep.macro_avg.f1 = (rep.negative.f1 + rep.positive.f1) / 2.0;
  rep.macro_avg.support = rep.total;
  const double w0 = static_cast<double>(rep.negative.support) / rep.total;
  const double w1 = static_cast<double>(rep.positive.support) / rep.total;
  rep.weighted_avg.precision = w0 * rep.negative.precision + w1 * rep.positive.precision;
  rep.weighted_avg.recall = w0 * rep.negative.recall + w1 * rep.positive.recall;
  rep.weighted_avg.f1 = w0 * rep.negative.f1 + w1 * rep.positive.f1;
  rep.weighted_avg.support = rep.total;
  return rep;
}

std::string to_string(AugmentMode mode) {
  switch (mode) {
    case AugmentMode::original: return "original";
    case AugmentMode::states: return "states";
    case AugmentMode::means: return "means";
    case AugmentMode::all: return "all";
  }
  return "?";
}

AugmentMode augment_mode_from_string(const std::string& s) {
  if (s == "original") return AugmentMode::original;
  if (s == "states") return AugmentMode::states;
  if (s == "means") return AugmentMode::means;
  if (s == "all") return AugmentMode::all;
  throw ConfigError("unknown dataset mode: '" + s + "'");
}

SeriesTable augment_features(const SeriesTable& table, const GaussianHmm& model,
                             const DecodedPath& path, AugmentMode mode) {
  if (mode == AugmentMode::original) return table;
  if (static_cast<int>(path.states.size()) != table.rows())
    throw std::invalid_argument("decoded path is not aligned to the table");
  if (model.dim() != table.cols())
    throw std::invalid_argument("model dimension " + std::to_string(model.dim()) +
                                " does not match feature count " + std::to_string(table.cols()));

  SeriesTable out = table;
  if (mode == AugmentMode::states || mode == AugmentMode::all) {
    std::vector<double> states(path.states.begin(), path.states.end());
    out.add_column("hidden_state", std::move(states));
  }
  if (mode == AugmentMode::means || mode == AugmentMode::all) {
    for (int d = 0; d < model.dim(); ++d) {
      std::vector<double> col(table.rows());
      for (int t = 0; t < table.rows(); ++t) col[t] = model.means(path.states[t], d);
      out.add_column("mean_" + table.names[d], std::move(col));
    }
  }
  return out;
}

void write_decoded_csv(const std::string& path, const std::vector<int>& months,
                       const DecodedPath& decoded, const std::vector<int>& binary) {
  if (months.size() != decoded.states.size() || months.size() != binary.size())
    throw std::invalid_argument("write_decoded_csv: length mismatch");
  CsvWriter w(path);
  w.row({"date", "state", "binary_state"});
  for (std::size_t i = 0; i < months.size(); ++i)
    w.row({format_month(months[i]), std::to_string(decoded.states[i]),
           std::to_string(binary[i])});
}

DecodedPath read_decoded_csv(const std::string& path, int n_states) {
  const auto rows = read_csv_rows(path);
  DecodedPath decoded;
  decoded.n_states = n_states;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() < 2) throw DataError("decoded path CSV: short row");
    decoded.states.push_back(std::atoi(rows[r][1].c_str()));
  }
  return decoded;
}

}  // namespace regimecast
