#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regimecast/dates.hpp"

namespace regimecast {

enum class Frequency { daily, monthly, quarterly };
enum class MonthlyMethod { interpolate_linear, aggregate_mean };
enum class GrowthScale { percent, fraction };

std::string to_string(Frequency f);
Frequency frequency_from_string(const std::string& s);

struct RawPoint {
  Date date;
  std::optional<double> value;  // absent = source missing marker
};

struct RawSeries {
  std::string id;
  Frequency frequency = Frequency::monthly;
  std::vector<RawPoint> points;

  // Dates strictly increasing and spacing consistent with the frequency tag
  // (daily allows weekend/holiday gaps).
  void validate() const;
};

// Aligned monthly table. Columns share the contiguous month index.
struct SeriesTable {
  std::vector<int> index;  // month indices, contiguous
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::string target_name;

  int rows() const { return static_cast<int>(index.size()); }
  int cols() const { return static_cast<int>(names.size()); }
  int col_index(const std::string& name) const;  // -1 when absent
  const std::vector<double>& col(const std::string& name) const;
  void add_column(const std::string& name, std::vector<double> values);
  SeriesTable select(const std::vector<std::string>& keep) const;

  bool operator==(const SeriesTable&) const = default;
};

// Two-column date,value CSV from a local path or an http(s) URL. Header row
// optional; empty or "." value fields become absent points.
RawSeries fetch_csv(const std::string& source, const std::string& id);
RawSeries parse_two_column_csv(const std::string& text, const std::string& id);
Frequency infer_frequency(const std::vector<RawPoint>& points);

RawSeries to_monthly(const RawSeries& raw, MonthlyMethod method);
RawSeries pct_change_year(const RawSeries& monthly, GrowthScale scale);

SeriesTable align(const std::vector<RawSeries>& series, const Date& start,
                  const Date& end, const std::string& target);

// Dataset CSV: header `date,<name>,...`, one row per month.
SeriesTable read_table_csv(const std::string& path, const std::string& target);
void write_table_csv(const SeriesTable& table, const std::string& path);

// Blocking GET, returns body or throws DataError. Implemented in
// http_fetch.cpp so the HTTP dependency stays in one translation unit.
std::string http_get(const std::string& url);

}  // namespace regimecast
