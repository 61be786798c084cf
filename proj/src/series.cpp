#include "regimecast/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "regimecast/common.hpp"
#include "regimecast/csv.hpp"

namespace regimecast {

std::string to_string(Frequency f) {
  switch (f) {
    case Frequency::daily: return "daily";
    case Frequency::monthly: return "monthly";
    case Frequency::quarterly: return "quarterly";
  }
  return "?";
}

Frequency frequency_from_string(const std::string& s) {
  if (s == "daily") return Frequency::daily;
  if (s == "monthly") return Frequency::monthly;
  if (s == "quarterly") return Frequency::quarterly;
  throw ConfigError("unknown frequency: '" + s + "'");
}

void RawSeries::validate() const {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i - 1].date < points[i].date))
      throw DataError("series '" + id + "': dates not strictly increasing at row " +
                      std::to_string(i));
    const long gap_days = day_number(points[i].date) - day_number(points[i - 1].date);
    const int gap_months = month_index(points[i].date) - month_index(points[i - 1].date);
    switch (frequency) {
      case Frequency::daily:
        if (gap_days > 7)
          throw DataError("series '" + id + "': gap of " + std::to_string(gap_days) +
                          " days inconsistent with daily frequency");
        break;
      case Frequency::monthly:
        if (gap_months != 1)
          throw DataError("series '" + id + "': spacing inconsistent with monthly frequency");
        break;
      case Frequency::quarterly:
        if (gap_months != 3)
          throw DataError("series '" + id + "': spacing inconsistent with quarterly frequency");
        break;
    }
  }
}

int SeriesTable::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

const std::vector<double>& SeriesTable::col(const std::string& name) const {
  const int i = col_index(name);
  if (i < 0) throw DataError("table has no column '" + name + "'");
  return columns[i];
}

void SeriesTable::add_column(const std::string& name, std::vector<double> values) {
  if (values.size() != index.size())
    throw DataError("column '" + name + "' length mismatch");
  if (col_index(name) >= 0) throw DataError("duplicate column '" + name + "'");
  names.push_back(name);
  columns.push_back(std::move(values));
}

SeriesTable SeriesTable::select(const std::vector<std::string>& keep) const {
  SeriesTable out;
  out.index = index;
  out.target_name = target_name;
  for (const auto& name : keep) out.add_column(name, col(name));
  return out;
}

Frequency infer_frequency(const std::vector<RawPoint>& points) {
  if (points.size() < 2) return Frequency::monthly;
  std::vector<long> gaps;
  gaps.reserve(points.size() - 1);
  for (std::size_t i = 1; i < points.size(); ++i)
    gaps.push_back(day_number(points[i].date) - day_number(points[i - 1].date));
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const long median = gaps[gaps.size() / 2];
  if (median <= 7) return Frequency::daily;
  if (median <= 45) return Frequency::monthly;
  return Frequency::quarterly;
}

RawSeries parse_two_column_csv(const std::string& text, const std::string& id) {
  auto rows = parse_csv(text);
  std::size_t start = 0;
  if (!rows.empty()) {
    // Header row: first field does not parse as a date.
    try {
      parse_date(rows[0].at(0));
    } catch (const DataError&) {
      start = 1;
    }
  }
  if (rows.size() - start < 2)
    throw DataError("series '" + id + "': fewer than 2 rows");
  RawSeries s;
  s.id = id;
  for (std::size_t i = start; i < rows.size(); ++i) {
    if (rows[i].size() < 2)
      throw DataError("series '" + id + "': row " + std::to_string(i + 1) +
                      " has fewer than 2 fields");
    RawPoint p;
    p.date = parse_date(rows[i][0]);
    const std::string& v = rows[i][1];
    if (v.empty() || v == ".") {
      p.value = std::nullopt;
    } else {
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (end == v.c_str() || *end != '\0')
        throw DataError("series '" + id + "': unparseable value '" + v + "'");
      p.value = x;
    }
    s.points.push_back(p);
  }
  s.frequency = infer_frequency(s.points);
  s.validate();
  return s;
}

RawSeries fetch_csv(const std::string& source, const std::string& id) {
  std::string text;
  if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) {
    text = http_get(source);
  } else {
    text = read_file(source);
  }
  return parse_two_column_csv(text, id);
}

namespace {

RawSeries interpolate_quarterly(const RawSeries& raw) {
  RawSeries out;
  out.id = raw.id;
  out.frequency = Frequency::monthly;
  const auto& pts = raw.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].value)
      throw DataError("series '" + raw.id + "': absent quarterly value at " +
                      format_date(pts[i].date));
    const int m0 = month_index(pts[i].date);
    const double v0 = *pts[i].value;
    out.points.push_back({month_from_index(m0), v0});
    if (i + 1 < pts.size()) {
      if (!pts[i + 1].value)
        throw DataError("series '" + raw.id + "': absent quarterly value at " +
                        format_date(pts[i + 1].date));
      const int m1 = month_index(pts[i + 1].date);
      const double v1 = *pts[i + 1].value;
      const double span = static_cast<double>(m1 - m0);
      for (int m = m0 + 1; m < m1; ++m) {
        const double w = static_cast<double>(m - m0) / span;
        out.points.push_back({month_from_index(m), v0 + w * (v1 - v0)});
      }
    } else {
      // Hold the tail of the final quarter flat; no extrapolation.
      for (int m = m0 + 1; m <= m0 + 2; ++m)
        out.points.push_back({month_from_index(m), v0});
    }
  }
  return out;
}

RawSeries aggregate_daily(const RawSeries& raw) {
  RawSeries out;
  out.id = raw.id;
  out.frequency = Frequency::monthly;
  std::map<int, std::pair<double, int>> acc;  // month -> (sum, count of present)
  for (const auto& p : raw.points) {
    auto& cell = acc[month_index(p.date)];
    if (p.value) {
      cell.first += *p.value;
      cell.second += 1;
    }
  }
  for (const auto& [m, cell] : acc) {
    RawPoint p;
    p.date = month_from_index(m);
    if (cell.second > 0) p.value = cell.first / cell.second;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace

RawSeries to_monthly(const RawSeries& raw, MonthlyMethod method) {
  raw.validate();
  switch (method) {
    case MonthlyMethod::interpolate_linear:
      if (raw.frequency != Frequency::quarterly)
        throw DataError("series '" + raw.id +
                        "': interpolate_linear requires quarterly input, got " +
                        to_string(raw.frequency));
      return interpolate_quarterly(raw);
    case MonthlyMethod::aggregate_mean:
      if (raw.frequency != Frequency::daily)
        throw DataError("series '" + raw.id +
                        "': aggregate_mean requires daily input, got " +
                        to_string(raw.frequency));
      return aggregate_daily(raw);
  }
  throw std::invalid_argument("unknown MonthlyMethod");
}

RawSeries pct_change_year(const RawSeries& monthly, GrowthScale scale) {
  if (monthly.frequency != Frequency::monthly)
    throw DataError("series '" + monthly.id + "': pct_change_year requires monthly input");
  monthly.validate();
  if (monthly.points.size() < 13)
    throw DataError("series '" + monthly.id + "': pct_change_year needs at least 13 observations");
  const double factor = scale == GrowthScale::percent ? 100.0 : 1.0;
  RawSeries out;
  out.id = monthly.id;
  out.frequency = Frequency::monthly;
  for (std::size_t t = 12; t < monthly.points.size(); ++t) {
    const auto& cur = monthly.points[t];
    const auto& base = monthly.points[t - 12];
    RawPoint p;
    p.date = cur.date;
    if (cur.value && base.value) {
      if (*base.value == 0.0)
        throw NumericError("series '" + monthly.id + "': zero denominator at " +
                           format_date(base.date));
      p.value = (*cur.value / *base.value - 1.0) * factor;
    }
    out.points.push_back(p);
  }
  return out;
}

SeriesTable align(const std::vector<RawSeries>& series, const Date& start,
                  const Date& end, const std::string& target) {
  if (series.empty()) throw DataError("align: no series given");
  const int m0 = month_index(start);
  const int m1 = month_index(end);
  if (m1 < m0) throw DataError("align: empty intersection (end before start)");

  SeriesTable table;
  for (int m = m0; m <= m1; ++m) table.index.push_back(m);

  for (const auto& s : series) {
    if (s.frequency != Frequency::monthly)
      throw DataError("align: series '" + s.id + "' is not monthly");
    std::map<int, std::optional<double>> by_month;
    for (const auto& p : s.points) by_month[month_index(p.date)] = p.value;
    std::vector<double> colv;
    colv.reserve(table.index.size());
    for (int m : table.index) {
      const auto it = by_month.find(m);
      if (it == by_month.end() || !it->second)
        throw DataError("align: coverage gap in series '" + s.id + "' at " + format_month(m));
      colv.push_back(*it->second);
    }
    table.add_column(s.id, std::move(colv));
  }
  if (table.col_index(target) < 0)
    throw DataError("align: target column '" + target + "' not among series");
  table.target_name = target;
  return table;
}

SeriesTable read_table_csv(const std::string& path, const std::string& target) {
  const auto rows = read_csv_rows(path);
  if (rows.size() < 2) throw DataError("dataset CSV has no data rows: " + path);
  const auto& header = rows[0];
  if (header.empty() || header[0] != "date")
    throw DataError("dataset CSV must start with a 'date' column: " + path);
  SeriesTable table;
  table.names.assign(header.begin() + 1, header.end());
  table.columns.assign(table.names.size(), {});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw DataError("dataset CSV row " + std::to_string(r + 1) + " has wrong field count");
    table.index.push_back(month_index(parse_date(rows[r][0])));
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(rows[r][c].c_str(), &end);
      if (end == rows[r][c].c_str() || *end != '\0')
        throw DataError("dataset CSV: unparseable value '" + rows[r][c] + "'");
      table.columns[c - 1].push_back(v);
    }
  }
  for (std::size_t i = 1; i < table.index.size(); ++i)
    if (table.index[i] != table.index[i - 1] + 1)
      throw DataError("dataset CSV month index not contiguous: " + path);
  if (!target.empty()) {
    if (table.col_index(target) < 0)
      throw DataError("dataset CSV missing target column '" + target + "'");
    table.target_name = target;
  }
  return table;
}

void write_table_csv(const SeriesTable& table, const std::string& path) {
  CsvWriter w(path);
  std::vector<std::string> header{"date"};
  header.insert(header.end(), table.names.begin(), table.names.end());
  w.row(header);
  for (int r = 0; r < table.rows(); ++r) {
    std::vector<std::string> fields{format_month(table.index[r])};
    for (int c = 0; c < table.cols(); ++c) fields.push_back(format_double(table.columns[c][r]));
    w.row(fields);
  }
}

}  // namespace regimecast
