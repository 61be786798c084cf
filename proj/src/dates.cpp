#include "regimecast/dates.hpp"

#include <cstdio>

#include "regimecast/common.hpp"

namespace regimecast {

int month_index(const Date& d) { return d.year * 12 + (d.month - 1); }

Date month_from_index(int idx) {
  Date d;
  d.year = idx / 12;
  d.month = idx % 12 + 1;
  if (d.month <= 0) {  // negative idx
    d.month += 12;
    d.year -= 1;
  }
  d.day = 1;
  return d;
}

Date parse_date(const std::string& s) {
  Date d;
  int n = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%d%n", &d.year, &d.month, &d.day, &n) == 3 &&
      n == static_cast<int>(s.size())) {
    // fallthrough to validation
  } else if (std::sscanf(s.c_str(), "%d-%d%n", &d.year, &d.month, &n) == 2 &&
             n == static_cast<int>(s.size())) {
    d.day = 1;
  } else {
    throw DataError("unparseable date: '" + s + "'");
  }
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw DataError("date out of range: '" + s + "'");
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_month(int month_idx) { return format_date(month_from_index(month_idx)); }

long day_number(const Date& d) {
  // Days since 0000-03-01 (civil-from-days construction).
  int y = d.year;
  int m = d.month;
  if (m <= 2) {
    y -= 1;
    m += 12;
  }
  const long era_days = 365L * y + y / 4 - y / 100 + y / 400;
  const long month_days = (153L * (m - 3) + 2) / 5;
  return era_days + month_days + d.day - 1;
}

}  // namespace regimecast
