#pragma once

#include <compare>
#include <string>

namespace regimecast {

// Calendar date at day precision; monthlyic series use day = 1.
struct Date {
  int year = 0;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;
};

// Months since year 0; the key for monthly indexing.
int month_index(const Date& d);
Date month_from_index(int idx);

// Accepts YYYY-MM-DD or YYYY-MM.
Date parse_date(const std::string& s);

std::string format_date(const Date& d);       // YYYY-MM-DD
std::string format_month(int month_idx);      // YYYY-MM-01

// Whole days between two dates (b - a), proleptic Gregorian.
long day_number(const Date& d);

}  // namespace regimecast
