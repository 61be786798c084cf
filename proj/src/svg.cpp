#include "regimecast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "regimecast/common.hpp"

namespace regimecast {
namespace svg {

namespace {

constexpr double kWidth = 860, kHeight = 420;
constexpr double kLeft = 64, kRight = 20, kTop = 40, kBottom = 48;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Canvas {
  std::ofstream out;
  double y_min = 0, y_max = 1;

  explicit Canvas(const std::string& path) : out(path, std::ios::binary) {
    if (!out) throw DataError("cannot write " + path);
  }

  void open(const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  }

  void set_range(double lo, double hi) {
    if (!(hi > lo)) {
      hi = lo + 1;
      lo = lo - 1;
    }
    const double pad = 0.05 * (hi - lo);
    y_min = lo - pad;
    y_max = hi + pad;
  }

  double x_at(double frac) const { return kLeft + frac * (kWidth - kLeft - kRight); }
  double y_at(double v) const {
    const double frac = (v - y_min) / (y_max - y_min);
    return kHeight - kBottom - frac * (kHeight - kTop - kBottom);
  }

  std::string fmt(double v) const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
  }

  void axes() {
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double v = y_min + (y_max - y_min) * i / 4.0;
      const double y = y_at(v);
      out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << y << "\" x2=\"" << kWidth - kRight
          << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v)
          << "</text>\n";
    }
  }

  void x_ticks(const std::vector<std::string>& labels) {
    if (labels.empty()) return;
    const int ticks = std::min<int>(8, static_cast<int>(labels.size()));
    for (int i = 0; i < ticks; ++i) {
      const std::size_t idx = labels.size() == 1
                                  ? 0
                                  : static_cast<std::size_t>(
                                        std::llround(static_cast<double>(i) *
                                                     (labels.size() - 1) / (ticks - 1)));
      const double frac =
          labels.size() == 1 ? 0.0 : static_cast<double>(idx) / (labels.size() - 1);
      out << "<text x=\"" << x_at(frac) << "\" y=\"" << kHeight - kBottom + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << labels[idx] << "</text>\n";
    }
  }

  void polyline(const std::vector<double>& values, const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", x_at(frac), y_at(values[i]));
      out << buf;
    }
    out << "\"/>\n";
  }

  void close() { out << "</svg>\n"; }
};

void range_of(const std::vector<double>& values, double& lo, double& hi) {
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<std::string>& x_labels,
                      const std::vector<Series>& series) {
  Canvas c(path);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) range_of(s.values, lo, hi);
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  c.open(title);
  c.set_range(lo, hi);
  c.axes();
  c.x_ticks(x_labels);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % 6];
    c.polyline(series[i].values, color);
    c.out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 * (i + 1)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
          << color << "\">" << series[i].name << "</text>\n";
  }
  c.close();
}

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values) {
  Canvas c(path);
  double lo = 0, hi = 0;
  range_of(values, lo, hi);
  c.open(title);
  c.set_range(lo, hi);
  c.axes();
  const double span = kWidth - kLeft - kRight;
  const double slot = span / std::max<std::size_t>(1, values.size());
  const double bar = slot * 0.7;
  const double zero_y = c.y_at(0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = kLeft + slot * i + (slot - bar) / 2;
    const double y = c.y_at(values[i]);
    const double top = std::min(y, zero_y);
    const double height = std::abs(y - zero_y);
    c.out << "<rect x=\"" << x << "\" y=\"" << top << "\" width=\"" << bar << "\" height=\""
          << height << "\" fill=\"" << (values[i] >= 0 ? kPalette[0] : kPalette[1])
          << "\"/>\n";
    c.out << "<text x=\"" << x + bar / 2 << "\" y=\"" << kHeight - kBottom + 16
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" "
          << "transform=\"rotate(-35 " << x + bar / 2 << " " << kHeight - kBottom + 16
          << ")\">" << (i < labels.size() ? labels[i] : "") << "</text>\n";
  }
  c.close();
}

void write_fan_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& x_labels,
                     const std::vector<double>& point, const std::vector<double>& lower,
                     const std::vector<double>& upper) {
  Canvas c(path);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  range_of(point, lo, hi);
  range_of(lower, lo, hi);
  range_of(upper, lo, hi);
  if (!std::isfinite(lo)) {
    lo = 0;
    hi = 1;
  }
  c.open(title);
  c.set_range(lo, hi);
  c.axes();
  c.x_ticks(x_labels);
  const std::size_t n = point.size();
  c.out << "<polygon fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", c.x_at(frac), c.y_at(upper[i]));
    c.out << buf;
  }
  for (std::size_t i = n; i-- > 0;) {
    const double frac = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", c.x_at(frac), c.y_at(lower[i]));
    c.out << buf;
  }
  c.out << "\"/>\n";
  c.polyline(point, kPalette[0]);
  c.close();
}

}  // namespace svg
}  // namespace regimecast
