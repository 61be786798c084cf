#pragma once

#include <string>
#include <vector>

namespace regimecast {
namespace svg {

struct Series {
  std::string name;
  std::vector<double> values;
};

// Deterministic renderings: fixed canvas, fixed palette, no timestamps.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<std::string>& x_labels,
                      const std::vector<Series>& series);

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& labels,
                     const std::vector<double>& values);

// Band polygon between lower/upper with the point path on top.
void write_fan_chart(const std::string& path, const std::string& title,
                     const std::vector<std::string>& x_labels,
                     const std::vector<double>& point, const std::vector<double>& lower,
                     const std::vector<double>& upper);

}  // namespace svg
}  // namespace regimecast
