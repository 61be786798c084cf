#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace regimecast {

// Error categories; the CLI maps them to distinct exit codes
// (config = 2, data = 3, numeric degeneracy = 4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Quantile with linear interpolation between order statistics (R type 7,
// numpy default). `sorted` must be ascending and non-empty, p in [0,1].
double quantile_sorted(const std::vector<double>& sorted, double p);

// Convenience: copies, sorts, then interpolates.
double quantile(std::vector<double> values, double p);

// FNV-1a 64-bit over raw bytes; used for weight checksums.
std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 1469598103934665603ull);

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

// Fixed-precision formatting for report tables.
std::string format_fixed(double v, int digits);

}  // namespace regimecast
