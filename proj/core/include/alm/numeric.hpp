#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace alm {

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_pdf(double x, double mean, double sd) {
  return normal_pdf((x - mean) / sd) / sd;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }
inline double negative_part(double x) { return x < 0.0 ? -x : 0.0; }

// Sample mean and standard error, summed in index order.
struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

inline SampleStats sample_stats(std::span<const double> x) {
  SampleStats s;
  s.n = x.size();
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : x) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.se = s.sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

}  // namespace alm
