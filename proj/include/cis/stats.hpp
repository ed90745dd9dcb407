#ifndef CIS_STATS_HPP
#define CIS_STATS_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cis::stats {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Sample standard deviation, divisor n - 1; 0 for fewer than two values.
inline double sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

inline double standard_error(const std::vector<double>& x) {
  return x.empty() ? std::nan("") : sd(x) / std::sqrt(static_cast<double>(x.size()));
}

// Linear interpolation between order statistics (R type 7).
inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) return std::nan("");
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double median(const std::vector<double>& x) { return quantile(x, 0.5); }

inline double iqr(const std::vector<double>& x) { return quantile(x, 0.75) - quantile(x, 0.25); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace cis::stats

#endif  // CIS_STATS_HPP
