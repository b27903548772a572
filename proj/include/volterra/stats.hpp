#pragma once

#include <cstddef>
#include <vector>

namespace volterra {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;        // unbiased (n-1 denominator)
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t n = 0;
};

// Two-pass moment estimates; needs at least 2 samples (4 for meaningful
// higher moments, which are 0 when the variance vanishes).
Moments sample_moments(const std::vector<double>& xs);

// Least-squares slope of y against x; needs >= 2 distinct x values.
double lsq_slope(const std::vector<double>& x, const std::vector<double>& y);

// Pearson correlation; 0 when either side is degenerate.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace volterra
