#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "macroflow/error.hpp"

namespace macroflow {

// Nearest-rank percentile: the value at rank ceil(p/100 * n) of the sorted
// sample (rank 1 for p = 0). Throws EmptyInputError on an empty sample.
template <typename T>
T nearest_rank(std::vector<T> values, double percent) {
  if (values.empty()) throw EmptyInputError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

// Nearest-rank 50th percentile, i.e. the lower median for even sizes.
template <typename T>
T lower_median(std::vector<T> values) {
  return nearest_rank(std::move(values), 50.0);
}

// Conventional median (mean of the two middle values for even sizes).
inline double median(std::vector<double> values) {
  if (values.empty()) throw EmptyInputError("median of an empty sample");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline double mean(std::span<const double> values) {
  if (values.empty()) throw EmptyInputError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace macroflow
