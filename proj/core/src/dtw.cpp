#include "rpbof/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rpbof/common.hpp"

namespace rpbof {

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError("squared_euclidean: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<double> window) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) throw DataError("dtw_distance: empty series");

  std::size_t radius = std::max(n, m);  // full window
  if (window) {
    if (*window <= 0.0 || *window > 1.0)
      throw ConfigError("dtw window fraction must be in (0,1]");
    radius = static_cast<std::size_t>(
        std::ceil(*window * static_cast<double>(std::max(n, m))));
    // a band narrower than the length difference has no admissible path
    radius = std::max(radius, n > m ? n - m : m - n);
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, inf), curr(m, inf);

  auto cost = [&](std::size_t i, std::size_t j) {
    const double d = a[i] - b[j];
    return d * d;
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::fill(curr.begin(), curr.end(), inf);
    const std::size_t j_lo = i > radius ? i - radius : 0;
    const std::size_t j_hi = std::min(m - 1, i + radius);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
      const double c = cost(i, j);
      if (i == 0 && j == 0) {
        curr[j] = c;
      } else if (i == 0) {
        curr[j] = c + curr[j - 1];
      } else if (j == 0) {
        curr[j] = c + prev[0];
      } else {
        curr[j] = c + std::min({prev[j - 1], prev[j], curr[j - 1]});
      }
    }
    std::swap(prev, curr);
  }
  return prev[m - 1];
}

}  // namespace rpbof
