#pragma once

#include <optional>
#include <span>

namespace rpbof {

// Dynamic time warping with squared-difference local cost. window, when
// given, is the Sakoe-Chiba band as a fraction of the series length
// (radius = ceil(window * max(n, m)) cells off the diagonal).
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    std::optional<double> window = std::nullopt);

double squared_euclidean(std::span<const double> a, std::span<const double> b);

}  // namespace rpbof
