#pragma once

#include <cstdint>

#include "rpbof/timeseries.hpp"

namespace rpbof {

// Cylinder-Bell-Funnel generator (three classes, labels 1/2/3). Each
// series is (6+eta)*g(t)*chi_[a,b](t) + eps(t) with eta, eps ~ N(0,1),
// g = 1 / ramp-up / ramp-down, a ~ U[l/8, l/4], b-a ~ U[l/4, 3l/4].
// With length=128 this is the classic parameterization. Deterministic
// for a fixed seed.
Dataset make_cbf(int train_per_class, int test_per_class, int length,
                 std::uint64_t seed);

// Writes <name>_TRAIN / <name>_TEST under root in the UCR text format.
void materialize_dataset(const Dataset& d, const std::filesystem::path& root);

}  // namespace rpbof
