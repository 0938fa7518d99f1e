#include "rpbof/synthetic.hpp"

#include <cmath>

namespace rpbof {

namespace {

std::vector<double> cbf_series(int cls, int length, Rng& rng) {
  const double eta = rng.normal();
  const int a_lo = length / 8;
  const int a_hi = length / 4;
  const int w_lo = length / 4;
  const int w_hi = 3 * length / 4;
  const int a = a_lo + static_cast<int>(rng.below(
                           static_cast<std::uint64_t>(a_hi - a_lo + 1)));
  const int width = w_lo + static_cast<int>(rng.below(
                               static_cast<std::uint64_t>(w_hi - w_lo + 1)));
  const int b = a + width;

  std::vector<double> x(static_cast<std::size_t>(length));
  for (int t = 1; t <= length; ++t) {
    double shape = 0.0;
    if (t >= a && t <= b) {
      switch (cls) {
        case 1: shape = 1.0; break;                                            // cylinder
        case 2: shape = static_cast<double>(t - a) / (b - a); break;           // bell
        default: shape = static_cast<double>(b - t) / (b - a); break;          // funnel
      }
    }
    x[static_cast<std::size_t>(t - 1)] = (6.0 + eta) * shape + rng.normal();
  }
  return x;
}

std::vector<TimeSeries> cbf_split(int per_class, int length, Rng& rng) {
  std::vector<TimeSeries> out;
  out.reserve(static_cast<std::size_t>(per_class) * 3);
  int id = 0;
  for (int i = 0; i < per_class; ++i) {
    for (int cls = 1; cls <= 3; ++cls) {
      TimeSeries ts;
      ts.values = cbf_series(cls, length, rng);
      ts.label = cls;
      ts.id = id++;
      z_normalize(ts);  // archive series are distributed pre-normalized
      out.push_back(std::move(ts));
    }
  }
  return out;
}

}  // namespace

Dataset make_cbf(int train_per_class, int test_per_class, int length,
                 std::uint64_t seed) {
  if (train_per_class < 1 || test_per_class < 1 || length < 16)
    throw ConfigError("make_cbf: bad sizes");
  Rng rng(sub_seed(seed, 0xCBF));
  Dataset d;
  d.name = "CBF";
  d.labels = LabelMap::from_raw({1, 2, 3});
  d.class_count = 3;
  d.train = cbf_split(train_per_class, length, rng);
  d.test = cbf_split(test_per_class, length, rng);
  d.declared_length = length;
  return d;
}

void materialize_dataset(const Dataset& d, const std::filesystem::path& root) {
  std::filesystem::create_directories(root);
  save_ucr_file(root / (d.name + "_TRAIN"), d.train, d.labels);
  save_ucr_file(root / (d.name + "_TEST"), d.test, d.labels);
}

}  // namespace rpbof
