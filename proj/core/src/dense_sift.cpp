#include "rpbof/dense_sift.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace rpbof {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kBinWidth = kTwoPi / PatchGridParams::kBins;  // pi/4
constexpr double kClamp = 0.2;
}  // namespace

void PatchGridParams::validate() const {
  if (patch_sizes.empty()) throw ConfigError("no patch sizes given");
  for (const int s : patch_sizes) {
    if (s < 4 || s % 4 != 0)
      throw ConfigError("patch size " + std::to_string(s) +
                        " must be a positive multiple of 4");
  }
  if (stride < 1) throw ConfigError("stride must be >= 1");
}

GradientField gradient_field(const Eigen::MatrixXd& img) {
  const int rows = static_cast<int>(img.rows());
  const int cols = static_cast<int>(img.cols());
  if (rows < 3 || cols < 3)
    throw DataError("gradient_field: image side must be >= 3");

  GradientField f;
  f.magnitude.resize(rows, cols);
  f.orientation.resize(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double gx, gy;
      if (c == 0)
        gx = img(r, 1) - img(r, 0);
      else if (c == cols - 1)
        gx = img(r, cols - 1) - img(r, cols - 2);
      else
        gx = (img(r, c + 1) - img(r, c - 1)) * 0.5;
      if (r == 0)
        gy = img(1, c) - img(0, c);
      else if (r == rows - 1)
        gy = img(rows - 1, c) - img(rows - 2, c);
      else
        gy = (img(r + 1, c) - img(r - 1, c)) * 0.5;

      f.magnitude(r, c) = std::sqrt(gx * gx + gy * gy);
      double theta = std::atan2(gy, gx);
      if (theta < 0.0) theta += kTwoPi;
      if (theta >= kTwoPi) theta = 0.0;
      f.orientation(r, c) = theta;
    }
  }
  return f;
}

Eigen::VectorXd describe_patch(const GradientField& field, int center_row,
                               int center_col, int patch_size) {
  const int half = patch_size / 2;
  const int r0 = center_row - half;
  const int c0 = center_col - half;
  if (r0 < 0 || c0 < 0 || r0 + patch_size > field.rows() ||
      c0 + patch_size > field.cols())
    throw DataError("describe_patch: patch out of bounds");

  const int cell = patch_size / PatchGridParams::kCellGrid;
  Eigen::VectorXd desc = Eigen::VectorXd::Zero(PatchGridParams::kDims);
  for (int dr = 0; dr < patch_size; ++dr) {
    const int cell_r = dr / cell;
    for (int dc = 0; dc < patch_size; ++dc) {
      const double mag = field.magnitude(r0 + dr, c0 + dc);
      if (mag == 0.0) continue;
      const int cell_c = dc / cell;
      const double t = field.orientation(r0 + dr, c0 + dc) / kBinWidth;
      int b0 = static_cast<int>(t);  // orientation in [0,2pi) => t in [0,8)
      const double w1 = t - b0;
      b0 %= PatchGridParams::kBins;
      const int b1 = (b0 + 1) % PatchGridParams::kBins;
      const int base =
          (cell_r * PatchGridParams::kCellGrid + cell_c) * PatchGridParams::kBins;
      desc[base + b0] += mag * (1.0 - w1);
      desc[base + b1] += mag * w1;
    }
  }

  const double norm = desc.norm();
  if (norm == 0.0) return desc;
  desc /= norm;
  desc = desc.cwiseMin(kClamp);
  desc /= desc.norm();
  return desc;
}

DescriptorSet dense_descriptors(const RecurrenceImage& img,
                                const PatchGridParams& p) {
  p.validate();
  const int side = img.side();
  int smallest = p.patch_sizes.front();
  for (const int s : p.patch_sizes) smallest = std::min(smallest, s);
  if (side < smallest)
    throw DataError("image side " + std::to_string(side) +
                    " smaller than every patch size");

  const GradientField field = gradient_field(img);

  std::vector<Eigen::VectorXd> kept;
  std::vector<PatchKey> keys;
  for (const int s : p.patch_sizes) {
    if (s > side) {
      std::cerr << "rpbof: skipping patch size " << s << " on " << side << "x"
                << side << " image\n";
      continue;
    }
    const int first = s / 2;
    const int last = side - s / 2;
    for (int r = first; r <= last; r += p.stride) {
      for (int c = first; c <= last; c += p.stride) {
        Eigen::VectorXd d = describe_patch(field, r, c, s);
        if (d.isZero(0.0)) continue;  // flat patch
        kept.push_back(std::move(d));
        keys.push_back({r, c, s});
      }
    }
  }

  DescriptorSet set;
  set.patches = std::move(keys);
  set.vectors.resize(static_cast<Eigen::Index>(kept.size()),
                     PatchGridParams::kDims);
  for (std::size_t i = 0; i < kept.size(); ++i)
    set.vectors.row(static_cast<Eigen::Index>(i)) = kept[i].transpose();
  return set;
}

void write_descriptor_dump(const std::filesystem::path& path, int image_id,
                           const DescriptorSet& set) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  for (Eigen::Index i = 0; i < set.count(); ++i) {
    const auto& key = set.patches[static_cast<std::size_t>(i)];
    out << image_id << ',' << key.scale << ',' << key.row << ',' << key.col;
    for (Eigen::Index j = 0; j < set.vectors.cols(); ++j) {
      const int n = std::snprintf(buf, sizeof buf, "%.17g", set.vectors(i, j));
      out << ',';
      out.write(buf, n);
    }
    out << '\n';
  }
}

}  // namespace rpbof
