#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "rpbof/recurrence.hpp"

namespace rpbof {

// Multi-scale dense sampling grid. Patches are upright (no keypoint
// detection, no dominant-orientation rotation) and spaced `stride` pixels
// apart at every scale.
struct PatchGridParams {
  std::vector<int> patch_sizes{16, 24, 32, 48};
  int stride = 8;

  static constexpr int kCellGrid = 4;  // 4x4 spatial cells
  static constexpr int kBins = 8;      // orientation bins over [0, 2pi)
  static constexpr int kDims = kCellGrid * kCellGrid * kBins;  // 128

  void validate() const;
  bool operator==(const PatchGridParams&) const = default;
};

// Per-pixel gradient magnitude and orientation (radians in [0, 2pi),
// 0 pointing toward +col). Central differences in the interior, one-sided
// at the borders.
struct GradientField {
  Eigen::MatrixXd magnitude;
  Eigen::MatrixXd orientation;

  int rows() const { return static_cast<int>(magnitude.rows()); }
  int cols() const { return static_cast<int>(magnitude.cols()); }
};

GradientField gradient_field(const Eigen::MatrixXd& img);
inline GradientField gradient_field(const RecurrenceImage& img) {
  return gradient_field(img.pixels);
}

struct PatchKey {
  int row = 0;    // patch center
  int col = 0;
  int scale = 0;  // originating patch size
};

// Descriptors stacked as rows (N x 128) plus their grid provenance.
struct DescriptorSet {
  Eigen::MatrixXd vectors;
  std::vector<PatchKey> patches;

  Eigen::Index count() const { return vectors.rows(); }
};

// One 128-dim gradient-orientation histogram: 4x4 cells x 8 bins, votes
// weighted by magnitude and shared linearly between the two nearest bin
// centers; l2-normalized, components clamped at 0.2, renormalized.
// A patch with zero total magnitude yields the all-zero vector.
Eigen::VectorXd describe_patch(const GradientField& field, int center_row,
                               int center_col, int patch_size);

// All patches over the multi-scale grid, scale-major then row-major.
// Scales that do not fit the image are skipped (with a warning on stderr);
// all-zero descriptors are dropped. Throws DataError when the image is
// smaller than every patch size.
DescriptorSet dense_descriptors(const RecurrenceImage& img,
                                const PatchGridParams& p);

// Text dump for cross-implementation comparison: one line per descriptor,
// "image_id,scale,row,col,v0,...,v127".
void write_descriptor_dump(const std::filesystem::path& path, int image_id,
                           const DescriptorSet& set);

}  // namespace rpbof
