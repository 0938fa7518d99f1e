#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>

#include "rpbof/timeseries.hpp"

namespace rpbof {

enum class DistanceNorm { euclidean, manhattan, chebyshev };

struct EmbeddingParams {
  int m = 3;    // phase-space dimension
  int tau = 4;  // embedding delay
  std::optional<double> epsilon;  // absent => gray-level image
  // interpret epsilon as a fraction of each image's maximum state distance
  // (i.e. a threshold on the normalized gray image)
  bool epsilon_relative = false;
  DistanceNorm norm = DistanceNorm::euclidean;

  // Number of embedded states for a series of length l; valid iff >= 2.
  int state_count(int length) const { return length - (m - 1) * tau; }
  void validate() const;
  bool operator==(const EmbeddingParams&) const = default;
};

// Square symmetric gray ([0,1]) or binary ({0,1}) texture image derived
// from one series. Gray convention: 0 = recurrence (identical states),
// 1 = maximal state distance.
struct RecurrenceImage {
  Eigen::MatrixXd pixels;
  enum class Mode { gray, binary } mode = Mode::gray;
  int source_id = -1;

  int side() const { return static_cast<int>(pixels.rows()); }
};

// Delay embedding: row i = (x_i, x_{i+tau}, ..., x_{i+(m-1)tau}), K rows.
// Throws DataError when the series is too short for (m, tau).
Eigen::MatrixXd embed(const TimeSeries& x, const EmbeddingParams& p);

// Pairwise state distances; exactly symmetric, zero diagonal.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& states,
                                DistanceNorm norm = DistanceNorm::euclidean);

// Binary mode (epsilon set): pixel = 1 iff epsilon - d >= 0 (step function
// with theta(0) = 1). Gray mode: d scaled by 1/max(d); all-zero when the
// distance matrix is all-zero.
RecurrenceImage to_recurrence_image(const Eigen::MatrixXd& d,
                                    const EmbeddingParams& p,
                                    int source_id = -1);

// Downsize-only bilinear resampling to max_side x max_side; images that
// already fit are returned unchanged. Sampling uses pixel-center alignment
// with one shared axis map, and the result is mirrored from the upper
// triangle so symmetry stays exact.
RecurrenceImage resize_max_side(const RecurrenceImage& img, int max_side);

// embed + distance_matrix + to_recurrence_image + resize in one call.
RecurrenceImage encode_series(const TimeSeries& x, const EmbeddingParams& p,
                              int max_side);

enum class ImageFormat { pgm, png };

// 8-bit export, pixel byte = round-half-up of p*255. PGM is binary (P5),
// maxval 255, with the rounding rule stated in a header comment.
void export_image(const RecurrenceImage& img, const std::filesystem::path& path,
                  ImageFormat format);

}  // namespace rpbof
