#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "rpbof/common.hpp"

namespace rpbof {

// Visual dictionary: M words stacked as rows (M x dims).
struct Codebook {
  Eigen::MatrixXd words;
  enum class Provenance { initial, optimized } provenance = Provenance::initial;
  std::uint64_t rng_seed = 0;

  struct OptimizeParams {
    double mu_reg = 0.0;
    double sigma = 0.0;
    int passes = 0;
  };
  std::optional<OptimizeParams> optimized_with;

  int size() const { return static_cast<int>(words.rows()); }
  int dims() const { return static_cast<int>(words.cols()); }
};

struct LlcParams {
  int knn = 5;
  double sigma = 1.0;        // locality bandwidth
  double mu_reg = 500.0;     // locality regularization weight
  double bias_cutoff = 0.01; // active-set threshold on |c_j|
  double ridge = 1e-8;       // scaled by trace(C) in the constrained solve

  void validate(int codebook_size) const;
  bool operator==(const LlcParams&) const = default;
};

// Lloyd's k-means with k-means++ seeding. Runs until the assignment is a
// fixpoint or max_iters; empty clusters are reseeded to the point farthest
// from its assigned centroid. Bit-deterministic for a fixed seed.
// objective_trace, when given, receives the within-cluster sum of squares
// after each assignment step.
Codebook kmeans(const Eigen::MatrixXd& bag, int M, int max_iters,
                std::uint64_t seed, std::vector<double>* objective_trace = nullptr);

// Per-word locality adaptor: exp(-||s - w_j||^2 / sigma), divided by its
// maximum so the nearest word maps to exactly 1.
Eigen::VectorXd locality_adaptor(const Eigen::VectorXd& s, const Codebook& D,
                                 double sigma);

// Locality-constrained code: the knn nearest words (ties to the lower
// index) reconstruct s under a sum-to-one constraint, solved with the
// covariance trick; the knn coefficients are scattered into an M-vector.
Eigen::VectorXd llc_code(const Eigen::VectorXd& s, const Codebook& D,
                         const LlcParams& p);

// Full-dictionary locality-regularized sum-to-one code, the coding step of
// the incremental optimizer: argmin ||s - D^T c||^2 + mu_reg ||d (.) c||^2
// where d_j = exp((||s-w_j||^2 - max_k ||s-w_k||^2) / sigma) in (0,1],
// 1 at the farthest word. Distant words are penalized, so large mu_reg
// concentrates the code on the adaptor-maximal (nearest) words.
Eigen::VectorXd llc_code_regularized(const Eigen::VectorXd& s,
                                     const Codebook& D, const LlcParams& p);

struct OptimizeStats {
  int visited = 0;
  int skipped_empty_active = 0;  // descriptors whose active set was empty
};

// Single-pass (by default) incremental dictionary update. Per descriptor,
// in seed-shuffled order: solve the locality-regularized sum-to-one code
// over the full dictionary (see llc_code_regularized), keep words with
// |c_j| > bias_cutoff, refit an unregularized constrained code on those,
// and move them along the reconstruction-residual gradient with step
// sqrt(1/i), projecting each updated word onto the unit l2 ball.
Codebook optimize_codebook(const Codebook& init, const Eigen::MatrixXd& bag,
                           const LlcParams& p, std::uint64_t seed,
                           int passes = 1, OptimizeStats* stats = nullptr);

// Component-wise max over the codes of one image (absolute values unless
// signed_max), then l2 normalization; no codes => all-zero vector.
Eigen::VectorXd pool_image(const Eigen::MatrixXd& codes, bool signed_max = false);

// llc_code over every descriptor row + pooling, without materializing the
// full code matrix. Equals pool_image over the individual codes.
Eigen::VectorXd encode_pooled_feature(const Eigen::MatrixXd& descriptors,
                                      const Codebook& D, const LlcParams& p,
                                      bool signed_max = false);

// Mean squared descriptor-to-nearest-word distance over (at most) the
// first 1000 rows of sample; the data-driven default for sigma.
double auto_sigma(const Eigen::MatrixXd& sample, const Codebook& D);

// Mean unregularized constrained-LS reconstruction error ||s - D_i c||
// of knn-coded descriptors; the dictionary-quality measure used to
// compare initial and optimized codebooks.
double mean_reconstruction_error(const Eigen::MatrixXd& descriptors,
                                 const Codebook& D, const LlcParams& p);

}  // namespace rpbof
