#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "rpbof/timeseries.hpp"

namespace rpbof {

// One-vs-all linear decision functions over pooled feature vectors.
struct LinearModel {
  Eigen::MatrixXd weights;  // N_c x dim
  Eigen::VectorXd biases;   // N_c (zero unless bias training is enabled)
  double C = 1.0;
  LabelMap class_map;

  int class_count() const { return static_cast<int>(weights.rows()); }
  Eigen::VectorXd scores(const Eigen::VectorXd& x) const {
    return weights * x + biases;
  }
  // argmax of the per-class margins; ties go to the lower class index.
  int predict(const Eigen::VectorXd& x) const;
};

struct CvPlan {
  int folds = 5;
  std::vector<double> c_grid;  // empty => default_c_grid()
  std::uint64_t seed = 0;
  bool operator==(const CvPlan&) const = default;
};

// 10 logarithmically equally spaced values from 2^-10 to 2^10, endpoints
// inclusive (consecutive ratio 2^(20/9)).
std::vector<double> default_c_grid();

struct SvmOptions {
  double tol = 1e-4;      // max projected-gradient (KKT) violation
  int max_epochs = 1000;
  bool use_bias = false;  // augmented-feature bias; off by default so the
                          // feature-scaling equivalence holds exactly
  bool operator==(const SvmOptions&) const = default;
};

struct BinarySvm {
  Eigen::VectorXd w;
  double bias = 0.0;
  Eigen::VectorXd alpha;  // dual variables, for KKT checks
  int epochs = 0;
};

// L1-loss (hinge) soft-margin SVM trained by dual coordinate descent with
// box constraint [0, C]; coordinate order reshuffled per epoch from seed.
// y entries must be +1/-1 with both classes present.
BinarySvm train_binary(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       double C, std::uint64_t seed,
                       const SvmOptions& opts = {});

// N_c binary problems, class k against the rest.
LinearModel train_ova(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      double C, const LabelMap& class_map, std::uint64_t seed,
                      const SvmOptions& opts = {});

// Stratified fold ids (0..folds-1) per sample: indices of each class are
// shuffled and dealt round-robin.
std::vector<int> stratified_fold_assignment(const std::vector<int>& y,
                                            int folds, std::uint64_t seed);

// Stratified cross-validated accuracy of one-vs-all training at a given C.
double cv_accuracy(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   const LabelMap& class_map, double C, int folds,
                   std::uint64_t seed, const SvmOptions& opts = {});

// Highest mean CV accuracy over the grid; ties resolved toward smaller C.
// Folds are reduced (with a warning) to the smallest class count when a
// class has fewer samples than requested folds.
double select_C(const Eigen::MatrixXd& X, const std::vector<int>& y,
                const LabelMap& class_map, const CvPlan& plan,
                const SvmOptions& opts = {});

}  // namespace rpbof
