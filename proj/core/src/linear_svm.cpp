#include "rpbof/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace rpbof {

int LinearModel::predict(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd s = scores(x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < s.size(); ++k)
    if (s[k] > s[best]) best = k;
  return static_cast<int>(best) + 1;
}

std::vector<double> default_c_grid() {
  std::vector<double> grid(10);
  for (int k = 0; k < 10; ++k)
    grid[static_cast<std::size_t>(k)] =
        std::pow(2.0, -10.0 + 20.0 * k / 9.0);
  return grid;
}

BinarySvm train_binary(const Eigen::MatrixXd& X, const std::vector<int>& y,
                       double C, std::uint64_t seed, const SvmOptions& opts) {
  const auto n = X.rows();
  if (n == 0 || static_cast<std::size_t>(n) != y.size())
    throw DataError("train_binary: label/sample size mismatch");
  if (C <= 0.0) throw ConfigError("C must be > 0");
  bool has_pos = false, has_neg = false;
  for (const int yi : y) {
    if (yi == 1) has_pos = true;
    else if (yi == -1) has_neg = true;
    else throw DataError("train_binary: labels must be +1/-1");
  }
  if (!has_pos || !has_neg)
    throw DataError("train_binary: both classes must be present");

  const Eigen::Index dim = X.cols() + (opts.use_bias ? 1 : 0);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);

  Eigen::VectorXd qii = X.rowwise().squaredNorm();
  if (opts.use_bias) qii.array() += 1.0;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(sub_seed(seed, 0x55F31A01));

  int epoch = 0;
  for (; epoch < opts.max_epochs; ++epoch) {
    rng.shuffle(order);
    double max_violation = 0.0;
    for (const Eigen::Index i : order) {
      const double yi = static_cast<double>(y[static_cast<std::size_t>(i)]);
      double margin = w.head(X.cols()).dot(X.row(i));
      if (opts.use_bias) margin += w[dim - 1];
      const double G = yi * margin - 1.0;

      double pg = G;
      if (alpha[i] <= 0.0)
        pg = std::min(G, 0.0);
      else if (alpha[i] >= C)
        pg = std::max(G, 0.0);
      max_violation = std::max(max_violation, std::abs(pg));
      if (pg == 0.0) continue;

      double next;
      if (qii[i] > 0.0)
        next = std::clamp(alpha[i] - G / qii[i], 0.0, C);
      else
        next = G < 0.0 ? C : 0.0;  // zero feature vector
      const double delta = next - alpha[i];
      if (delta != 0.0) {
        w.head(X.cols()) += delta * yi * X.row(i).transpose();
        if (opts.use_bias) w[dim - 1] += delta * yi;
        alpha[i] = next;
      }
    }
    if (max_violation < opts.tol) {
      ++epoch;
      break;
    }
  }

  BinarySvm out;
  out.w = w.head(X.cols());
  out.bias = opts.use_bias ? w[dim - 1] : 0.0;
  out.alpha = std::move(alpha);
  out.epochs = epoch;
  return out;
}

LinearModel train_ova(const Eigen::MatrixXd& X, const std::vector<int>& y,
                      double C, const LabelMap& class_map, std::uint64_t seed,
                      const SvmOptions& opts) {
  const int n_classes = class_map.class_count();
  if (n_classes < 2) throw DataError("train_ova: need at least 2 classes");
  std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
  for (const int yi : y) {
    if (yi < 1 || yi > n_classes)
      throw DataError("train_ova: label out of range");
    counts[static_cast<std::size_t>(yi - 1)]++;
  }
  for (int k = 0; k < n_classes; ++k)
    if (counts[static_cast<std::size_t>(k)] == 0)
      throw DataError("train_ova: class " + std::to_string(k + 1) +
                      " has no samples");

  LinearModel model;
  model.weights.resize(n_classes, X.cols());
  model.biases = Eigen::VectorXd::Zero(n_classes);
  model.C = C;
  model.class_map = class_map;

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n_classes; ++k) {
    std::vector<int> yk(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      yk[i] = (y[i] == k + 1) ? 1 : -1;
    const BinarySvm svm =
        train_binary(X, yk, C, sub_seed(seed, 0x07A00000ULL + static_cast<std::uint64_t>(k)), opts);
    model.weights.row(k) = svm.w.transpose();
    model.biases[k] = svm.bias;
  }
  return model;
}

std::vector<int> stratified_fold_assignment(const std::vector<int>& y,
                                            int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds");
  int max_label = 0;
  for (const int yi : y) max_label = std::max(max_label, yi);
  std::vector<std::vector<std::size_t>> by_class(
      static_cast<std::size_t>(max_label) + 1);
  for (std::size_t i = 0; i < y.size(); ++i)
    by_class[static_cast<std::size_t>(y[i])].push_back(i);

  Rng rng(sub_seed(seed, 0xF01D5));
  std::vector<int> fold_of(y.size(), 0);
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j)
      fold_of[members[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

double cv_accuracy(const Eigen::MatrixXd& X, const std::vector<int>& y,
                   const LabelMap& class_map, double C, int folds,
                   std::uint64_t seed, const SvmOptions& opts) {
  const auto fold_of = stratified_fold_assignment(y, folds, seed);
  double acc_sum = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (fold_of[i] == f)
        va.push_back(static_cast<Eigen::Index>(i));
      else
        tr.push_back(static_cast<Eigen::Index>(i));
    }
    Eigen::MatrixXd Xtr(static_cast<Eigen::Index>(tr.size()), X.cols());
    std::vector<int> ytr(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
      Xtr.row(static_cast<Eigen::Index>(i)) = X.row(tr[i]);
      ytr[i] = y[static_cast<std::size_t>(tr[i])];
    }
    const LinearModel m =
        train_ova(Xtr, ytr, C, class_map,
                  sub_seed(seed, 0xCF01D000ULL + static_cast<std::uint64_t>(f)), opts);
    int hits = 0;
    for (const auto i : va)
      if (m.predict(X.row(i).transpose()) == y[static_cast<std::size_t>(i)])
        ++hits;
    acc_sum += va.empty() ? 0.0
                          : static_cast<double>(hits) /
                                static_cast<double>(va.size());
  }
  return acc_sum / static_cast<double>(folds);
}

double select_C(const Eigen::MatrixXd& X, const std::vector<int>& y,
                const LabelMap& class_map, const CvPlan& plan,
                const SvmOptions& opts) {
  std::vector<int> counts(static_cast<std::size_t>(class_map.class_count()), 0);
  for (const int yi : y) counts[static_cast<std::size_t>(yi - 1)]++;
  int min_count = *std::min_element(counts.begin(), counts.end());
  int folds = plan.folds;
  if (min_count < folds) {
    folds = min_count;
    std::cerr << "rpbof: reducing CV folds to " << folds
              << " (smallest class count)\n";
  }
  if (folds < 2) throw DataError("select_C: fewer than 2 usable folds");

  const std::vector<double> grid =
      plan.c_grid.empty() ? default_c_grid() : plan.c_grid;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ConfigError("C grid must be strictly increasing");
  double best_c = grid.front();
  double best_acc = -1.0;
  for (const double c : grid) {  // ascending grid: ties keep the smaller C
    const double acc = cv_accuracy(X, y, class_map, c, folds, plan.seed, opts);
    if (acc > best_acc) {
      best_acc = acc;
      best_c = c;
    }
  }
  return best_c;
}

}  // namespace rpbof
