#include "rpbof/codebook.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rpbof {

namespace {

constexpr int kAssignChunk = 1024;  // fixed so seeded runs replay exactly

// Squared distances from each row of chunk to each row of words.
Eigen::MatrixXd pairwise_sq_dist(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                 const Eigen::MatrixXd& words) {
  Eigen::MatrixXd d2 =
      (-2.0 * points * words.transpose()).rowwise() +
      words.rowwise().squaredNorm().transpose();
  d2.colwise() += points.rowwise().squaredNorm();
  return d2.cwiseMax(0.0);
}

// Sum-to-one constrained least squares over the given words (rows):
// B = words - 1*s^T, C = B*B^T + ridge*trace(C)*I (+ penalty on the
// diagonal when given), solve C w = 1, c = w / sum(w). Ridge escalates
// x10 up to 3 times before giving up.
Eigen::VectorXd constrained_solve(const Eigen::MatrixXd& words,
                                  const Eigen::VectorXd& s, double ridge,
                                  const Eigen::VectorXd* diag_penalty = nullptr) {
  const auto k = words.rows();
  if (k == 1) return Eigen::VectorXd::Ones(1);  // constraint forces c = 1

  Eigen::MatrixXd B = words.rowwise() - s.transpose();
  Eigen::MatrixXd C0 = Eigen::MatrixXd::Zero(k, k);
  C0.selfadjointView<Eigen::Lower>().rankUpdate(B);
  C0 = C0.selfadjointView<Eigen::Lower>();
  const double tr = C0.trace();  // reconstruction part only; the penalty
                                 // diagonal needs no stabilization
  if (diag_penalty) C0.diagonal() += *diag_penalty;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);

  double lambda = ridge;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Eigen::MatrixXd C = C0;
    C.diagonal().array() += lambda * tr;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(C);
    if (ldlt.info() == Eigen::Success) {
      const Eigen::VectorXd w = ldlt.solve(ones);
      const double sum = w.sum();
      if (w.allFinite() && sum != 0.0 &&
          (C * w - ones).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, tr)) {
        return w / sum;
      }
    }
    lambda *= 10.0;
  }
  throw NumericError(
      "constrained LLC solve is singular (duplicated codebook words?)");
}

std::vector<Eigen::Index> knn_indices(const Eigen::VectorXd& sq_dists, int knn) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(sq_dists.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + knn, idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      if (sq_dists[a] != sq_dists[b])
                        return sq_dists[a] < sq_dists[b];
                      return a < b;  // ties to the lower word index
                    });
  idx.resize(static_cast<std::size_t>(knn));
  return idx;
}

}  // namespace

void LlcParams::validate(int codebook_size) const {
  if (knn < 1) throw ConfigError("knn must be >= 1");
  if (knn > codebook_size)
    throw ConfigError("knn " + std::to_string(knn) + " exceeds codebook size " +
                      std::to_string(codebook_size));
  if (sigma <= 0.0) throw ConfigError("sigma must be > 0");
  if (mu_reg < 0.0) throw ConfigError("mu_reg must be >= 0");
  if (ridge < 0.0) throw ConfigError("ridge must be >= 0");
}

Codebook kmeans(const Eigen::MatrixXd& bag, int M, int max_iters,
                std::uint64_t seed, std::vector<double>* objective_trace) {
  const auto n = bag.rows();
  const auto dims = bag.cols();
  if (M < 2) throw ConfigError("codebook size must be >= 2");
  if (n < M)
    throw DataError("bag of " + std::to_string(n) +
                    " descriptors smaller than codebook size " +
                    std::to_string(M));

  Rng rng(sub_seed(seed, 0xC0DEB00C));

  // k-means++ seeding
  Eigen::MatrixXd centroids(M, dims);
  std::vector<char> is_centroid(static_cast<std::size_t>(n), 0);
  Eigen::Index first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = bag.row(first);
  is_centroid[static_cast<std::size_t>(first)] = 1;
  Eigen::VectorXd min_d2 =
      (bag.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < M; ++k) {
    const double total = min_d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= min_d2[i];
        if (target <= 0.0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // all remaining mass zero (duplicate-heavy bag): next unused point
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!is_centroid[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    centroids.row(k) = bag.row(pick);
    is_centroid[static_cast<std::size_t>(pick)] = 1;
    min_d2 = min_d2.cwiseMin(
        (bag.rowwise() - centroids.row(k)).rowwise().squaredNorm());
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  std::vector<int> prev_assign;
  Eigen::VectorXd point_d2(n);

  for (int iter = 0; iter < max_iters; ++iter) {
    // assignment step (chunked; fixed chunk size keeps runs bit-identical)
    for (Eigen::Index start = 0; start < n; start += kAssignChunk) {
      const Eigen::Index count = std::min<Eigen::Index>(kAssignChunk, n - start);
      const Eigen::MatrixXd d2 =
          pairwise_sq_dist(bag.middleRows(start, count), centroids);
      for (Eigen::Index r = 0; r < count; ++r) {
        Eigen::Index best = 0;
        double bestv = d2(r, 0);
        for (Eigen::Index c = 1; c < M; ++c) {
          if (d2(r, c) < bestv) {
            bestv = d2(r, c);
            best = c;
          }
        }
        assign[static_cast<std::size_t>(start + r)] = static_cast<int>(best);
        point_d2[start + r] = bestv;
      }
    }
    if (objective_trace) objective_trace->push_back(point_d2.sum());
    if (assign == prev_assign) break;  // fixpoint
    prev_assign = assign;

    // update step
    centroids.setZero();
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(M);
    for (Eigen::Index i = 0; i < n; ++i) {
      centroids.row(assign[static_cast<std::size_t>(i)]) += bag.row(i);
      counts[assign[static_cast<std::size_t>(i)]] += 1;
    }
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < M; ++k) {
      if (counts[k] > 0) {
        centroids.row(k) /= static_cast<double>(counts[k]);
        continue;
      }
      // empty cluster: reseed to the point farthest from its centroid
      Eigen::Index far = -1;
      double far_d2 = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        if (point_d2[i] > far_d2) {
          far_d2 = point_d2[i];
          far = i;
        }
      }
      centroids.row(k) = bag.row(far);
      taken[static_cast<std::size_t>(far)] = 1;
    }
  }

  Codebook cb;
  cb.words = std::move(centroids);
  cb.provenance = Codebook::Provenance::initial;
  cb.rng_seed = seed;
  return cb;
}

Eigen::VectorXd locality_adaptor(const Eigen::VectorXd& s, const Codebook& D,
                                 double sigma) {
  if (sigma <= 0.0) throw ConfigError("sigma must be > 0");
  const Eigen::VectorXd d2 =
      (D.words.rowwise() - s.transpose()).rowwise().squaredNorm();
  Eigen::VectorXd a = (-d2.array() / sigma).exp();
  a /= a.maxCoeff();
  return a;
}

Eigen::VectorXd llc_code(const Eigen::VectorXd& s, const Codebook& D,
                         const LlcParams& p) {
  p.validate(D.size());
  const Eigen::VectorXd d2 =
      (D.words.rowwise() - s.transpose()).rowwise().squaredNorm();
  const auto nearest = knn_indices(d2, p.knn);

  Eigen::MatrixXd sub(p.knn, D.dims());
  for (int k = 0; k < p.knn; ++k) sub.row(k) = D.words.row(nearest[k]);
  const Eigen::VectorXd c = constrained_solve(sub, s, p.ridge);

  Eigen::VectorXd code = Eigen::VectorXd::Zero(D.size());
  for (int k = 0; k < p.knn; ++k) code[nearest[k]] = c[k];
  return code;
}

namespace {

// Coding step shared by llc_code_regularized and the optimizer: words is
// the full dictionary (rows). Penalty weights are the distance-increasing
// exponentials shifted into (0,1] (the farthest word maps to 1), so near
// words are barely regularized and distant words are priced out as mu_reg
// grows.
Eigen::VectorXd regularized_code(const Eigen::MatrixXd& words,
                                 const Eigen::VectorXd& s, const LlcParams& p) {
  const Eigen::VectorXd d2 =
      (words.rowwise() - s.transpose()).rowwise().squaredNorm();
  const double d2max = d2.maxCoeff();
  const Eigen::VectorXd penalty = ((d2.array() - d2max) / p.sigma).exp();
  const Eigen::VectorXd diag = p.mu_reg * penalty.array().square();
  return constrained_solve(words, s, p.ridge, &diag);
}

}  // namespace

Eigen::VectorXd llc_code_regularized(const Eigen::VectorXd& s,
                                     const Codebook& D, const LlcParams& p) {
  p.validate(D.size());
  return regularized_code(D.words, s, p);
}

Codebook optimize_codebook(const Codebook& init, const Eigen::MatrixXd& bag,
                           const LlcParams& p, std::uint64_t seed, int passes,
                           OptimizeStats* stats) {
  p.validate(init.size());
  if (bag.rows() == 0) throw DataError("optimize_codebook: empty bag");
  if (bag.cols() != init.dims())
    throw DataError("optimize_codebook: descriptor/word dimension mismatch");
  if (passes < 1) throw ConfigError("passes must be >= 1");

  Eigen::MatrixXd words = init.words;
  const auto M = words.rows();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(bag.rows()));
  std::iota(order.begin(), order.end(), 0);

  OptimizeStats local;
  Rng rng(sub_seed(seed, 0x0BADD1C7));
  long long step = 0;
  for (int pass = 0; pass < passes; ++pass) {
    rng.shuffle(order);
    for (const Eigen::Index idx : order) {
      ++step;
      ++local.visited;
      const Eigen::VectorXd s = bag.row(idx).transpose();
      const Eigen::VectorXd c = regularized_code(words, s, p);

      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < M; ++j)
        if (std::abs(c[j]) > p.bias_cutoff) active.push_back(j);
      if (active.empty()) {
        ++local.skipped_empty_active;
        continue;
      }

      Eigen::MatrixXd sub(static_cast<Eigen::Index>(active.size()), words.cols());
      for (std::size_t k = 0; k < active.size(); ++k)
        sub.row(static_cast<Eigen::Index>(k)) = words.row(active[k]);
      const Eigen::VectorXd refit = constrained_solve(sub, s, p.ridge);

      const Eigen::VectorXd residual = s - sub.transpose() * refit;
      const double cnorm = refit.norm();
      if (cnorm == 0.0) continue;
      const double eta = std::sqrt(1.0 / static_cast<double>(step));
      const double scale = 2.0 * eta / cnorm;
      for (std::size_t k = 0; k < active.size(); ++k) {
        const Eigen::Index j = active[k];
        words.row(j) += scale * refit[static_cast<Eigen::Index>(k)] *
                        residual.transpose();
        const double norm = words.row(j).norm();
        if (norm > 1.0) words.row(j) /= norm;  // proj onto the unit l2 ball
      }
    }
  }

  if (stats) *stats = local;
  Codebook out;
  out.words = std::move(words);
  out.provenance = Codebook::Provenance::optimized;
  out.rng_seed = seed;
  out.optimized_with = Codebook::OptimizeParams{p.mu_reg, p.sigma, passes};
  return out;
}

Eigen::VectorXd pool_image(const Eigen::MatrixXd& codes, bool signed_max) {
  if (codes.rows() == 0) {
    return Eigen::VectorXd::Zero(codes.cols());
  }
  Eigen::VectorXd pooled = signed_max
                               ? Eigen::VectorXd(codes.colwise().maxCoeff())
                               : Eigen::VectorXd(codes.cwiseAbs().colwise().maxCoeff());
  const double norm = pooled.norm();
  if (norm > 0.0) pooled /= norm;
  return pooled;
}

Eigen::VectorXd encode_pooled_feature(const Eigen::MatrixXd& descriptors,
                                      const Codebook& D, const LlcParams& p,
                                      bool signed_max) {
  const auto M = D.size();
  if (descriptors.rows() == 0) return Eigen::VectorXd::Zero(M);
  p.validate(M);

  const double lowest = std::numeric_limits<double>::lowest();
  Eigen::VectorXd pooled = Eigen::VectorXd::Constant(M, signed_max ? lowest : 0.0);
  std::vector<Eigen::Index> touched(static_cast<std::size_t>(M), 0);

  for (Eigen::Index start = 0; start < descriptors.rows();
       start += kAssignChunk) {
    const Eigen::Index count =
        std::min<Eigen::Index>(kAssignChunk, descriptors.rows() - start);
    const Eigen::MatrixXd d2 =
        pairwise_sq_dist(descriptors.middleRows(start, count), D.words);
    for (Eigen::Index r = 0; r < count; ++r) {
      const auto nearest = knn_indices(d2.row(r).transpose(), p.knn);
      Eigen::MatrixXd sub(p.knn, D.dims());
      for (int k = 0; k < p.knn; ++k) sub.row(k) = D.words.row(nearest[k]);
      const Eigen::VectorXd c =
          constrained_solve(sub, descriptors.row(start + r).transpose(), p.ridge);
      for (int k = 0; k < p.knn; ++k) {
        const double v = signed_max ? c[k] : std::abs(c[k]);
        pooled[nearest[k]] = std::max(pooled[nearest[k]], v);
        touched[static_cast<std::size_t>(nearest[k])] += 1;
      }
    }
  }
  if (signed_max) {
    // Match pooling over an explicit code matrix, where a word not selected
    // by some descriptor contributes a zero entry to the column max.
    for (Eigen::Index j = 0; j < M; ++j) {
      if (touched[static_cast<std::size_t>(j)] == 0)
        pooled[j] = 0.0;
      else if (touched[static_cast<std::size_t>(j)] < descriptors.rows())
        pooled[j] = std::max(pooled[j], 0.0);
    }
  }
  const double norm = pooled.norm();
  if (norm > 0.0) pooled /= norm;
  return pooled;
}

double auto_sigma(const Eigen::MatrixXd& sample, const Codebook& D) {
  const Eigen::Index n = std::min<Eigen::Index>(sample.rows(), 1000);
  if (n == 0) throw DataError("auto_sigma: empty sample");
  double sum = 0.0;
  for (Eigen::Index start = 0; start < n; start += kAssignChunk) {
    const Eigen::Index count = std::min<Eigen::Index>(kAssignChunk, n - start);
    const Eigen::MatrixXd d2 =
        pairwise_sq_dist(sample.middleRows(start, count), D.words);
    sum += d2.rowwise().minCoeff().sum();
  }
  const double mean = sum / static_cast<double>(n);
  return std::max(mean, 1e-12);
}

double mean_reconstruction_error(const Eigen::MatrixXd& descriptors,
                                 const Codebook& D, const LlcParams& p) {
  if (descriptors.rows() == 0) return 0.0;
  p.validate(D.size());
  double sum = 0.0;
  for (Eigen::Index start = 0; start < descriptors.rows();
       start += kAssignChunk) {
    const Eigen::Index count =
        std::min<Eigen::Index>(kAssignChunk, descriptors.rows() - start);
    const Eigen::MatrixXd d2 =
        pairwise_sq_dist(descriptors.middleRows(start, count), D.words);
    for (Eigen::Index r = 0; r < count; ++r) {
      const auto nearest = knn_indices(d2.row(r).transpose(), p.knn);
      Eigen::MatrixXd sub(p.knn, D.dims());
      for (int k = 0; k < p.knn; ++k) sub.row(k) = D.words.row(nearest[k]);
      const Eigen::VectorXd s = descriptors.row(start + r).transpose();
      const Eigen::VectorXd c = constrained_solve(sub, s, p.ridge);
      sum += (s - sub.transpose() * c).norm();
    }
  }
  return sum / static_cast<double>(descriptors.rows());
}

}  // namespace rpbof
