#include "rpbof/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "rpbof/dtw.hpp"

namespace rpbof {

namespace {

using SteadyClock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(double* slot) : slot_(slot), t0_(SteadyClock::now()) {}
  ~Stopwatch() {
    if (slot_)
      *slot_ += std::chrono::duration<double>(SteadyClock::now() - t0_).count();
  }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

 private:
  double* slot_;
  SteadyClock::time_point t0_;
};

// Rethrows the active exception with a stage label, preserving its type.
template <typename Fn>
auto with_stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("stage ") + name + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string("stage ") + name + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(std::string("stage ") + name + ": " + e.what());
  }
}

// Parallel loop with deterministic output slots and deterministic error
// propagation (lowest failing index wins).
template <typename Fn>
void parallel_for_index(Eigen::Index n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// seed streams
constexpr std::uint64_t kStreamBag = 1;
constexpr std::uint64_t kStreamSigma = 2;
constexpr std::uint64_t kStreamCv = 3;
constexpr std::uint64_t kStreamSvm = 4;
constexpr std::uint64_t kStreamKmeans = 0x1000;
constexpr std::uint64_t kStreamOptimize = 0x2000;

constexpr Eigen::Index kEvalBlock = 256;

std::vector<RecurrenceImage> encode_series_block(
    const std::vector<TimeSeries>& series, Eigen::Index begin,
    Eigen::Index count, const PipelineConfig& cfg, double* slot) {
  Stopwatch timer(slot);
  std::vector<RecurrenceImage> images(static_cast<std::size_t>(count));
  with_stage("encode", [&] {
    parallel_for_index(count, [&](Eigen::Index i) {
      images[static_cast<std::size_t>(i)] = encode_series(
          series[static_cast<std::size_t>(begin + i)], cfg.embedding,
          cfg.max_side);
    });
    return 0;
  });
  return images;
}

std::vector<Eigen::MatrixXd> describe_block(
    const std::vector<RecurrenceImage>& images, const PipelineConfig& cfg,
    double* slot) {
  Stopwatch timer(slot);
  std::vector<Eigen::MatrixXd> descriptors(images.size());
  with_stage("describe", [&] {
    parallel_for_index(static_cast<Eigen::Index>(images.size()),
                       [&](Eigen::Index i) {
                         descriptors[static_cast<std::size_t>(i)] =
                             dense_descriptors(images[static_cast<std::size_t>(i)],
                                               cfg.grid)
                                 .vectors;
                       });
    return 0;
  });
  return descriptors;
}

std::vector<Eigen::MatrixXd> segment_block(const std::vector<TimeSeries>& series,
                                           Eigen::Index begin, Eigen::Index count,
                                           int window, int stride, double* slot) {
  Stopwatch timer(slot);
  std::vector<Eigen::MatrixXd> descriptors(static_cast<std::size_t>(count));
  with_stage("describe", [&] {
    parallel_for_index(count, [&](Eigen::Index i) {
      descriptors[static_cast<std::size_t>(i)] = segment_descriptors(
          series[static_cast<std::size_t>(begin + i)], window, stride);
    });
    return 0;
  });
  return descriptors;
}

// Uniform seeded sample of at most cap rows across all per-image blocks.
Eigen::MatrixXd assemble_bag(const std::vector<Eigen::MatrixXd>& per_image,
                             std::size_t cap, std::uint64_t seed) {
  Eigen::Index total = 0;
  Eigen::Index dims = 0;
  for (const auto& m : per_image) {
    total += m.rows();
    if (m.rows() > 0) dims = m.cols();
  }
  if (total == 0) throw DataError("no descriptors extracted from training set");

  std::vector<Eigen::Index> offsets;
  offsets.reserve(per_image.size());
  Eigen::Index acc = 0;
  for (const auto& m : per_image) {
    offsets.push_back(acc);
    acc += m.rows();
  }

  const std::size_t keep =
      std::min<std::size_t>(cap, static_cast<std::size_t>(total));
  Rng rng(sub_seed(seed, kStreamBag));
  const auto picks =
      rng.sample_indices(static_cast<std::size_t>(total), keep);

  Eigen::MatrixXd bag(static_cast<Eigen::Index>(keep), dims);
  std::size_t img = 0;
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto global = static_cast<Eigen::Index>(picks[i]);
    while (img + 1 < offsets.size() && offsets[img + 1] <= global) ++img;
    bag.row(static_cast<Eigen::Index>(i)) =
        per_image[img].row(global - offsets[img]);
  }
  return bag;
}

Eigen::MatrixXd seeded_row_sample(const Eigen::MatrixXd& m, std::size_t count,
                                  std::uint64_t seed) {
  const std::size_t keep =
      std::min<std::size_t>(count, static_cast<std::size_t>(m.rows()));
  Rng rng(sub_seed(seed, kStreamSigma));
  const auto picks = rng.sample_indices(static_cast<std::size_t>(m.rows()), keep);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(keep), m.cols());
  for (std::size_t i = 0; i < keep; ++i)
    out.row(static_cast<Eigen::Index>(i)) =
        m.row(static_cast<Eigen::Index>(picks[i]));
  return out;
}

struct Candidate {
  int M = 0;
  Codebook codebook;
  double sigma = 0.0;
  Eigen::MatrixXd features;  // n_train x M
};

Eigen::MatrixXd encode_features(const std::vector<Eigen::MatrixXd>& descriptors,
                                const Codebook& cb, const LlcParams& llc,
                                bool signed_pooling, double* slot) {
  Stopwatch timer(slot);
  Eigen::MatrixXd features(static_cast<Eigen::Index>(descriptors.size()),
                           cb.size());
  with_stage("code_pool", [&] {
    parallel_for_index(static_cast<Eigen::Index>(descriptors.size()),
                       [&](Eigen::Index i) {
                         features.row(i) = encode_pooled_feature(
                                               descriptors[static_cast<std::size_t>(i)],
                                               cb, llc, signed_pooling)
                                               .transpose();
                       });
    return 0;
  });
  return features;
}

Candidate build_candidate(int M, const Eigen::MatrixXd& bag,
                          const std::vector<Eigen::MatrixXd>& train_descriptors,
                          const PipelineConfig& cfg, StageTimes* times) {
  Candidate cand;
  cand.M = M;
  {
    Stopwatch timer(times ? &times->codebook : nullptr);
    with_stage("codebook", [&] {
      cand.codebook = kmeans(bag, M, cfg.kmeans_max_iters,
                             sub_seed(cfg.seed, kStreamKmeans +
                                                    static_cast<std::uint64_t>(M)));
      return 0;
    });
  }

  LlcParams llc = cfg.llc;
  if (cfg.sigma_auto) {
    const Eigen::MatrixXd sample = seeded_row_sample(bag, 1000, cfg.seed);
    llc.sigma = auto_sigma(sample, cand.codebook);
  }
  cand.sigma = llc.sigma;

  if (cfg.llc_optimize) {
    Stopwatch timer(times ? &times->llc_optimize : nullptr);
    with_stage("llc_optimize", [&] {
      cand.codebook = optimize_codebook(
          cand.codebook, bag, llc,
          sub_seed(cfg.seed, kStreamOptimize + static_cast<std::uint64_t>(M)),
          cfg.optimize_passes);
      return 0;
    });
  }

  cand.features =
      encode_features(train_descriptors, cand.codebook, llc, cfg.signed_pooling,
                      times ? &times->code_pool : nullptr);
  return cand;
}

// Joint (M, C) selection in one stratified fold loop over cached features.
// Ties prefer the smaller M, then the smaller C.
std::pair<std::size_t, double> select_m_and_c(
    const std::vector<Candidate>& candidates, const std::vector<int>& y,
    const LabelMap& class_map, const PipelineConfig& cfg, double* svm_slot) {
  const std::vector<double> grid =
      cfg.cv.c_grid.empty() ? default_c_grid() : cfg.cv.c_grid;
  const std::uint64_t cv_seed =
      cfg.cv.seed != 0 ? cfg.cv.seed : sub_seed(cfg.seed, kStreamCv);

  if (candidates.size() == 1) {
    Stopwatch timer(svm_slot);
    CvPlan plan = cfg.cv;
    plan.seed = cv_seed;
    const double c = with_stage("svm", [&] {
      return select_C(candidates[0].features, y, class_map, plan, cfg.svm);
    });
    return {0, c};
  }

  Stopwatch timer(svm_slot);
  return with_stage("svm", [&]() -> std::pair<std::size_t, double> {
    std::vector<int> counts(static_cast<std::size_t>(class_map.class_count()), 0);
    for (const int yi : y) counts[static_cast<std::size_t>(yi - 1)]++;
    int folds = std::min(cfg.cv.folds,
                         *std::min_element(counts.begin(), counts.end()));
    if (folds < 2) throw DataError("fewer than 2 usable CV folds");

    // Ties across M go to the larger codebook (accuracy is in practice
    // non-decreasing in M and tiny train splits tie often); ties across C
    // keep the smaller C.
    std::size_t best_m = candidates.size() - 1;
    double best_c = grid.front();
    double best_acc = -1.0;
    for (std::size_t r = 0; r < candidates.size(); ++r) {
      const std::size_t mi = candidates.size() - 1 - r;
      for (const double c : grid) {
        const double acc = cv_accuracy(candidates[mi].features, y, class_map, c,
                                       folds, cv_seed, cfg.svm);
        if (acc > best_acc) {
          best_acc = acc;
          best_m = mi;
          best_c = c;
        }
      }
    }
    return {best_m, best_c};
  });
}

TrainedModel fit_from_descriptors(
    const Dataset& d, const PipelineConfig& cfg,
    const std::vector<Eigen::MatrixXd>& train_descriptors, StageTimes* times) {
  std::vector<int> y;
  y.reserve(d.train.size());
  for (const auto& ts : d.train) y.push_back(ts.label);

  Eigen::MatrixXd bag;
  {
    Stopwatch timer(times ? &times->codebook : nullptr);
    bag = with_stage("codebook", [&] {
      return assemble_bag(train_descriptors, cfg.bag_cap, cfg.seed);
    });
  }

  std::vector<Candidate> candidates;
  for (const int M : cfg.codebook_candidates())
    candidates.push_back(build_candidate(M, bag, train_descriptors, cfg, times));

  const auto [best_index, best_c] =
      select_m_and_c(candidates, y, d.labels, cfg, times ? &times->svm : nullptr);
  Candidate& chosen = candidates[best_index];

  TrainedModel model;
  model.config = cfg;
  model.sigma_used = chosen.sigma;
  model.selected_M = chosen.M;
  model.selected_C = best_c;
  model.codebook = std::move(chosen.codebook);
  {
    Stopwatch timer(times ? &times->svm : nullptr);
    with_stage("svm", [&] {
      model.svm = train_ova(chosen.features, y, best_c, d.labels,
                            sub_seed(cfg.seed, kStreamSvm), cfg.svm);
      return 0;
    });
  }
  return model;
}

LlcParams llc_params_of(const TrainedModel& model) {
  LlcParams llc = model.config.llc;
  llc.sigma = model.sigma_used;
  return llc;
}

Eigen::MatrixXi confusion_from_features(const TrainedModel& model,
                                        const Eigen::MatrixXd& features,
                                        const std::vector<int>& labels,
                                        double* svm_slot) {
  const int n_classes = model.svm.class_count();
  Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(n_classes, n_classes);
  Stopwatch timer(svm_slot);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const int pred = model.svm.predict(features.row(i).transpose());
    conf(labels[static_cast<std::size_t>(i)] - 1, pred - 1) += 1;
  }
  return conf;
}

Eigen::MatrixXi evaluate_generic(
    const TrainedModel& model, const std::vector<TimeSeries>& series,
    StageTimes* times,
    const std::function<std::vector<Eigen::MatrixXd>(
        Eigen::Index, Eigen::Index, StageTimes*)>& describe_range) {
  const int n_classes = model.svm.class_count();
  Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(n_classes, n_classes);
  const LlcParams llc = llc_params_of(model);

  const auto n = static_cast<Eigen::Index>(series.size());
  for (Eigen::Index start = 0; start < n; start += kEvalBlock) {
    const Eigen::Index count = std::min(kEvalBlock, n - start);
    const auto descriptors = describe_range(start, count, times);
    std::vector<int> labels(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i)
      labels[static_cast<std::size_t>(i)] =
          series[static_cast<std::size_t>(start + i)].label;
    const Eigen::MatrixXd features =
        encode_features(descriptors, model.codebook, llc,
                        model.config.signed_pooling,
                        times ? &times->code_pool : nullptr);
    conf += confusion_from_features(model, features, labels,
                                    times ? &times->svm : nullptr);
  }
  return conf;
}

ExperimentReport report_skeleton(const Dataset& d, const PipelineConfig& cfg) {
  ExperimentReport report;
  report.dataset = d.name;
  report.config = cfg;
  report.confusion = Eigen::MatrixXi::Zero(d.class_count, d.class_count);
  return report;
}

}  // namespace

std::vector<int> PipelineConfig::codebook_candidates() const {
  if (!codebook_sweep.empty()) {
    std::vector<int> sorted = codebook_sweep;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
  }
  return {codebook_size};
}

void PipelineConfig::validate() const {
  embedding.validate();
  grid.validate();
  if ((codebook_size > 0) == !codebook_sweep.empty())
    throw ConfigError(
        "exactly one of codebook size and codebook sweep must be set");
  if (codebook_size < 0) throw ConfigError("codebook size must be positive");
  for (const int m : codebook_sweep)
    if (m < 2) throw ConfigError("sweep codebook sizes must be >= 2");
  if (!sigma_auto && llc.sigma <= 0.0)
    throw ConfigError("explicit sigma must be > 0");
  if (max_side < 16) throw ConfigError("max_side must be >= 16");
  if (optimize_passes < 1) throw ConfigError("passes must be >= 1");
  if (cv.folds < 2) throw ConfigError("folds must be >= 2");
  if (kmeans_max_iters < 1) throw ConfigError("kmeans iterations must be >= 1");
  if (llc.knn < 1) throw ConfigError("knn must be >= 1");
}

TrainedModel train_model(const Dataset& d, const PipelineConfig& cfg,
                         StageTimes* times) {
  cfg.validate();
  if (d.train.empty()) throw DataError("empty training set");

  Dataset local;
  const Dataset* data = &d;
  if (cfg.znorm) {
    local = d;
    z_normalize(local);
    data = &local;
  }

  const auto images = encode_series_block(
      data->train, 0, static_cast<Eigen::Index>(data->train.size()), cfg,
      times ? &times->encode : nullptr);
  const auto descriptors =
      describe_block(images, cfg, times ? &times->describe : nullptr);
  return fit_from_descriptors(*data, cfg, descriptors, times);
}

Eigen::VectorXd series_feature(const TrainedModel& model, const TimeSeries& ts) {
  TimeSeries local = ts;
  if (model.config.znorm) z_normalize(local);
  const auto image =
      encode_series(local, model.config.embedding, model.config.max_side);
  const auto descriptors = dense_descriptors(image, model.config.grid);
  return encode_pooled_feature(descriptors.vectors, model.codebook,
                               llc_params_of(model),
                               model.config.signed_pooling);
}

int predict_series(const TrainedModel& model, const TimeSeries& ts) {
  return model.svm.predict(series_feature(model, ts));
}

Eigen::MatrixXi evaluate_confusion(const TrainedModel& model,
                                   const std::vector<TimeSeries>& series,
                                   StageTimes* times) {
  std::vector<TimeSeries> local;
  const std::vector<TimeSeries>* data = &series;
  if (model.config.znorm) {
    local = series;
    for (auto& ts : local) z_normalize(ts);
    data = &local;
  }
  return evaluate_generic(
      model, *data, times,
      [&](Eigen::Index start, Eigen::Index count, StageTimes* t) {
        const auto images =
            encode_series_block(*data, start, count, model.config,
                                t ? &t->encode : nullptr);
        return describe_block(images, model.config, t ? &t->describe : nullptr);
      });
}

double error_rate_of(const Eigen::MatrixXi& confusion) {
  const long long total = confusion.sum();
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(confusion.trace()) /
                   static_cast<double>(total);
}

ExperimentReport run_experiment(const Dataset& d, const PipelineConfig& cfg) {
  cfg.validate();
  const auto findings = validate_dataset(d);
  if (!findings.empty())
    throw DataError("invalid dataset " + d.name + ": " + findings.front().message);
  if (d.test.empty()) throw DataError("empty test set");

  ExperimentReport report = report_skeleton(d, cfg);
  const TrainedModel model = train_model(d, cfg, &report.times);
  report.selected_M = model.selected_M;
  report.selected_C = model.selected_C;
  report.sigma_used = model.sigma_used;
  report.confusion = evaluate_confusion(model, d.test, &report.times);
  report.error_rate = error_rate_of(report.confusion);
  return report;
}

double baseline_1nn_euclidean(const Dataset& d) {
  if (!d.declared_length)
    throw DataError("1-NN baseline requires a fixed-length dataset");
  if (d.train.empty() || d.test.empty())
    throw DataError("1-NN baseline: empty split");

  std::vector<int> predicted(d.test.size());
  parallel_for_index(static_cast<Eigen::Index>(d.test.size()),
                     [&](Eigen::Index i) {
                       const auto& t = d.test[static_cast<std::size_t>(i)];
                       double best = std::numeric_limits<double>::infinity();
                       int label = d.train.front().label;
                       for (const auto& tr : d.train) {
                         const double dist =
                             squared_euclidean(tr.values, t.values);
                         if (dist < best) {  // ties keep the lower index
                           best = dist;
                           label = tr.label;
                         }
                       }
                       predicted[static_cast<std::size_t>(i)] = label;
                     });
  int misses = 0;
  for (std::size_t i = 0; i < d.test.size(); ++i)
    if (predicted[i] != d.test[i].label) ++misses;
  return static_cast<double>(misses) / static_cast<double>(d.test.size());
}

double baseline_1nn_dtw(const Dataset& d, std::optional<double> window) {
  if (!d.declared_length)
    throw DataError("1-NN baseline requires a fixed-length dataset");
  if (d.train.empty() || d.test.empty())
    throw DataError("1-NN baseline: empty split");

  std::vector<int> predicted(d.test.size());
  parallel_for_index(static_cast<Eigen::Index>(d.test.size()),
                     [&](Eigen::Index i) {
                       const auto& t = d.test[static_cast<std::size_t>(i)];
                       double best = std::numeric_limits<double>::infinity();
                       int label = d.train.front().label;
                       for (const auto& tr : d.train) {
                         const double dist =
                             dtw_distance(tr.values, t.values, window);
                         if (dist < best) {
                           best = dist;
                           label = tr.label;
                         }
                       }
                       predicted[static_cast<std::size_t>(i)] = label;
                     });
  int misses = 0;
  for (std::size_t i = 0; i < d.test.size(); ++i)
    if (predicted[i] != d.test[i].label) ++misses;
  return static_cast<double>(misses) / static_cast<double>(d.test.size());
}

std::vector<SweepCell> make_sweep_cells(const std::vector<int>& m_list,
                                        const std::vector<int>& tau_list,
                                        const std::vector<int>& M_list,
                                        const std::vector<double>& eps_list) {
  const auto or_default = [](std::vector<int> v) {
    if (v.empty()) v.push_back(-1);
    return v;
  };
  std::vector<double> eps = eps_list;
  if (eps.empty()) eps.push_back(-1.0);

  std::vector<SweepCell> cells;
  for (const int m : or_default(m_list)) {
    for (const int tau : or_default(tau_list)) {
      for (const int M : or_default(M_list)) {
        for (const double e : eps) {
          SweepCell cell;
          if (m > 0) cell.m = m;
          if (tau > 0) cell.tau = tau;
          if (M > 0) cell.M = M;
          if (e > 0.0) cell.epsilon = e;
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

std::vector<ExperimentReport> sweep(const Dataset& d, const PipelineConfig& base,
                                    const std::vector<SweepCell>& cells) {
  if (cells.empty()) throw ConfigError("sweep: no cells");
  std::vector<ExperimentReport> reports;
  reports.reserve(cells.size());
  for (const auto& cell : cells) {
    PipelineConfig cfg = base;
    if (cell.m) cfg.embedding.m = *cell.m;
    if (cell.tau) cfg.embedding.tau = *cell.tau;
    if (cell.epsilon) cfg.embedding.epsilon = *cell.epsilon;
    if (cell.M) {
      cfg.codebook_size = *cell.M;
      cfg.codebook_sweep.clear();
    }
    try {
      reports.push_back(run_experiment(d, cfg));
    } catch (const std::exception& e) {
      ExperimentReport failed = report_skeleton(d, cfg);
      failed.error = e.what();
      failed.error_rate = std::numeric_limits<double>::quiet_NaN();
      reports.push_back(std::move(failed));
    }
  }
  return reports;
}

Eigen::MatrixXd segment_descriptors(const TimeSeries& ts, int window,
                                    int stride) {
  if (window < 2) throw ConfigError("segment window must be >= 2");
  if (stride < 1) throw ConfigError("segment stride must be >= 1");
  const int l = ts.length();
  if (l < window)
    throw DataError("series shorter than segment window");

  const int count = (l - window) / stride + 1;
  Eigen::MatrixXd out(count, 3);
  const double w = window;
  // closed forms for sum t and sum t^2 over t = 0..window-1
  const double t_mean = (w - 1.0) / 2.0;
  const double t_var = (w * w - 1.0) / 12.0;
  for (int seg = 0; seg < count; ++seg) {
    const int off = seg * stride;
    double mean = 0.0;
    for (int t = 0; t < window; ++t)
      mean += ts.values[static_cast<std::size_t>(off + t)];
    mean /= w;
    double var = 0.0, cov = 0.0;
    for (int t = 0; t < window; ++t) {
      const double dv = ts.values[static_cast<std::size_t>(off + t)] - mean;
      var += dv * dv;
      cov += (t - t_mean) * dv;
    }
    var /= w;
    const double slope = cov / (w * t_var);
    out(seg, 0) = mean;
    out(seg, 1) = var;
    out(seg, 2) = slope;
  }
  return out;
}

std::vector<RuntimeRow> compare_runtime(const Dataset& d,
                                        const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<RuntimeRow> rows;

  for (const bool with_llc : {true, false}) {
    PipelineConfig variant = cfg;
    variant.llc_optimize = with_llc;
    ExperimentReport report = run_experiment(d, variant);
    rows.push_back({with_llc ? "rpbof_llc" : "rpbof_no_llc", report.times,
                    report.error_rate});
  }

  // 1D control: raw sliding-window segment statistics through the same
  // codebook / coding / SVM machinery, no dictionary optimization.
  PipelineConfig control = cfg;
  control.llc_optimize = false;
  int window = cfg.grid.patch_sizes.front();
  for (const int s : cfg.grid.patch_sizes) window = std::min(window, s);

  StageTimes times;
  std::vector<int> y;
  const Dataset* data = &d;
  Dataset local;
  if (control.znorm) {
    local = d;
    z_normalize(local);
    data = &local;
  }
  const auto train_descriptors =
      segment_block(data->train, 0, static_cast<Eigen::Index>(data->train.size()),
                    window, control.grid.stride, &times.describe);
  const TrainedModel model =
      fit_from_descriptors(*data, control, train_descriptors, &times);
  const Eigen::MatrixXi conf = evaluate_generic(
      model, data->test, &times,
      [&](Eigen::Index start, Eigen::Index count, StageTimes* t) {
        return segment_block(data->test, start, count, window,
                             control.grid.stride, t ? &t->describe : nullptr);
      });
  rows.push_back({"bof_1d", times, error_rate_of(conf)});
  return rows;
}

// ---------------------------------------------------------------------------
// reports

namespace {

nlohmann::json config_json(const PipelineConfig& c) {
  nlohmann::json j;
  j["m"] = c.embedding.m;
  j["tau"] = c.embedding.tau;
  if (c.embedding.epsilon)
    j["epsilon"] = *c.embedding.epsilon;
  else
    j["epsilon"] = nullptr;
  j["epsilon_relative"] = c.embedding.epsilon_relative;
  switch (c.embedding.norm) {
    case DistanceNorm::euclidean: j["norm"] = "euclidean"; break;
    case DistanceNorm::manhattan: j["norm"] = "manhattan"; break;
    case DistanceNorm::chebyshev: j["norm"] = "chebyshev"; break;
  }
  j["patch_sizes"] = c.grid.patch_sizes;
  j["stride"] = c.grid.stride;
  j["max_side"] = c.max_side;
  j["knn"] = c.llc.knn;
  j["mu_reg"] = c.llc.mu_reg;
  j["sigma_auto"] = c.sigma_auto;
  if (!c.sigma_auto) j["sigma"] = c.llc.sigma;
  j["bias_cutoff"] = c.llc.bias_cutoff;
  j["ridge"] = c.llc.ridge;
  if (c.codebook_size > 0) j["codebook_size"] = c.codebook_size;
  if (!c.codebook_sweep.empty()) j["codebook_sweep"] = c.codebook_sweep;
  j["folds"] = c.cv.folds;
  j["c_grid"] = c.cv.c_grid.empty() ? default_c_grid() : c.cv.c_grid;
  j["seed"] = c.seed;
  j["llc_optimize"] = c.llc_optimize;
  j["optimize_passes"] = c.optimize_passes;
  j["signed_pooling"] = c.signed_pooling;
  j["bag_cap"] = c.bag_cap;
  j["znorm"] = c.znorm;
  j["kmeans_max_iters"] = c.kmeans_max_iters;
  return j;
}

nlohmann::json times_json(const StageTimes& t) {
  return nlohmann::json{{"encode_s", t.encode},
                        {"describe_s", t.describe},
                        {"codebook_s", t.codebook},
                        {"llc_optimize_s", t.llc_optimize},
                        {"code_pool_s", t.code_pool},
                        {"svm_s", t.svm},
                        {"total_s", t.total()}};
}

constexpr int kReportVersion = 1;

}  // namespace

void write_report_json(std::ostream& out, const ExperimentReport& report) {
  nlohmann::json j;
  j["format_version"] = kReportVersion;
  j["dataset"] = report.dataset;
  j["config"] = config_json(report.config);
  j["seed"] = report.config.seed;
  if (report.error) {
    j["error"] = *report.error;
  } else {
    j["error_rate"] = report.error_rate;
    j["accuracy"] = 1.0 - report.error_rate;
    j["selected_M"] = report.selected_M;
    j["selected_C"] = report.selected_C;
    j["sigma_used"] = report.sigma_used;
    std::vector<std::vector<int>> conf;
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
      std::vector<int> row;
      for (Eigen::Index c = 0; c < report.confusion.cols(); ++c)
        row.push_back(report.confusion(r, c));
      conf.push_back(std::move(row));
    }
    j["confusion"] = conf;
  }
  j["times"] = times_json(report.times);
  if (report.baseline_euclidean) j["baseline_1nn_euclidean"] = *report.baseline_euclidean;
  if (report.baseline_dtw) {
    j["baseline_1nn_dtw"] = *report.baseline_dtw;
    if (report.baseline_dtw_window)
      j["baseline_dtw_window"] = *report.baseline_dtw_window;
  }
  out << j.dump(2) << '\n';
}

void write_report_json(const std::filesystem::path& path,
                       const ExperimentReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_report_json(out, report);
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string quoted = "\"";
  for (const char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted += c;
  }
  quoted += '"';
  return quoted;
}

void write_sweep_row(std::ostream& out, const ExperimentReport& r) {
  out << r.dataset << ',' << r.config.embedding.m << ','
      << r.config.embedding.tau << ',';
  if (r.config.embedding.epsilon) out << *r.config.embedding.epsilon;
  out << ',';
  if (r.error) {
    out << ",,,,";
  } else {
    out << r.selected_M << ',' << r.selected_C << ',' << r.error_rate << ','
        << (1.0 - r.error_rate) << ',';
  }
  const auto& t = r.times;
  out << t.encode << ',' << t.describe << ',' << t.codebook << ','
      << t.llc_optimize << ',' << t.code_pool << ',' << t.svm << ','
      << t.total() << ',';
  if (r.error) out << csv_quote(*r.error);
  out << '\n';
}

}  // namespace

void write_sweep_csv(std::ostream& out,
                     const std::vector<ExperimentReport>& reports) {
  out << "dataset,m,tau,epsilon,selected_M,selected_C,error_rate,accuracy,"
         "encode_s,describe_s,codebook_s,llc_optimize_s,code_pool_s,svm_s,"
         "total_s,error\n";
  for (const auto& r : reports) write_sweep_row(out, r);
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<ExperimentReport>& reports) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_sweep_csv(out, reports);
}

void write_runtime_csv(std::ostream& out, const std::vector<RuntimeRow>& rows) {
  out << "variant,encode_s,describe_s,codebook_s,llc_optimize_s,code_pool_s,"
         "svm_s,total_s,error_rate\n";
  for (const auto& r : rows) {
    const auto& t = r.times;
    out << r.variant << ',' << t.encode << ',' << t.describe << ','
        << t.codebook << ',' << t.llc_optimize << ',' << t.code_pool << ','
        << t.svm << ',' << t.total() << ',' << r.error_rate << '\n';
  }
}

void write_runtime_csv(const std::filesystem::path& path,
                       const std::vector<RuntimeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_runtime_csv(out, rows);
}

}  // namespace rpbof
