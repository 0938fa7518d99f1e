#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rpbof/codebook.hpp"
#include "rpbof/dense_sift.hpp"
#include "rpbof/linear_svm.hpp"
#include "rpbof/recurrence.hpp"
#include "rpbof/timeseries.hpp"

namespace rpbof {

struct PipelineConfig {
  EmbeddingParams embedding;  // m=3, tau=4, gray mode by default
  PatchGridParams grid;
  LlcParams llc;
  bool sigma_auto = true;  // data-driven bandwidth unless llc.sigma is forced
  int codebook_size = 0;               // fixed M when > 0 ...
  std::vector<int> codebook_sweep;     // ... or CV candidates when non-empty
  CvPlan cv;
  std::uint64_t seed = 1;
  int max_side = 300;
  bool llc_optimize = true;
  int optimize_passes = 1;
  bool signed_pooling = false;
  std::size_t bag_cap = 200000;
  bool znorm = false;
  int kmeans_max_iters = 50;
  SvmOptions svm;

  std::vector<int> codebook_candidates() const;
  void validate() const;  // exactly one of codebook_size / codebook_sweep
  bool operator==(const PipelineConfig&) const = default;
};

struct StageTimes {
  double encode = 0.0;        // series -> recurrence images
  double describe = 0.0;      // images -> descriptors
  double codebook = 0.0;      // bag sampling + k-means (all candidates)
  double llc_optimize = 0.0;  // incremental dictionary updates
  double code_pool = 0.0;     // coding + pooling into feature vectors
  double svm = 0.0;           // CV + final training + prediction

  double total() const {
    return encode + describe + codebook + llc_optimize + code_pool + svm;
  }
};

// Everything needed to classify new series, serializable byte-exactly.
struct TrainedModel {
  Codebook codebook;
  LinearModel svm;
  PipelineConfig config;
  double sigma_used = 0.0;
  int selected_M = 0;
  double selected_C = 0.0;
};

struct ExperimentReport {
  std::string dataset;
  PipelineConfig config;  // the exact cell that produced this report
  double error_rate = 0.0;
  Eigen::MatrixXi confusion;  // rows = true class, cols = predicted
  StageTimes times;
  int selected_M = 0;
  double selected_C = 0.0;
  double sigma_used = 0.0;
  std::optional<std::string> error;  // set when a sweep cell failed
  std::optional<double> baseline_euclidean;
  std::optional<double> baseline_dtw;
  std::optional<double> baseline_dtw_window;
};

// Train-only fitting: codebook, optimization and the (M, C) selection see
// training data exclusively. When codebook_sweep is set, M and C are
// selected jointly in one stratified 5-fold loop over cached training
// features; ties prefer the larger M, then the smaller C.
TrainedModel train_model(const Dataset& d, const PipelineConfig& cfg,
                         StageTimes* times = nullptr);

// Pooled LLC feature of one series under a trained model's codebook.
Eigen::VectorXd series_feature(const TrainedModel& model, const TimeSeries& ts);
int predict_series(const TrainedModel& model, const TimeSeries& ts);

// Confusion matrix of a model over a list of series (rows = true class).
Eigen::MatrixXi evaluate_confusion(const TrainedModel& model,
                                   const std::vector<TimeSeries>& series,
                                   StageTimes* times = nullptr);

double error_rate_of(const Eigen::MatrixXi& confusion);

// Full protocol: fit on d.train, evaluate on d.test, report everything.
ExperimentReport run_experiment(const Dataset& d, const PipelineConfig& cfg);

// 1-NN baselines; ties go to the lower training index.
double baseline_1nn_euclidean(const Dataset& d);
double baseline_1nn_dtw(const Dataset& d,
                        std::optional<double> window = std::nullopt);

// One sweep cell: overrides applied to a base config.
struct SweepCell {
  std::optional<int> m;
  std::optional<int> tau;
  std::optional<double> epsilon;  // binary mode when set
  std::optional<int> M;           // fixed codebook size for the cell
};

std::vector<SweepCell> make_sweep_cells(const std::vector<int>& m_list,
                                        const std::vector<int>& tau_list,
                                        const std::vector<int>& M_list,
                                        const std::vector<double>& eps_list);

// One report per cell, all sharing the base seed. A failing cell yields a
// report with `error` set instead of aborting the sweep.
std::vector<ExperimentReport> sweep(const Dataset& d,
                                    const PipelineConfig& base,
                                    const std::vector<SweepCell>& cells);

// Sliding-window control features for the 1D bag-of-features baseline:
// one row [mean, variance, slope] per window.
Eigen::MatrixXd segment_descriptors(const TimeSeries& ts, int window,
                                    int stride);

struct RuntimeRow {
  std::string variant;  // "rpbof_llc", "rpbof_no_llc", "bof_1d"
  StageTimes times;
  double error_rate = 0.0;
};

// Stage-time comparison of the pipeline with/without dictionary
// optimization and the 1D segment-feature control run through the same
// codebook/SVM path.
std::vector<RuntimeRow> compare_runtime(const Dataset& d,
                                        const PipelineConfig& cfg);

// Reports.
void write_report_json(std::ostream& out, const ExperimentReport& report);
void write_report_json(const std::filesystem::path& path,
                       const ExperimentReport& report);
void write_sweep_csv(std::ostream& out,
                     const std::vector<ExperimentReport>& reports);
void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<ExperimentReport>& reports);
void write_runtime_csv(std::ostream& out, const std::vector<RuntimeRow>& rows);
void write_runtime_csv(const std::filesystem::path& path,
                       const std::vector<RuntimeRow>& rows);

// Versioned little-endian binary containers; loads reject unknown
// magic/version. Round-trips are byte-exact.
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);
std::string serialize_model(const TrainedModel& model);

}  // namespace rpbof
