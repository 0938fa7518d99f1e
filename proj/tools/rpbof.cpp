// Experiment CLI: encode series to recurrence images, train/evaluate
// classifiers, run parameter sweeps, 1-NN baselines and stage-time
// comparisons over UCR-format datasets.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "rpbof/pipeline.hpp"
#include "rpbof/synthetic.hpp"

namespace {

using rpbof::ConfigError;
using rpbof::DataError;

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw ConfigError("empty integer list: '" + s + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw ConfigError("empty number list: '" + s + "'");
  return out;
}

// Plain key-value configuration file: `key = value` lines, '#' comments,
// `<Dataset>.key = value` for per-dataset overrides. CLI flags win.
std::map<std::string, std::string> read_kv_config(
    const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                          ": expected 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": empty key");
    kv[key] = value;
  }
  return kv;
}

struct Options {
  std::string dataset;
  std::string data_root = ".";
  std::string out_dir = ".";
  std::string format = "json";
  std::string config_file;

  rpbof::PipelineConfig pipeline;
  std::string norm = "euclidean";
  std::string patch_sizes = "16,24,32,48";
  std::string codebook_sweep;
  std::string c_grid;
  double epsilon = 0.0;  // 0 = gray mode
  double sigma = 0.0;    // 0 = data-driven
  bool no_llc_opt = false;

  // sweep cells
  std::string m_list, tau_list, M_list, eps_list;

  // encode
  int count = 0;  // 0 = all
  std::string split = "train";
  std::string image_format = "pgm";
  bool dump_descriptors = false;
  int export_images = 0;

  // evaluate / baseline
  std::string model_path;
  std::string baseline = "none";  // none|euclid|dtw|both
  double window = 0.0;            // 0 = full DTW window
};

// Applies config-file values for options the command line left untouched.
void apply_kv_config(const std::map<std::string, std::string>& kv,
                     const std::string& dataset, CLI::App& cmd, Options& opt) {
  auto lookup = [&](const std::string& key) -> std::optional<std::string> {
    if (!dataset.empty()) {
      const auto it = kv.find(dataset + "." + key);
      if (it != kv.end()) return it->second;
    }
    const auto it = kv.find(key);
    if (it != kv.end()) return it->second;
    return std::nullopt;
  };
  auto given = [&](const std::string& flag) {
    const auto* o = cmd.get_option_no_throw(flag);
    return o != nullptr && o->count() > 0;
  };

  const struct {
    const char* key;
    const char* flag;
    std::function<void(const std::string&)> apply;
  } bindings[] = {
      {"data-root", "--data-root", [&](const std::string& v) { opt.data_root = v; }},
      {"out-dir", "--out-dir", [&](const std::string& v) { opt.out_dir = v; }},
      {"format", "--format", [&](const std::string& v) { opt.format = v; }},
      {"m", "--m", [&](const std::string& v) { opt.pipeline.embedding.m = std::stoi(v); }},
      {"tau", "--tau", [&](const std::string& v) { opt.pipeline.embedding.tau = std::stoi(v); }},
      {"epsilon", "--epsilon", [&](const std::string& v) { opt.epsilon = std::stod(v); }},
      {"norm", "--norm", [&](const std::string& v) { opt.norm = v; }},
      {"patch-sizes", "--patch-sizes", [&](const std::string& v) { opt.patch_sizes = v; }},
      {"stride", "--stride", [&](const std::string& v) { opt.pipeline.grid.stride = std::stoi(v); }},
      {"codebook-size", "--codebook-size", [&](const std::string& v) { opt.pipeline.codebook_size = std::stoi(v); }},
      {"codebook-sweep", "--codebook-sweep", [&](const std::string& v) { opt.codebook_sweep = v; }},
      {"knn", "--knn", [&](const std::string& v) { opt.pipeline.llc.knn = std::stoi(v); }},
      {"mu-reg", "--mu-reg", [&](const std::string& v) { opt.pipeline.llc.mu_reg = std::stod(v); }},
      {"sigma", "--sigma", [&](const std::string& v) { opt.sigma = std::stod(v); }},
      {"c-grid", "--c-grid", [&](const std::string& v) { opt.c_grid = v; }},
      {"folds", "--folds", [&](const std::string& v) { opt.pipeline.cv.folds = std::stoi(v); }},
      {"seed", "--seed", [&](const std::string& v) { opt.pipeline.seed = std::stoull(v); }},
      {"max-side", "--max-side", [&](const std::string& v) { opt.pipeline.max_side = std::stoi(v); }},
      {"bag-cap", "--bag-cap", [&](const std::string& v) { opt.pipeline.bag_cap = std::stoull(v); }},
      {"passes", "--passes", [&](const std::string& v) { opt.pipeline.optimize_passes = std::stoi(v); }},
      {"no-llc-opt", "--no-llc-opt", [&](const std::string& v) { opt.no_llc_opt = (v != "false" && v != "0"); }},
      {"signed-pool", "--signed-pool", [&](const std::string& v) { opt.pipeline.signed_pooling = (v != "false" && v != "0"); }},
      {"znorm", "--znorm", [&](const std::string& v) { opt.pipeline.znorm = (v != "false" && v != "0"); }},
  };
  for (const auto& b : bindings) {
    if (given(b.flag)) continue;
    if (const auto v = lookup(b.key)) b.apply(*v);
  }
}

rpbof::PipelineConfig finalize_pipeline(Options& opt, bool need_codebook) {
  rpbof::PipelineConfig cfg = opt.pipeline;
  cfg.grid.patch_sizes = parse_int_list(opt.patch_sizes);
  if (opt.epsilon > 0.0) cfg.embedding.epsilon = opt.epsilon;
  if (opt.norm == "euclidean")
    cfg.embedding.norm = rpbof::DistanceNorm::euclidean;
  else if (opt.norm == "manhattan")
    cfg.embedding.norm = rpbof::DistanceNorm::manhattan;
  else if (opt.norm == "chebyshev")
    cfg.embedding.norm = rpbof::DistanceNorm::chebyshev;
  else
    throw ConfigError("unknown norm '" + opt.norm + "'");
  if (opt.sigma > 0.0) {
    cfg.llc.sigma = opt.sigma;
    cfg.sigma_auto = false;
  }
  if (!opt.codebook_sweep.empty())
    cfg.codebook_sweep = parse_int_list(opt.codebook_sweep);
  if (!opt.c_grid.empty()) cfg.cv.c_grid = parse_double_list(opt.c_grid);
  cfg.llc_optimize = !opt.no_llc_opt;
  if (need_codebook && cfg.codebook_size == 0 && cfg.codebook_sweep.empty())
    cfg.codebook_sweep = {50, 100, 250, 500, 1000, 2000, 4000, 8000};
  return cfg;
}

rpbof::Dataset load_dataset(const Options& opt, bool validated = true) {
  if (opt.dataset.empty()) throw ConfigError("--dataset is required");
  auto d = rpbof::load_ucr_dataset(opt.data_root, opt.dataset);
  if (validated) {
    const auto findings = rpbof::validate_dataset(d);
    if (!findings.empty())
      throw DataError("invalid dataset " + d.name + ": " +
                      findings.front().message + " (and " +
                      std::to_string(findings.size() - 1) + " more)");
  }
  return d;
}

std::filesystem::path out_path(const Options& opt, const std::string& name) {
  std::filesystem::create_directories(opt.out_dir);
  return std::filesystem::path(opt.out_dir) / name;
}

void attach_baselines(rpbof::ExperimentReport& report, const rpbof::Dataset& d,
                      const Options& opt) {
  std::optional<double> window;
  if (opt.window > 0.0) window = opt.window;
  if (opt.baseline == "euclid" || opt.baseline == "both")
    report.baseline_euclidean = rpbof::baseline_1nn_euclidean(d);
  if (opt.baseline == "dtw" || opt.baseline == "both") {
    report.baseline_dtw = rpbof::baseline_1nn_dtw(d, window);
    report.baseline_dtw_window = window ? *window : 1.0;
  }
}

void emit_report(const rpbof::ExperimentReport& report, const Options& opt,
                 const std::string& stem) {
  if (opt.format == "csv") {
    const auto path = out_path(opt, stem + ".csv");
    rpbof::write_sweep_csv(path, {report});
    std::cout << "report written to " << path.string() << "\n";
  } else {
    const auto path = out_path(opt, stem + ".json");
    rpbof::write_report_json(path, report);
    std::cout << "report written to " << path.string() << "\n";
  }
}

int cmd_encode(Options& opt) {
  const auto d = load_dataset(opt);
  auto cfg = finalize_pipeline(opt, false);
  const auto& series = opt.split == "test" ? d.test : d.train;
  const int count = opt.count > 0
                        ? std::min<int>(opt.count, static_cast<int>(series.size()))
                        : static_cast<int>(series.size());
  const auto fmt = opt.image_format == "png" ? rpbof::ImageFormat::png
                                             : rpbof::ImageFormat::pgm;
  const char* ext = opt.image_format == "png" ? ".png" : ".pgm";
  for (int i = 0; i < count; ++i) {
    const auto& ts = series[static_cast<std::size_t>(i)];
    const auto img = rpbof::encode_series(ts, cfg.embedding, cfg.max_side);
    const std::string stem = d.name + "_" + opt.split + "_" +
                             std::to_string(ts.id) + "_c" +
                             std::to_string(ts.label);
    rpbof::export_image(img, out_path(opt, stem + ext), fmt);
    if (opt.dump_descriptors) {
      const auto descr = rpbof::dense_descriptors(img, cfg.grid);
      rpbof::write_descriptor_dump(out_path(opt, stem + ".descr.txt"), ts.id,
                                   descr);
    }
  }
  std::cout << "encoded " << count << " series to " << opt.out_dir << "\n";
  return 0;
}

int cmd_train(Options& opt) {
  const auto d = load_dataset(opt);
  const auto cfg = finalize_pipeline(opt, true);
  rpbof::StageTimes times;
  const auto model = rpbof::train_model(d, cfg, &times);
  const auto model_file = out_path(opt, d.name + ".model");
  rpbof::save_model(model_file, model);
  std::cout << "model written to " << model_file.string()
            << "  (M=" << model.selected_M << ", C=" << model.selected_C
            << ", sigma=" << model.sigma_used << ")\n";

  if (opt.export_images > 0) {
    const int n = std::min<int>(opt.export_images,
                                static_cast<int>(d.train.size()));
    for (int i = 0; i < n; ++i) {
      const auto img = rpbof::encode_series(d.train[static_cast<std::size_t>(i)],
                                            cfg.embedding, cfg.max_side);
      rpbof::export_image(img,
                          out_path(opt, d.name + "_train_" + std::to_string(i) +
                                            ".pgm"),
                          rpbof::ImageFormat::pgm);
    }
  }

  rpbof::ExperimentReport report;
  report.dataset = d.name;
  report.config = cfg;
  report.times = times;
  report.selected_M = model.selected_M;
  report.selected_C = model.selected_C;
  report.sigma_used = model.sigma_used;
  report.confusion = Eigen::MatrixXi::Zero(d.class_count, d.class_count);
  emit_report(report, opt, d.name + "_train_report");
  return 0;
}

int cmd_evaluate(Options& opt) {
  const auto d = load_dataset(opt);
  const std::string model_file =
      opt.model_path.empty()
          ? out_path(opt, d.name + ".model").string()
          : opt.model_path;
  const auto model = rpbof::load_model(model_file);

  rpbof::ExperimentReport report;
  report.dataset = d.name;
  report.config = model.config;
  report.selected_M = model.selected_M;
  report.selected_C = model.selected_C;
  report.sigma_used = model.sigma_used;
  report.confusion = rpbof::evaluate_confusion(model, d.test, &report.times);
  report.error_rate = rpbof::error_rate_of(report.confusion);
  attach_baselines(report, d, opt);
  emit_report(report, opt, d.name + "_eval_report");
  std::cout << "test error rate: " << report.error_rate * 100.0 << "%\n";
  return 0;
}

int cmd_sweep(Options& opt) {
  const auto d = load_dataset(opt);
  const auto cfg = finalize_pipeline(opt, true);
  const auto cells = rpbof::make_sweep_cells(
      opt.m_list.empty() ? std::vector<int>{} : parse_int_list(opt.m_list),
      opt.tau_list.empty() ? std::vector<int>{} : parse_int_list(opt.tau_list),
      opt.M_list.empty() ? std::vector<int>{} : parse_int_list(opt.M_list),
      opt.eps_list.empty() ? std::vector<double>{}
                           : parse_double_list(opt.eps_list));
  if (cells.size() == 1)
    std::cerr << "rpbof: sweep over a single cell; did you mean --m-list / "
                 "--tau-list / --M-list?\n";
  const auto reports = rpbof::sweep(d, cfg, cells);
  const auto path = out_path(opt, d.name + "_sweep.csv");
  rpbof::write_sweep_csv(path, reports);
  std::cout << "sweep of " << reports.size() << " cells written to "
            << path.string() << "\n";
  return 0;
}

int cmd_baseline(Options& opt) {
  const auto d = load_dataset(opt);
  std::optional<double> window;
  if (opt.window > 0.0) window = opt.window;
  if (opt.baseline == "none") opt.baseline = "both";
  if (opt.format == "csv") {
    std::cout << "dataset,method,window,error_rate\n";
    if (opt.baseline == "euclid" || opt.baseline == "both")
      std::cout << d.name << ",1nn_euclidean,,"
                << rpbof::baseline_1nn_euclidean(d) << "\n";
    if (opt.baseline == "dtw" || opt.baseline == "both")
      std::cout << d.name << ",1nn_dtw," << (window ? *window : 1.0) << ','
                << rpbof::baseline_1nn_dtw(d, window) << "\n";
  } else {
    std::cout << "{\n  \"dataset\": \"" << d.name << "\"";
    if (opt.baseline == "euclid" || opt.baseline == "both")
      std::cout << ",\n  \"1nn_euclidean_error\": "
                << rpbof::baseline_1nn_euclidean(d);
    if (opt.baseline == "dtw" || opt.baseline == "both")
      std::cout << ",\n  \"1nn_dtw_error\": "
                << rpbof::baseline_1nn_dtw(d, window) << ",\n  \"window\": "
                << (window ? *window : 1.0);
    std::cout << "\n}\n";
  }
  return 0;
}

int cmd_runtime(Options& opt) {
  const auto d = load_dataset(opt);
  const auto cfg = finalize_pipeline(opt, true);
  const auto rows = rpbof::compare_runtime(d, cfg);
  const auto path = out_path(opt, d.name + "_runtime.csv");
  rpbof::write_runtime_csv(path, rows);
  rpbof::write_runtime_csv(std::cout, rows);
  std::cout << "runtime table written to " << path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-series classification via recurrence-plot textures"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--dataset", opt.dataset, "dataset name (<name>_TRAIN/_TEST)");
    cmd->add_option("--data-root", opt.data_root, "directory with dataset files");
    cmd->add_option("--out-dir", opt.out_dir, "output directory");
    cmd->add_option("--format", opt.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--config", opt.config_file, "key-value config file");
    cmd->add_option("--m", opt.pipeline.embedding.m, "phase-space dimension");
    cmd->add_option("--tau", opt.pipeline.embedding.tau, "embedding delay");
    cmd->add_option("--epsilon", opt.epsilon,
                    "binary-mode threshold distance (gray mode when unset)");
    cmd->add_flag("--epsilon-relative", opt.pipeline.embedding.epsilon_relative,
                  "treat epsilon as a fraction of each image's max distance");
    cmd->add_option("--norm", opt.norm, "state distance norm")
        ->check(CLI::IsMember({"euclidean", "manhattan", "chebyshev"}));
    cmd->add_option("--patch-sizes", opt.patch_sizes, "dense grid patch sizes");
    cmd->add_option("--stride", opt.pipeline.grid.stride, "dense grid stride");
    cmd->add_option("--max-side", opt.pipeline.max_side,
                    "downsize images above this side length");
    cmd->add_option("--codebook-size", opt.pipeline.codebook_size,
                    "fixed codebook size M");
    cmd->add_option("--codebook-sweep", opt.codebook_sweep,
                    "CV candidates for M, e.g. 50,100,250");
    cmd->add_option("--knn", opt.pipeline.llc.knn, "LLC neighbor count");
    cmd->add_option("--mu-reg", opt.pipeline.llc.mu_reg,
                    "locality regularization weight");
    cmd->add_option("--sigma", opt.sigma,
                    "locality bandwidth (data-driven when unset)");
    cmd->add_flag("--no-llc-opt", opt.no_llc_opt,
                  "skip incremental codebook optimization");
    cmd->add_option("--passes", opt.pipeline.optimize_passes,
                    "optimization passes over the bag");
    cmd->add_option("--c-grid", opt.c_grid, "explicit SVM C grid");
    cmd->add_option("--folds", opt.pipeline.cv.folds, "CV folds");
    cmd->add_option("--seed", opt.pipeline.seed, "master seed");
    cmd->add_option("--bag-cap", opt.pipeline.bag_cap,
                    "max descriptors sampled for codebook training");
    cmd->add_flag("--signed-pool", opt.pipeline.signed_pooling,
                  "pool signed codes instead of absolute values");
    cmd->add_flag("--znorm", opt.pipeline.znorm,
                  "z-normalize series at load time");
    cmd->add_flag("--svm-bias", opt.pipeline.svm.use_bias,
                  "train an augmented-feature bias term");
    return cmd;
  };

  auto* encode = add_common(app.add_subcommand("encode", "series -> images"));
  encode->add_option("--count", opt.count, "series to encode (0 = all)");
  encode->add_option("--split", opt.split, "train|test")
      ->check(CLI::IsMember({"train", "test"}));
  encode->add_option("--image-format", opt.image_format, "pgm|png")
      ->check(CLI::IsMember({"pgm", "png"}));
  encode->add_flag("--dump-descriptors", opt.dump_descriptors,
                   "also dump dense descriptors as text");

  auto* train = add_common(app.add_subcommand("train", "fit a model on _TRAIN"));
  train->add_option("--export-images", opt.export_images,
                    "export this many train images alongside the model");

  auto* evaluate =
      add_common(app.add_subcommand("evaluate", "score a model on _TEST"));
  evaluate->add_option("--model", opt.model_path, "model file from `train`");
  evaluate->add_option("--baseline", opt.baseline,
                       "also compute baselines: euclid|dtw|both")
      ->check(CLI::IsMember({"none", "euclid", "dtw", "both"}));
  evaluate->add_option("--window", opt.window,
                       "DTW window fraction (full window when unset)");

  auto* sweep_cmd = add_common(
      app.add_subcommand("sweep", "one experiment per parameter cell"));
  sweep_cmd->add_option("--m-list", opt.m_list, "m values, e.g. 1,3,6");
  sweep_cmd->add_option("--tau-list", opt.tau_list, "tau values");
  sweep_cmd->add_option("--M-list", opt.M_list, "fixed codebook sizes");
  sweep_cmd->add_option("--epsilon-list", opt.eps_list,
                        "binary thresholds (adds binary-mode cells)");

  auto* baseline_cmd =
      add_common(app.add_subcommand("baseline", "1-NN baselines"));
  baseline_cmd->add_option("--method", opt.baseline, "euclid|dtw|both")
      ->check(CLI::IsMember({"euclid", "dtw", "both"}));
  baseline_cmd->add_option("--window", opt.window,
                           "DTW window fraction (full window when unset)");

  auto* runtime =
      add_common(app.add_subcommand("runtime", "stage-time comparison"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (!opt.config_file.empty()) {
      apply_kv_config(read_kv_config(opt.config_file), opt.dataset, *cmd, opt);
    } else if (std::filesystem::exists("rpbof.conf")) {
      apply_kv_config(read_kv_config("rpbof.conf"), opt.dataset, *cmd, opt);
    }

    if (cmd == encode) return cmd_encode(opt);
    if (cmd == train) return cmd_train(opt);
    if (cmd == evaluate) return cmd_evaluate(opt);
    if (cmd == sweep_cmd) return cmd_sweep(opt);
    if (cmd == baseline_cmd) return cmd_baseline(opt);
    if (cmd == runtime) return cmd_runtime(opt);
    throw ConfigError("unknown subcommand");
  } catch (const rpbof::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rpbof::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const rpbof::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
