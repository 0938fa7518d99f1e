#include <cstring>
#include <fstream>
#include <sstream>

#include "rpbof/pipeline.hpp"

// Little-endian binary containers. Every file starts with a 4-byte magic
// and a u32 version; loads reject anything they do not recognize, and
// save/load round-trips are byte-exact.

namespace rpbof {

namespace {

constexpr std::uint32_t kCodebookMagic = 0x4B425052;  // "RPBK"
constexpr std::uint32_t kSvmMagic = 0x4D4C5052;       // "RPLM"
constexpr std::uint32_t kModelMagic = 0x444D5052;     // "RPMD"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw DataError("truncated model file");
  return value;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  put<std::int64_t>(out, m.rows());
  put<std::int64_t>(out, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in) {
  const auto rows = get<std::int64_t>(in);
  const auto cols = get<std::int64_t>(in);
  if (rows < 0 || cols < 0 || rows * cols > (1LL << 31))
    throw DataError("corrupt matrix header in model file");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
  return m;
}

void put_vector(std::ostream& out, const Eigen::VectorXd& v) {
  put<std::int64_t>(out, v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) put<double>(out, v[i]);
}

Eigen::VectorXd get_vector(std::istream& in) {
  const auto n = get<std::int64_t>(in);
  if (n < 0 || n > (1LL << 31)) throw DataError("corrupt vector header");
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = get<double>(in);
  return v;
}

void write_codebook_block(std::ostream& out, const Codebook& cb) {
  put(out, kCodebookMagic);
  put(out, kVersion);
  put<std::uint64_t>(out, cb.rng_seed);
  put<std::uint8_t>(out, cb.provenance == Codebook::Provenance::optimized);
  put<std::uint8_t>(out, cb.optimized_with.has_value());
  if (cb.optimized_with) {
    put<double>(out, cb.optimized_with->mu_reg);
    put<double>(out, cb.optimized_with->sigma);
    put<std::int32_t>(out, cb.optimized_with->passes);
  }
  put_matrix(out, cb.words);
}

Codebook read_codebook_block(std::istream& in) {
  if (get<std::uint32_t>(in) != kCodebookMagic)
    throw DataError("not a codebook container");
  if (get<std::uint32_t>(in) != kVersion)
    throw DataError("unsupported codebook container version");
  Codebook cb;
  cb.rng_seed = get<std::uint64_t>(in);
  cb.provenance = get<std::uint8_t>(in) ? Codebook::Provenance::optimized
                                        : Codebook::Provenance::initial;
  if (get<std::uint8_t>(in)) {
    Codebook::OptimizeParams op;
    op.mu_reg = get<double>(in);
    op.sigma = get<double>(in);
    op.passes = get<std::int32_t>(in);
    cb.optimized_with = op;
  }
  cb.words = get_matrix(in);
  return cb;
}

void write_svm_block(std::ostream& out, const LinearModel& m) {
  put(out, kSvmMagic);
  put(out, kVersion);
  put<double>(out, m.C);
  put_matrix(out, m.weights);
  put_vector(out, m.biases);
  const auto& raw = m.class_map.raw_labels();
  put<std::int64_t>(out, static_cast<std::int64_t>(raw.size()));
  for (const long long r : raw) put<std::int64_t>(out, r);
}

LinearModel read_svm_block(std::istream& in) {
  if (get<std::uint32_t>(in) != kSvmMagic)
    throw DataError("not a linear-model container");
  if (get<std::uint32_t>(in) != kVersion)
    throw DataError("unsupported linear-model container version");
  LinearModel m;
  m.C = get<double>(in);
  m.weights = get_matrix(in);
  m.biases = get_vector(in);
  const auto n = get<std::int64_t>(in);
  if (n < 0 || n > (1 << 20)) throw DataError("corrupt label map");
  std::vector<long long> raw(static_cast<std::size_t>(n));
  for (auto& r : raw) r = get<std::int64_t>(in);
  m.class_map = LabelMap(std::move(raw));
  return m;
}

void write_config_block(std::ostream& out, const PipelineConfig& c) {
  put<std::int32_t>(out, c.embedding.m);
  put<std::int32_t>(out, c.embedding.tau);
  put<std::uint8_t>(out, c.embedding.epsilon.has_value());
  if (c.embedding.epsilon) put<double>(out, *c.embedding.epsilon);
  put<std::uint8_t>(out, c.embedding.epsilon_relative);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(c.embedding.norm));
  put<std::int32_t>(out, static_cast<std::int32_t>(c.grid.patch_sizes.size()));
  for (const int s : c.grid.patch_sizes) put<std::int32_t>(out, s);
  put<std::int32_t>(out, c.grid.stride);
  put<std::int32_t>(out, c.llc.knn);
  put<double>(out, c.llc.sigma);
  put<double>(out, c.llc.mu_reg);
  put<double>(out, c.llc.bias_cutoff);
  put<double>(out, c.llc.ridge);
  put<std::uint8_t>(out, c.sigma_auto);
  put<std::int32_t>(out, c.codebook_size);
  put<std::int32_t>(out, static_cast<std::int32_t>(c.codebook_sweep.size()));
  for (const int m : c.codebook_sweep) put<std::int32_t>(out, m);
  put<std::int32_t>(out, c.cv.folds);
  put<std::int32_t>(out, static_cast<std::int32_t>(c.cv.c_grid.size()));
  for (const double v : c.cv.c_grid) put<double>(out, v);
  put<std::uint64_t>(out, c.cv.seed);
  put<std::uint64_t>(out, c.seed);
  put<std::int32_t>(out, c.max_side);
  put<std::uint8_t>(out, c.llc_optimize);
  put<std::int32_t>(out, c.optimize_passes);
  put<std::uint8_t>(out, c.signed_pooling);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(c.bag_cap));
  put<std::uint8_t>(out, c.znorm);
  put<std::int32_t>(out, c.kmeans_max_iters);
  put<double>(out, c.svm.tol);
  put<std::int32_t>(out, c.svm.max_epochs);
  put<std::uint8_t>(out, c.svm.use_bias);
}

PipelineConfig read_config_block(std::istream& in) {
  PipelineConfig c;
  c.embedding.m = get<std::int32_t>(in);
  c.embedding.tau = get<std::int32_t>(in);
  if (get<std::uint8_t>(in)) c.embedding.epsilon = get<double>(in);
  c.embedding.epsilon_relative = get<std::uint8_t>(in) != 0;
  c.embedding.norm = static_cast<DistanceNorm>(get<std::uint8_t>(in));
  const auto n_sizes = get<std::int32_t>(in);
  if (n_sizes < 1 || n_sizes > 64) throw DataError("corrupt patch size list");
  c.grid.patch_sizes.resize(static_cast<std::size_t>(n_sizes));
  for (auto& s : c.grid.patch_sizes) s = get<std::int32_t>(in);
  c.grid.stride = get<std::int32_t>(in);
  c.llc.knn = get<std::int32_t>(in);
  c.llc.sigma = get<double>(in);
  c.llc.mu_reg = get<double>(in);
  c.llc.bias_cutoff = get<double>(in);
  c.llc.ridge = get<double>(in);
  c.sigma_auto = get<std::uint8_t>(in) != 0;
  c.codebook_size = get<std::int32_t>(in);
  const auto n_sweep = get<std::int32_t>(in);
  if (n_sweep < 0 || n_sweep > 1024) throw DataError("corrupt sweep list");
  c.codebook_sweep.resize(static_cast<std::size_t>(n_sweep));
  for (auto& m : c.codebook_sweep) m = get<std::int32_t>(in);
  c.cv.folds = get<std::int32_t>(in);
  const auto n_grid = get<std::int32_t>(in);
  if (n_grid < 0 || n_grid > 1024) throw DataError("corrupt C grid");
  c.cv.c_grid.resize(static_cast<std::size_t>(n_grid));
  for (auto& v : c.cv.c_grid) v = get<double>(in);
  c.cv.seed = get<std::uint64_t>(in);
  c.seed = get<std::uint64_t>(in);
  c.max_side = get<std::int32_t>(in);
  c.llc_optimize = get<std::uint8_t>(in) != 0;
  c.optimize_passes = get<std::int32_t>(in);
  c.signed_pooling = get<std::uint8_t>(in) != 0;
  c.bag_cap = static_cast<std::size_t>(get<std::uint64_t>(in));
  c.znorm = get<std::uint8_t>(in) != 0;
  c.kmeans_max_iters = get<std::int32_t>(in);
  c.svm.tol = get<double>(in);
  c.svm.max_epochs = get<std::int32_t>(in);
  c.svm.use_bias = get<std::uint8_t>(in) != 0;
  return c;
}

void write_model_stream(std::ostream& out, const TrainedModel& model) {
  put(out, kModelMagic);
  put(out, kVersion);
  write_config_block(out, model.config);
  put<double>(out, model.sigma_used);
  put<std::int32_t>(out, model.selected_M);
  put<double>(out, model.selected_C);
  write_codebook_block(out, model.codebook);
  write_svm_block(out, model.svm);
}

TrainedModel read_model_stream(std::istream& in) {
  if (get<std::uint32_t>(in) != kModelMagic)
    throw DataError("not a model container");
  if (get<std::uint32_t>(in) != kVersion)
    throw DataError("unsupported model container version");
  TrainedModel model;
  model.config = read_config_block(in);
  model.sigma_used = get<double>(in);
  model.selected_M = get<std::int32_t>(in);
  model.selected_C = get<double>(in);
  model.codebook = read_codebook_block(in);
  model.svm = read_svm_block(in);
  return model;
}

}  // namespace

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_codebook_block(out, cb);
  if (!out) throw DataError("write failure on " + path.string());
}

Codebook load_codebook(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_codebook_block(in);
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_model_stream(out, model);
  if (!out) throw DataError("write failure on " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_model_stream(in);
}

std::string serialize_model(const TrainedModel& model) {
  std::ostringstream out(std::ios::binary);
  write_model_stream(out, model);
  return out.str();
}

}  // namespace rpbof
