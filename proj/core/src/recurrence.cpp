#include "rpbof/recurrence.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

namespace rpbof {

void EmbeddingParams::validate() const {
  if (m < 1) throw ConfigError("embedding dimension m must be >= 1");
  if (tau < 1) throw ConfigError("embedding delay tau must be >= 1");
  if (epsilon && *epsilon <= 0.0)
    throw ConfigError("threshold epsilon must be > 0");
  if (epsilon && epsilon_relative && *epsilon > 1.0)
    throw ConfigError("relative epsilon must be in (0,1]");
}

Eigen::MatrixXd embed(const TimeSeries& x, const EmbeddingParams& p) {
  p.validate();
  const int l = x.length();
  const int K = p.state_count(l);
  if (K < 2) {
    throw DataError("series of length " + std::to_string(l) +
                    " too short for (m=" + std::to_string(p.m) +
                    ", tau=" + std::to_string(p.tau) + ")");
  }
  Eigen::MatrixXd states(K, p.m);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < p.m; ++j)
      states(i, j) = x.values[static_cast<std::size_t>(i + j * p.tau)];
  return states;
}

Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& states,
                                DistanceNorm norm) {
  const auto K = states.rows();
  if (K == 0) throw DataError("distance_matrix: empty state list");
  Eigen::MatrixXd d(K, K);
  for (Eigen::Index i = 0; i < K; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < K; ++j) {
      const auto diff = states.row(i) - states.row(j);
      double v = 0.0;
      switch (norm) {
        case DistanceNorm::euclidean: v = diff.norm(); break;
        case DistanceNorm::manhattan: v = diff.cwiseAbs().sum(); break;
        case DistanceNorm::chebyshev: v = diff.cwiseAbs().maxCoeff(); break;
      }
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

RecurrenceImage to_recurrence_image(const Eigen::MatrixXd& d,
                                    const EmbeddingParams& p, int source_id) {
  if (d.rows() != d.cols()) throw DataError("distance matrix not square");
  if ((d.array() < 0.0).any())
    throw DataError("distance matrix has a negative entry");

  RecurrenceImage img;
  img.source_id = source_id;
  if (p.epsilon) {
    img.mode = RecurrenceImage::Mode::binary;
    const double eps =
        p.epsilon_relative ? *p.epsilon * d.maxCoeff() : *p.epsilon;
    img.pixels = (eps - d.array() >= 0.0).cast<double>();
  } else {
    img.mode = RecurrenceImage::Mode::gray;
    const double dmax = d.maxCoeff();
    if (dmax == 0.0)
      img.pixels = Eigen::MatrixXd::Zero(d.rows(), d.cols());
    else
      img.pixels = d / dmax;
  }
  return img;
}

RecurrenceImage resize_max_side(const RecurrenceImage& img, int max_side) {
  if (max_side < 16) throw ConfigError("max_side must be >= 16");
  const int K = img.side();
  if (K <= max_side) return img;

  const int T = max_side;
  const double scale = static_cast<double>(K) / static_cast<double>(T);
  std::vector<int> lo(T);
  std::vector<double> frac(T);
  for (int i = 0; i < T; ++i) {
    double u = (i + 0.5) * scale - 0.5;
    if (u < 0.0) u = 0.0;
    if (u > K - 1.0) u = K - 1.0;
    int i0 = static_cast<int>(std::floor(u));
    if (i0 > K - 2) i0 = K - 2;
    lo[i] = i0;
    frac[i] = u - i0;
  }

  RecurrenceImage out;
  out.mode = img.mode;
  out.source_id = img.source_id;
  out.pixels.resize(T, T);
  const auto& src = img.pixels;
  for (int r = 0; r < T; ++r) {
    for (int c = r; c < T; ++c) {
      const int r0 = lo[r], c0 = lo[c];
      const double fr = frac[r], fc = frac[c];
      const double v =
          (1.0 - fr) * ((1.0 - fc) * src(r0, c0) + fc * src(r0, c0 + 1)) +
          fr * ((1.0 - fc) * src(r0 + 1, c0) + fc * src(r0 + 1, c0 + 1));
      out.pixels(r, c) = v;
      out.pixels(c, r) = v;
    }
  }
  return out;
}

RecurrenceImage encode_series(const TimeSeries& x, const EmbeddingParams& p,
                              int max_side) {
  const auto states = embed(x, p);
  const auto d = distance_matrix(states, p.norm);
  return resize_max_side(to_recurrence_image(d, p, x.id), max_side);
}

namespace {

std::vector<unsigned char> quantize_8bit(const Eigen::MatrixXd& pixels) {
  const auto rows = pixels.rows();
  const auto cols = pixels.cols();
  std::vector<unsigned char> bytes(static_cast<std::size_t>(rows * cols));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      long v = std::lround(pixels(r, c) * 255.0);
      if (v < 0) v = 0;
      if (v > 255) v = 255;
      bytes[k++] = static_cast<unsigned char>(v);
    }
  }
  return bytes;
}

void write_pgm(const RecurrenceImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const auto bytes = quantize_8bit(img.pixels);
  out << "P5\n"
      << "# 8-bit gray: byte = round(pixel*255), halves round up\n"
      << img.pixels.cols() << ' ' << img.pixels.rows() << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failure on " + path.string());
}

void write_png(const RecurrenceImage& img, const std::filesystem::path& path) {
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw DataError("cannot write " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw NumericError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw DataError("libpng write failure on " + path.string());
  }

  png_init_io(png, fp);
  const auto w = static_cast<png_uint_32>(img.pixels.cols());
  const auto h = static_cast<png_uint_32>(img.pixels.rows());
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  auto bytes = quantize_8bit(img.pixels);
  for (png_uint_32 r = 0; r < h; ++r)
    png_write_row(png, bytes.data() + static_cast<std::size_t>(r) * w);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace

void export_image(const RecurrenceImage& img, const std::filesystem::path& path,
                  ImageFormat format) {
  switch (format) {
    case ImageFormat::pgm: write_pgm(img, path); break;
    case ImageFormat::png: write_png(img, path); break;
  }
}

}  // namespace rpbof
