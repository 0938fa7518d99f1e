#include "doctest.h"
#include "oracles.hpp"
#include "rpbof/dense_sift.hpp"

using namespace rpbof;

namespace {

RecurrenceImage image_of(const Eigen::MatrixXd& pixels) {
  RecurrenceImage img;
  img.pixels = pixels;
  return img;
}

Eigen::MatrixXd random_image(int side, Rng& rng) {
  Eigen::MatrixXd m(side, side);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c) m(r, c) = rng.next_double();
  return m;
}

Eigen::MatrixXd horizontal_ramp(int side) {
  Eigen::MatrixXd m(side, side);
  for (Eigen::Index r = 0; r < side; ++r)
    for (Eigen::Index c = 0; c < side; ++c)
      m(r, c) = static_cast<double>(c) / side;
  return m;
}

}  // namespace

TEST_SUITE("dense_sift") {

TEST_CASE("gradient field") {
  SUBCASE("constant image has zero magnitude everywhere") {
    const auto f = gradient_field(Eigen::MatrixXd::Constant(8, 8, 0.4));
    CHECK(f.magnitude.isZero(0.0));
  }
  SUBCASE("horizontal ramp points toward +col with uniform magnitude") {
    const auto f = gradient_field(horizontal_ramp(12));
    for (int r = 0; r < 12; ++r)
      for (int c = 0; c < 12; ++c) CHECK(f.orientation(r, c) == 0.0);
    const double interior = f.magnitude(5, 5);
    CHECK(interior > 0.0);
    for (int r = 1; r < 11; ++r)
      for (int c = 1; c < 11; ++c)
        CHECK(f.magnitude(r, c) == doctest::Approx(interior).epsilon(1e-12));
  }
  SUBCASE("5x5 random image matches the finite-difference oracle") {
    Rng rng(11);
    const auto img = random_image(5, rng);
    const auto f = gradient_field(img);
    Eigen::MatrixXd mag, ori;
    oracles::finite_difference_field(img, mag, ori);
    CHECK(oracles::exact_equal(f.magnitude, mag));
    CHECK(oracles::exact_equal(f.orientation, ori));
  }
  SUBCASE("requires side >= 3") {
    CHECK_THROWS_AS(gradient_field(Eigen::MatrixXd::Zero(2, 2)), DataError);
  }
}

TEST_CASE("patch descriptors") {
  SUBCASE("flat patch yields the all-zero vector") {
    const auto f = gradient_field(Eigen::MatrixXd::Constant(16, 16, 0.7));
    CHECK(describe_patch(f, 8, 8, 16).isZero(0.0));
  }
  SUBCASE("non-flat patches are unit norm with components in [0,1]") {
    Rng rng(21);
    const auto f = gradient_field(random_image(32, rng));
    const auto d = describe_patch(f, 16, 16, 32);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.minCoeff() >= 0.0);
    CHECK(d.maxCoeff() <= 1.0 + 1e-12);
  }
  SUBCASE("pure horizontal ramp concentrates every cell in bin 0") {
    const auto f = gradient_field(horizontal_ramp(16));
    const auto d = describe_patch(f, 8, 8, 16);
    REQUIRE(d.size() == 128);
    for (int cell = 0; cell < 16; ++cell) {
      // orientation 0 sits exactly on the bin-0 center: no bilinear spill
      CHECK(d[cell * 8] == doctest::Approx(0.25).epsilon(1e-12));
      for (int bin = 1; bin < 8; ++bin) CHECK(d[cell * 8 + bin] == 0.0);
    }
  }
  SUBCASE("out-of-bounds patches are rejected") {
    Rng rng(4);
    const auto f = gradient_field(random_image(16, rng));
    CHECK_THROWS_AS(describe_patch(f, 4, 8, 16), DataError);
  }
}

TEST_CASE("dense grid coverage") {
  Rng rng(31);
  SUBCASE("16x16 image with scale 16 gives one centered descriptor") {
    const auto set =
        dense_descriptors(image_of(random_image(16, rng)), {.patch_sizes = {16}});
    REQUIRE(set.count() == 1);
    CHECK(set.patches[0].row == 8);
    CHECK(set.patches[0].col == 8);
    CHECK(set.patches[0].scale == 16);
  }
  SUBCASE("48x48 image: per-scale counts 25+16+9+1") {
    const auto set = dense_descriptors(image_of(random_image(48, rng)), {});
    CHECK(set.count() == 51);
    int by_scale[4] = {0, 0, 0, 0};
    for (const auto& key : set.patches) {
      if (key.scale == 16) by_scale[0]++;
      if (key.scale == 24) by_scale[1]++;
      if (key.scale == 32) by_scale[2]++;
      if (key.scale == 48) by_scale[3]++;
    }
    CHECK(by_scale[0] == 25);
    CHECK(by_scale[1] == 16);
    CHECK(by_scale[2] == 9);
    CHECK(by_scale[3] == 1);
  }
  SUBCASE("constant image yields an empty list") {
    const auto set =
        dense_descriptors(image_of(Eigen::MatrixXd::Zero(32, 32)), {});
    CHECK(set.count() == 0);
  }
  SUBCASE("too-small scales are skipped, all-too-small errors") {
    const auto set = dense_descriptors(image_of(random_image(20, rng)),
                                       {.patch_sizes = {16, 64}});
    for (const auto& key : set.patches) CHECK(key.scale == 16);
    CHECK(set.count() > 0);
    CHECK_THROWS_AS(
        dense_descriptors(image_of(random_image(12, rng)), {.patch_sizes = {16}}),
        DataError);
  }
  SUBCASE("grid parameters are validated") {
    CHECK_THROWS_AS(dense_descriptors(image_of(random_image(20, rng)),
                                      {.patch_sizes = {15}}),
                    ConfigError);
    CHECK_THROWS_AS(dense_descriptors(image_of(random_image(20, rng)),
                                      {.patch_sizes = {16}, .stride = 0}),
                    ConfigError);
  }
}

TEST_CASE("properties: counts, norms and invariances") {
  Rng rng(77);
  const auto a = random_image(40, rng);
  const auto b = random_image(40, rng);
  const PatchGridParams grid{.patch_sizes = {16, 24, 32}, .stride = 8};

  SUBCASE("descriptor count depends on geometry, not content") {
    CHECK(dense_descriptors(image_of(a), grid).count() ==
          dense_descriptors(image_of(b), grid).count());
  }

  const auto set = dense_descriptors(image_of(a), grid);

  SUBCASE("every descriptor is unit norm with nonnegative components") {
    for (Eigen::Index i = 0; i < set.count(); ++i) {
      CHECK(set.vectors.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(set.vectors.row(i).minCoeff() >= 0.0);
      CHECK(set.vectors.row(i).maxCoeff() <= 1.0 + 1e-12);
    }
  }
  SUBCASE("adding a constant to all pixels changes nothing") {
    const auto shifted = dense_descriptors(image_of(a.array() + 3.25), grid);
    REQUIRE(shifted.count() == set.count());
    CHECK((shifted.vectors - set.vectors).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("positive scaling changes nothing") {
    const auto scaled = dense_descriptors(image_of(a * 17.5), grid);
    REQUIRE(scaled.count() == set.count());
    CHECK((scaled.vectors - set.vectors).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

}  // TEST_SUITE
