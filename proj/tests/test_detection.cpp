#include "saswarm/detection.hpp"
#include "saswarm/errors.hpp"
#include "saswarm/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace saswarm;
using namespace saswarm::detection;

namespace {

RasterSpec small_spec(int w, int h, double cell = 1.0) {
  RasterSpec spec;
  spec.origin = {0.0, 0.0};
  spec.cell = cell;
  spec.width = w;
  spec.height = h;
  return spec;
}

GroundRaster filled_raster(const RasterSpec& spec, float r, float g, float b, float th) {
  GroundRaster img = GroundRaster::zeros(spec);
  img.red.setConstant(r);
  img.green.setConstant(g);
  img.blue.setConstant(b);
  img.thermal.setConstant(th);
  img.covered.setConstant(1);
  img.box = {0, 0, spec.width, spec.height};
  return img;
}

}  // namespace

TEST_CASE("constant image scores zero everywhere") {
  const auto img = filled_raster(small_spec(16, 16), 0.3f, 0.4f, 0.5f, 20.0f);
  const auto field = rx_scores(img);
  for (int ix = 0; ix < 16; ++ix)
    for (int iy = 0; iy < 16; ++iy) CHECK(field.score(iy, ix) == 0.0f);
}

TEST_CASE("a single thermally different cell attains the strict maximum score") {
  auto img = filled_raster(small_spec(16, 16), 0.3f, 0.4f, 0.5f, 20.0f);
  img.thermal(7, 9) = 37.0f;
  const auto field = rx_scores(img);
  float best = -1.0f;
  int bx = -1, by = -1;
  for (int ix = 0; ix < 16; ++ix)
    for (int iy = 0; iy < 16; ++iy)
      if (field.score(iy, ix) > best) {
        best = field.score(iy, ix);
        bx = ix;
        by = iy;
      }
  CHECK(bx == 9);
  CHECK(by == 7);
  for (int ix = 0; ix < 16; ++ix)
    for (int iy = 0; iy < 16; ++iy)
      if (ix != 9 || iy != 7) CHECK(field.score(iy, ix) < best);
}

TEST_CASE("detector needs at least 32 covered cells") {
  auto img = filled_raster(small_spec(8, 8), 0.1f, 0.1f, 0.1f, 1.0f);
  img.covered.setConstant(0);
  img.box = CellBox{0, 0, 4, 4};
  for (int ix = 0; ix < 4; ++ix)
    for (int iy = 0; iy < 4; ++iy) img.covered(iy, ix) = 1;
  CHECK_THROWS_AS(rx_scores(img), DetectorUnavailable);
}

TEST_CASE("scores match the hand-rolled Mahalanobis oracle") {
  // Toy data with nontrivial covariance on two active bands.
  const std::vector<std::vector<double>> toy = {
      {1.0, 2.0}, {2.0, 4.5}, {3.0, 5.5}, {4.0, 9.0}, {5.0, 9.5},
      {1.5, 3.0}, {2.5, 5.2}, {3.5, 7.1}, {4.5, 8.2}, {0.5, 1.2},
  };
  // Embed in the 4-band raster with the remaining bands constant.
  auto spec = small_spec(static_cast<int>(toy.size()), 4);
  GroundRaster img = GroundRaster::zeros(spec);
  std::vector<std::vector<double>> samples;
  for (int iy = 0; iy < 4; ++iy) {
    for (int ix = 0; ix < spec.width; ++ix) {
      const auto& row = toy[static_cast<std::size_t>(ix)];
      const double jitter = 0.1 * iy;  // need >= 32 cells: replicate with offsets
      img.red(iy, ix) = static_cast<float>(row[0] + jitter);
      img.green(iy, ix) = static_cast<float>(row[1] - jitter);
      img.blue(iy, ix) = 1.0f;
      img.thermal(iy, ix) = 5.0f;
      img.covered(iy, ix) = 1;
      samples.push_back({row[0] + jitter, row[1] - jitter, 1.0, 5.0});
    }
  }
  img.box = {0, 0, spec.width, 4};
  const auto field = rx_scores(img);
  const auto oracle = oracles::mahalanobis_oracle(samples);
  std::size_t k = 0;
  for (int iy = 0; iy < 4; ++iy)
    for (int ix = 0; ix < spec.width; ++ix, ++k)
      CHECK(field.score(iy, ix) ==
            doctest::Approx(oracle[k]).epsilon(1e-5));  // float storage limits agreement
}

TEST_CASE("rx ranking is invariant to positive channel scaling") {
  Rng rng(4);
  auto spec = small_spec(24, 24);
  GroundRaster img = GroundRaster::zeros(spec);
  for (int ix = 0; ix < 24; ++ix)
    for (int iy = 0; iy < 24; ++iy) {
      img.red(iy, ix) = static_cast<float>(rng.uniform(0.0, 1.0));
      img.green(iy, ix) = static_cast<float>(rng.uniform(0.0, 1.0));
      img.blue(iy, ix) = static_cast<float>(rng.uniform(0.0, 1.0));
      img.thermal(iy, ix) = static_cast<float>(rng.uniform(15.0, 25.0));
      img.covered(iy, ix) = 1;
    }
  img.box = {0, 0, 24, 24};
  GroundRaster scaled = img;
  scaled.red *= 3.5f;
  scaled.green *= 3.5f;
  scaled.blue *= 3.5f;
  scaled.thermal *= 3.5f;

  const auto mask_a = threshold_mask(rx_scores(img), 0.9);
  const auto mask_b = threshold_mask(rx_scores(scaled), 0.9);
  CHECK(mask_a.same_cells(mask_b));
}

TEST_CASE("threshold quantile contract") {
  auto spec = small_spec(512, 512);
  GroundRaster img = GroundRaster::zeros(spec);
  // Distinct scores cell by cell via a ramp in one band.
  long k = 0;
  for (int ix = 0; ix < 512; ++ix)
    for (int iy = 0; iy < 512; ++iy, ++k) {
      img.red(iy, ix) = static_cast<float>(k) / (512.0f * 512.0f);
      img.covered(iy, ix) = 1;
    }
  img.box = {0, 0, 512, 512};
  const auto field = rx_scores(img);

  const auto mask = threshold_mask(field, 0.9998);
  CHECK(mask.count() <= 53);  // ceil(0.0002 * 262144)
  CHECK(mask.count() > 0);

  CHECK(threshold_mask(field, 0.0).count() == 512L * 512L);
  CHECK(threshold_mask(field, 1.0).count() == 0);
  CHECK_THROWS_AS(threshold_mask(field, 1.5), RejectedInput);

  // Flagged count never exceeds ceil((1-q) * covered) for any q.
  for (double q : {0.1, 0.5, 0.9, 0.99, 0.999}) {
    const long flagged = threshold_mask(field, q).count();
    CHECK(flagged <= static_cast<long>(std::ceil((1.0 - q) * 512.0 * 512.0)));
  }
}

TEST_CASE("largest blob: pinned tiny cases") {
  auto spec = small_spec(16, 16);
  BinaryRaster mask = BinaryRaster::zeros(spec);
  CHECK_FALSE(largest_blob(mask).has_value());

  mask.set(5, 5);
  mask.box = {5, 5, 6, 6};
  auto single = largest_blob(mask);
  REQUIRE(single.has_value());
  CHECK(single->member_count == 1);
  CHECK(single->contour_size == 1);
  CHECK(single->centroid.x() == doctest::Approx(5.5));
  CHECK(single->centroid.y() == doctest::Approx(5.5));

  // Solid 3x3: contour 8 (the center cell has all 4-neighbors inside).
  BinaryRaster square = BinaryRaster::zeros(spec);
  for (int ix = 2; ix < 5; ++ix)
    for (int iy = 7; iy < 10; ++iy) square.set(ix, iy);
  square.box = {2, 7, 5, 10};
  auto blob = largest_blob(square);
  REQUIRE(blob.has_value());
  CHECK(blob->member_count == 9);
  CHECK(blob->contour_size == 8);
}

TEST_CASE("largest blob agrees with the flood-fill oracle on 100 random masks") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 16 + static_cast<int>(rng.uniform(0.0, 112.0));
    const int h = 16 + static_cast<int>(rng.uniform(0.0, 112.0));
    auto spec = small_spec(w, h);
    BinaryRaster mask = BinaryRaster::zeros(spec);
    const double fill = rng.uniform(0.02, 0.4);
    CellBox box = CellBox::none();
    for (int ix = 0; ix < w; ++ix)
      for (int iy = 0; iy < h; ++iy)
        if (rng.bernoulli(fill)) {
          mask.set(ix, iy);
          box = box.unite(CellBox{ix, iy, ix + 1, iy + 1});
        }
    mask.box = box;

    const auto blob = largest_blob(mask);
    const auto oracle = oracles::best_oracle_blob(oracles::flood_fill_blobs(mask));
    if (!blob) {
      CHECK(oracle.members == 0);
      continue;
    }
    CHECK(blob->contour_size == oracle.contour);
    CHECK(blob->member_count == oracle.members);
    CHECK(blob->centroid.x() == doctest::Approx(oracle.contour_centroid.x()).epsilon(1e-9));
    CHECK(blob->centroid.y() == doctest::Approx(oracle.contour_centroid.y()).epsilon(1e-9));
    CHECK(blob->contour_size <= blob->member_count);
    CHECK(blob->centroid.x() >= mask.spec.origin.x() + blob->bbox.x0 * mask.spec.cell);
    CHECK(blob->centroid.x() <= mask.spec.origin.x() + blob->bbox.x1 * mask.spec.cell);
  }
}

TEST_CASE("objective of an empty integral is zero with no position") {
  auto spec = small_spec(8, 8);
  const auto obj = objective_of(BinaryRaster::zeros(spec));
  CHECK(obj.score == 0.0);
  CHECK_FALSE(obj.position.has_value());
}
