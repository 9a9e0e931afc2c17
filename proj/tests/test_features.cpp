#include <doctest.h>

#include <cmath>

#include "myosynth/errors.hpp"
#include "myosynth/features.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/polygon.hpp"
#include "myosynth/render.hpp"
#include "myosynth/scene.hpp"
#include "support.hpp"

using namespace myosynth;
using namespace myosynth::features;
using geom::Point;
using geom::Polygon;

namespace {

constexpr double kPi = 3.141592653589793;

std::vector<std::pair<int, int>> pixels_of(const Mask& m) {
  std::vector<std::pair<int, int>> px;
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m(x, y)) px.push_back({x, y});
  return px;
}

LabelImage as_labels(const Mask& m) {
  LabelImage l(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) l[i] = m[i];
  return l;
}

Mask rotate90(const Mask& m) {
  Mask r(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) r(m.height() - 1 - y, x) = m(x, y);
  return r;
}

/// Exact calipers: every point pair is a candidate direction.
std::pair<double, double> feret_brute(const std::vector<std::pair<int, int>>& px) {
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (auto a : px)
    for (auto b : px) dmax = std::max(dmax, std::hypot(double(a.first - b.first), double(a.second - b.second)));
  if (px.size() == 1) return {0.0, 0.0};
  bool any = false;
  for (std::size_t i = 0; i < px.size(); ++i)
    for (std::size_t j = i + 1; j < px.size(); ++j) {
      double ex = px[j].first - px[i].first, ey = px[j].second - px[i].second;
      double len = std::hypot(ex, ey);
      double nx = -ey / len, ny = ex / len;
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (auto p : px) {
        double s = p.first * nx + p.second * ny;
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
      dmin = std::min(dmin, hi - lo);
      any = true;
    }
  return {any ? dmin : 0.0, dmax};
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("square perimeter follows the corner-count estimator") {
    for (int s : {2, 5, 10, 40}) {
      Mask m(s + 4, s + 4);
      testutil::paint_rect(m, 2, 2, s, s);
      double want = 0.980 * 4 * (s - 1) - 0.091 * 4 + kPi;
      CHECK(traced_perimeter(pixels_of(m)) == doctest::Approx(want).epsilon(1e-12));
    }
    CHECK(traced_perimeter({{3, 3}}) == doctest::Approx(kPi));
    CHECK(traced_perimeter({}) == 0.0);
  }

  TEST_CASE("square circularity near pi/4; single pixel clamps to 1") {
    Mask m(40, 40);
    testutil::paint_rect(m, 5, 5, 30, 30);
    auto r = measure_objects(as_labels(m), 1.0);
    REQUIRE(r.size() == 1);
    CHECK(std::abs(r[0].circularity - kPi / 4) <= 0.05);
    CHECK(circularity(1.0, kPi) == 1.0);
    CHECK(circularity(5.0, 0.0) == 1.0);
  }

  TEST_CASE("rasterized disc radius 30") {
    Mask m(80, 80);
    testutil::paint_disc(m, 40, 40, 30);
    auto r = measure_objects(as_labels(m), 1.0);
    REQUIRE(r.size() == 1);
    CHECK(r[0].circularity >= 0.95);
    CHECK(std::abs(r[0].equiv_diameter_um - 60.0) <= 0.02 * 60.0);
    CHECK(std::abs(r[0].perimeter_um - 2 * kPi * 30) <= 0.02 * 2 * kPi * 30);
    CHECK(r[0].centroid_x_um == doctest::Approx(40.0));
    CHECK(r[0].centroid_y_um == doctest::Approx(40.0));
  }

  TEST_CASE("rectangle Feret diameters") {
    for (auto [w, h] : {std::pair{10, 4}, std::pair{3, 17}, std::pair{25, 25}}) {
      Mask m(w + 2, h + 2);
      testutil::paint_rect(m, 1, 1, w, h);
      const double um = 0.5;
      auto r = measure_objects(as_labels(m), um);
      REQUIRE(r.size() == 1);
      // Measured on pixel centres: exact values, and within sqrt(2) px of the outer box.
      CHECK(r[0].feret_max_um == doctest::Approx(std::hypot(w - 1, h - 1) * um).epsilon(1e-12));
      CHECK(r[0].feret_min_um == doctest::Approx((std::min(w, h) - 1) * um).epsilon(1e-12));
      CHECK(std::abs(r[0].feret_max_um - std::hypot(w, h) * um) <= std::sqrt(2.0) * um + 1e-9);
      CHECK(std::abs(r[0].feret_min_um - std::min(w, h) * um) <= 1.0 * um + 1e-9);
      CHECK(r[0].area_um2 == doctest::Approx(w * h * um * um));
    }
  }

  TEST_CASE("Feret diameters match the all-pairs oracle") {
    testutil::Rng rng(11);
    for (int t = 0; t < 60; ++t) {
      Mask m = testutil::blob_mask(rng, rng.uniform_int(1, 12), rng.uniform_int(1, 12));
      auto px = pixels_of(m);
      if (px.empty()) continue;
      auto [mn, mx] = feret_diameters(px);
      auto [bmn, bmx] = feret_brute(px);
      REQUIRE(mx == doctest::Approx(bmx).epsilon(1e-12));
      REQUIRE(std::abs(mn - bmn) <= 1e-9);
      REQUIRE(mn <= mx);
    }
  }

  TEST_CASE("shape invariants on random blobs") {
    testutil::Rng rng(12);
    for (int t = 0; t < 60; ++t) {
      Mask m = testutil::blob_mask(rng, rng.uniform_int(4, 50), rng.uniform_int(4, 50));
      auto cc = imgproc::connected_components(m);
      auto shapes = measure_shapes(cc.labels);
      for (std::uint32_t k = 1; k <= cc.count; ++k) {
        const Shape& s = shapes[k];
        REQUIRE(s.area > 0);
        REQUIRE(s.feret_min <= s.feret_max + 1e-12);
        REQUIRE(s.circularity > 0.0);
        REQUIRE(s.circularity <= 1.0);
        double eq = 2 * std::sqrt(double(s.area) / kPi);
        // Feret is taken on pixel centers, so allow one pixel diagonal.
        REQUIRE(eq <= s.feret_max + std::sqrt(2.0));
        double r = s.feret_max / 2 + std::sqrt(2.0) / 2;
        REQUIRE(double(s.area) <= kPi * r * r + kPi * 2 * r);
      }
    }
  }

  TEST_CASE("translation and 90-degree rotation invariance") {
    testutil::Rng rng(13);
    for (int t = 0; t < 40; ++t) {
      Mask m = testutil::blob_mask(rng, rng.uniform_int(4, 40), rng.uniform_int(4, 40));
      auto px = pixels_of(m);
      if (px.empty()) continue;
      double p = traced_perimeter(px);
      auto f = feret_diameters(px);
      std::vector<std::pair<int, int>> moved;
      for (auto [x, y] : px) moved.push_back({x + 17, y - 9});
      REQUIRE(traced_perimeter(moved) == doctest::Approx(p).epsilon(1e-12));
      REQUIRE(feret_diameters(moved).second == doctest::Approx(f.second).epsilon(1e-12));
      Mask r = m;
      for (int k = 0; k < 3; ++k) {
        r = rotate90(r);
        auto rp = pixels_of(r);
        REQUIRE(rp.size() == px.size());
        REQUIRE(traced_perimeter(rp) == doctest::Approx(p).epsilon(1e-12));
        REQUIRE(feret_diameters(rp).first == doctest::Approx(f.first).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("measure_objects: ids, scaling and empty input") {
    CHECK(measure_objects(LabelImage(10, 10), 1.0).empty());
    LabelImage l(30, 10);
    for (int y = 1; y < 5; ++y)
      for (int x = 1; x < 5; ++x) l(x, y) = 4;
    for (int y = 1; y < 8; ++y)
      for (int x = 10; x < 20; ++x) l(x, y) = 2;
    auto a = measure_objects(l, 1.0);
    auto b = measure_objects(l, 2.0);
    REQUIRE(a.size() == 2);
    CHECK(a[0].id == 2);
    CHECK(a[1].id == 4);
    CHECK(b[0].area_um2 == doctest::Approx(4 * a[0].area_um2));
    CHECK(b[0].perimeter_um == doctest::Approx(2 * a[0].perimeter_um));
    CHECK(b[0].circularity == doctest::Approx(a[0].circularity));
    CHECK(a[0].diameter_um() == a[0].feret_min_um);
  }

  TEST_CASE("generator fibers mostly fall in the shape window") {
    synth::SynthConfig cfg;
    cfg.width = 768;
    cfg.height = 768;
    std::size_t total = 0, inside = 0;
    for (int i = 0; i < 2; ++i) {
      auto p = synth::sample_params(cfg, 5, i);
      auto g = synth::render_geometry(p);
      for (auto& r : measure_objects(g.instances, p.um_per_px)) {
        ++total;
        inside += r.circularity > 0.3 && r.circularity <= 1.0;
      }
    }
    REQUIRE(total > 0);
    CHECK(double(inside) >= 0.99 * double(total));
  }

  TEST_CASE("polygon simplicity") {
    CHECK(geom::is_simple({{0, 0}, {4, 0}, {4, 4}, {0, 4}}));
    CHECK_FALSE(geom::is_simple({{0, 0}, {4, 4}, {4, 0}, {0, 4}}));
    CHECK_FALSE(geom::is_simple({{0, 0}, {1, 1}}));
    CHECK_FALSE(geom::is_simple({{0, 0}, {1, 1}, {2, 2}}));
    CHECK(geom::signed_area({{0, 0}, {4, 0}, {4, 4}, {0, 4}}) == doctest::Approx(16.0));
    CHECK_THROWS_AS(geom::require_simple({{0, 0}, {4, 4}, {4, 0}, {0, 4}}, "regions[0]"), ConfigError);
  }

  TEST_CASE("point in polygon: interior, outside, half-open edges") {
    Polygon sq{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(geom::contains(sq, {5, 5}));
    CHECK_FALSE(geom::contains(sq, {15, 5}));
    CHECK(geom::contains(sq, {0, 5}));       // -x edge
    CHECK(geom::contains(sq, {5, 0}));       // -y edge
    CHECK_FALSE(geom::contains(sq, {10, 5}));  // +x edge
    CHECK_FALSE(geom::contains(sq, {5, 10}));  // +y edge
    // Tiles sharing an edge claim each point exactly once.
    Polygon right{{10, 0}, {20, 0}, {20, 10}, {10, 10}};
    testutil::Rng rng(14);
    for (int k = 0; k < 2000; ++k) {
      Point p{double(rng.uniform_int(0, 19)) + (rng.bernoulli(0.5) ? 0.0 : 0.5), double(rng.uniform_int(0, 9))};
      REQUIRE(int(geom::contains(sq, p)) + int(geom::contains(right, p)) == 1);
    }
  }

  TEST_CASE("point in polygon agrees with a raster oracle on random simple polygons") {
    testutil::Rng rng(15);
    for (int t = 0; t < 30; ++t) {
      // Star-shaped polygon around a center: always simple.
      int n = rng.uniform_int(3, 12);
      Polygon poly;
      for (int k = 0; k < n; ++k) {
        double a = 2 * kPi * (k + rng.uniform(0.1, 0.9)) / n;
        double r = rng.uniform(3, 10);
        poly.push_back({10 + r * std::cos(a), 10 + r * std::sin(a)});
      }
      REQUIRE(geom::is_simple(poly));
      for (int q = 0; q < 200; ++q) {
        Point p{rng.uniform(0, 20), rng.uniform(0, 20)};
        // Winding-angle oracle.
        double wind = 0;
        for (int k = 0; k < n; ++k) {
          auto a = poly[k], b = poly[(k + 1) % n];
          wind += std::atan2((a.x - p.x) * (b.y - p.y) - (a.y - p.y) * (b.x - p.x),
                             (a.x - p.x) * (b.x - p.x) + (a.y - p.y) * (b.y - p.y));
        }
        REQUIRE(geom::contains(poly, p) == (std::abs(wind) > kPi));
      }
    }
  }

  TEST_CASE("assign_regions") {
    std::vector<FiberRecord> recs(3);
    recs[0].centroid_x_um = 5;
    recs[0].centroid_y_um = 5;
    recs[1].centroid_x_um = 50;
    recs[1].centroid_y_um = 50;
    recs[2].centroid_x_um = 0;
    recs[2].centroid_y_um = 5;
    auto none = recs;
    assign_regions(none, {});
    for (auto& r : none) CHECK(r.region == Region::whole);
    RegionPolygon sol{Region::soleus, {{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
    assign_regions(recs, {sol});
    CHECK(recs[0].region == Region::soleus);
    CHECK(recs[1].region == Region::gastrocnemius);
    CHECK(recs[2].region == Region::soleus);
    RegionPolygon bad{Region::soleus, {{0, 0}, {4, 4}, {4, 0}, {0, 4}}};
    CHECK_THROWS_AS(assign_regions(recs, {bad}), ConfigError);
    CHECK_THROWS_AS(region_from_string("tibialis"), ConfigError);
  }

  TEST_CASE("fiber CSV round trip") {
    LabelImage l(40, 40);
    for (int y = 2; y < 12; ++y)
      for (int x = 3; x < 15; ++x) l(x, y) = 1;
    for (int y = 20; y < 35; ++y)
      for (int x = 20; x < 30; ++x) l(x, y) = 2;
    auto recs = measure_objects(l, 0.79);
    recs[1].region = Region::soleus;
    recs[1].excluded = true;
    std::string csv = fiber_csv(recs);
    CHECK(csv.rfind("id,area_um2,perimeter_um,circularity,feret_min_um,feret_max_um,equiv_diameter_um,"
                    "centroid_x_um,centroid_y_um,region,excluded\n",
                    0) == 0);
    CHECK(csv.find('\r') == std::string::npos);
    auto back = parse_fiber_csv(csv);
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(back[i].id == recs[i].id);
      CHECK(back[i].area_um2 == recs[i].area_um2);
      CHECK(back[i].perimeter_um == recs[i].perimeter_um);
      CHECK(back[i].feret_min_um == recs[i].feret_min_um);
      CHECK(back[i].centroid_y_um == recs[i].centroid_y_um);
      CHECK(back[i].region == recs[i].region);
      CHECK(back[i].excluded == recs[i].excluded);
    }
    CHECK(fiber_csv(back) == csv);
    CHECK_THROWS(parse_fiber_csv("id,area\n1,2\n"));
  }
}
