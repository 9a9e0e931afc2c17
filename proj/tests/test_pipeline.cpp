#include <doctest.h>

#include <cmath>

#include "myosynth/degrade.hpp"
#include "myosynth/errors.hpp"
#include "myosynth/features.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/pipeline.hpp"
#include "myosynth/render.hpp"
#include "myosynth/scene.hpp"
#include "support.hpp"

using namespace myosynth;
using namespace myosynth::pipeline;

namespace {

ProbabilityMap to_prob(const Mask& m) {
  ProbabilityMap p(m.width(), m.height());
  for (std::size_t i = 0; i < m.size(); ++i) p[i] = m[i] ? 1.0f : 0.0f;
  return p;
}

Mask fiber_indicator(const synth::ClassImage& c) {
  Mask m(c.width(), c.height());
  for (std::size_t i = 0; i < c.size(); ++i) m[i] = c[i] == 1;
  return m;
}

synth::RenderedSample scene(std::uint64_t index, int size) {
  synth::SynthConfig cfg;
  cfg.width = size;
  cfg.height = size;
  synth::RenderOptions ro;
  ro.weights = false;
  return synth::render_sample(synth::sample_params(cfg, 99, index), ro);
}

/// Grid of square fibers separated by `gap` pixels.
Mask fiber_field(int w, int h, int side, int gap, int margin) {
  Mask m(w, h);
  for (int y = margin; y + side <= h - margin; y += side + gap)
    for (int x = margin; x + side <= w - margin; x += side + gap) testutil::paint_rect(m, x, y, side, side);
  return m;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("params: defaults, validation, strict JSON") {
    PipelineParams p;
    CHECK(p.threshold == 210);
    CHECK(p.min_area_um2 == 150.0);
    CHECK(p.min_circularity_pre == 0.1);
    CHECK(p.dilate_erode_iters == 10);
    CHECK(p.hole_max_px2 == 3500);
    CHECK(p.mask_min_area_um2 == 1.5e6);
    CHECK(p.shape_circ_min == 0.35);
    CHECK(p.shape_circ_max == 0.95);
    CHECK_FALSE(p.use_watershed);
    CHECK(to_json(params_from_json(to_json(p))) == to_json(p));
    auto j = to_json(p);
    j["max_feret_um"] = 45.0;
    CHECK(*params_from_json(j).max_feret_um == 45.0);
    j["treshold"] = 3;
    CHECK_THROWS_AS(params_from_json(j), ConfigError);
    PipelineParams bad;
    bad.shape_circ_min = 0.9;
    bad.shape_circ_max = 0.5;
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = {};
    bad.threshold = 300;
    CHECK_THROWS_AS(validate(bad), ConfigError);
  }

  TEST_CASE("postprocess: ideal GT reproduces the filtered fiber indicator") {
    auto s = scene(0, 384);
    Mask ind = fiber_indicator(s.classes);
    const double um = s.meta.um_per_px;
    auto got = postprocess(to_prob(ind), PipelineParams{}, um);
    auto cc = imgproc::connected_components(ind);
    auto shapes = features::measure_shapes(cc.labels);
    std::vector<bool> keep(cc.count + 1, false);
    for (std::uint32_t k = 1; k <= cc.count; ++k)
      keep[k] = shapes[k].area * um * um >= 150.0 && shapes[k].circularity >= 0.1;
    CHECK(got == imgproc::select_labels(cc.labels, keep));
  }

  TEST_CASE("postprocess: small blob and thin line are removed") {
    const double um = 1.0;
    Mask m(500, 60);
    testutil::paint_rect(m, 10, 10, 10, 10);   // 100 um^2
    testutil::paint_rect(m, 50, 10, 13, 13);   // 169 um^2
    testutil::paint_rect(m, 80, 40, 400, 1);   // line, circularity ~0.02
    auto out = postprocess(to_prob(m), PipelineParams{}, um);
    CHECK(out(15, 15) == 0);
    CHECK(out(55, 15) == 1);
    CHECK(out(200, 40) == 0);
  }

  TEST_CASE("postprocess: raising the threshold never adds pixels") {
    testutil::Rng rng(3);
    auto s = scene(1, 256);
    synth::DegradeParams d;
    d.blur_sigma = 1.5;
    d.noise_amplitude = 0.2;
    auto prob = synth::degrade_to_probability(s, d);
    std::int64_t last = std::numeric_limits<std::int64_t>::max();
    PipelineParams p;
    p.min_area_um2 = 0.0;
    p.min_circularity_pre = 0.0;
    for (int t = 0; t <= 255; t += 15) {
      p.threshold = t;
      auto n = imgproc::count(postprocess(prob, p, 1.0));
      CHECK(n <= last);
      last = n;
    }
  }

  TEST_CASE("postprocess: watershed splits touching discs") {
    Mask m(80, 50);
    testutil::paint_disc(m, 25, 25, 14);
    testutil::paint_disc(m, 48, 25, 14);
    PipelineParams p;
    p.min_area_um2 = 10;
    auto plain = postprocess(to_prob(m), p, 1.0);
    CHECK(imgproc::connected_components(plain).count == 1);
    p.use_watershed = true;
    auto split = postprocess(to_prob(m), p, 1.0);
    CHECK(imgproc::connected_components(split).count == 2);
    CHECK(imgproc::is_subset(split, plain));
  }

  TEST_CASE("muscle mask: gap closing, hole filling, size filter, empty input") {
    // 1 um/px, 1400 x 1400 px: the area filter is the full 1.5e6 um^2.
    PipelineParams p;
    Mask tissue = fiber_field(1400, 1400, 40, 8, 20);
    auto mm = build_muscle_mask(tissue, p, 1.0);
    auto cc = imgproc::connected_components(mm, imgproc::Connectivity::four);
    CHECK(cc.count == 1);
    // Every gap pixel between fibers is covered.
    CHECK(imgproc::is_subset(tissue, mm));
    CHECK(mm(20 + 40 + 3, 100) == 1);

    // A 4e6 um^2 field keeps the full filter; the block is ~0.38e6 um^2.
    Mask small = fiber_field(700, 700, 40, 8, 0);
    Mask both(2000, 2000);
    for (int y = 0; y < 700; ++y)
      for (int x = 0; x < 700; ++x) both(x, y) = small(x, y);
    CHECK(imgproc::count(build_muscle_mask(both, p, 1.0)) == 0);

    CHECK(imgproc::count(build_muscle_mask(Mask(300, 300), p, 1.0)) == 0);
  }

  TEST_CASE("muscle mask: detached fragment removed, main section kept") {
    // 2 um/px; main block 2.4e6 um^2, fragment 0.5e6 um^2.
    const double um = 2.0;
    Mask m(1300, 1300);
    testutil::paint_rect(m, 50, 50, 775, 775);
    testutil::paint_rect(m, 900, 900, 354, 354);
    auto mm = build_muscle_mask(m, PipelineParams{}, um);
    CHECK(mm(400, 400) == 1);
    CHECK(mm(1000, 1000) == 0);
  }

  TEST_CASE("shape filter: disc and elongated object removed, fiber kept") {
    Mask m(300, 120);
    testutil::paint_disc(m, 50, 50, 30);        // circularity >= 0.96
    testutil::paint_rect(m, 120, 20, 160, 8);   // circularity ~0.2
    // Warped polygon: a pentagon.
    for (int y = 0; y < 120; ++y)
      for (int x = 0; x < 300; ++x) {
        double dx = x - 200.0, dy = y - 80.0;
        if (std::abs(dx) + std::abs(dy) * 1.3 < 28 && dy > -18) m(x, y) = 1;
      }
    auto cc = imgproc::connected_components(m);
    auto shapes = features::measure_shapes(cc.labels);
    REQUIRE(shapes[cc.labels(50, 50)].circularity >= 0.96);
    auto f = shape_filter(m, PipelineParams{}, 1.0);
    CHECK(f(50, 50) == 0);
    CHECK(f(200, 24) == 0);
    CHECK(f(200, 80) == 1);
    PipelineParams p;
    p.max_feret_um = 10.0;
    CHECK(f(200, 80) == 1);
    CHECK(shape_filter(m, p, 1.0)(200, 80) == 0);
  }

  TEST_CASE("connective tissue: empty when masks coincide; band construction") {
    Mask a(50, 50);
    testutil::paint_rect(a, 5, 5, 30, 30);
    auto ct0 = connective_tissue(a, a, 1.0);
    CHECK(imgproc::count(ct0.mask) == 0);
    CHECK(ct0.fraction == 0.0);
    CHECK(connective_tissue(Mask(20, 20), Mask(20, 20), 1.0).fraction == 0.0);

    for (double um : {0.5, 0.79, 1.3}) {
      Mask muscle(100, 100, 1);
      Mask fibers = muscle;
      testutil::paint_rect(fibers, 45, 0, 10, 100, 0);
      auto ct = connective_tissue(muscle, fibers, um);
      CHECK(std::abs(ct.fraction - 0.10) <= 0.005);
      CHECK(ct.area_um2 == doctest::Approx(1000 * um * um));
      CHECK(std::abs(ct.mean_thickness_um - 10 * um) <= 1.0 * um);
    }
  }

  TEST_CASE("exclusion regions: identity, full cover, centroid rule") {
    // Two fibers in a solid muscle mask.
    Mask fibers(100, 60);
    testutil::paint_rect(fibers, 10, 10, 20, 20);
    testutil::paint_rect(fibers, 50, 10, 20, 20);
    SegmentationOutputs out;
    out.postprocessed = fibers;
    out.shape_filtered = fibers;
    out.muscle_mask = Mask(100, 60, 1);
    auto ct = connective_tissue(out.muscle_mask, fibers, 1.0);
    out.connective_tissue = ct.mask;
    out.ct_thickness_um = ct.thickness_um;
    out.ct_fraction = ct.fraction;
    out.ct_area_um2 = ct.area_um2;
    out.ct_mean_thickness_um = ct.mean_thickness_um;
    auto labels = imgproc::connected_components(fibers).labels;
    auto records = features::measure_objects(labels, 1.0);

    auto o1 = out;
    auto r1 = records;
    apply_exclusion_regions(o1, r1, labels, {}, 1.0);
    CHECK(o1.shape_filtered == out.shape_filtered);
    CHECK(o1.connective_tissue == out.connective_tissue);
    CHECK(o1.ct_fraction == out.ct_fraction);
    for (auto& r : r1) CHECK_FALSE(r.excluded);

    auto o2 = out;
    auto r2 = records;
    ExclusionRegion all{{{-1, -1}, {200, -1}, {200, 200}, {-1, 200}}, ExclusionKind::type2_loosening};
    apply_exclusion_regions(o2, r2, labels, {all}, 1.0);
    CHECK(imgproc::count(o2.shape_filtered) == 0);
    CHECK(imgproc::count(o2.connective_tissue) == 0);
    CHECK(o2.muscle_mask == out.muscle_mask);
    for (auto& r : r2) CHECK(r.excluded);

    // Covers the left fiber's centroid (20, 20) and only its left half.
    auto o3 = out;
    auto r3 = records;
    ExclusionRegion half{{{0, 0}, {20.5, 0}, {20.5, 60}, {0, 60}}, ExclusionKind::type1_freezing};
    apply_exclusion_regions(o3, r3, labels, {half}, 1.0);
    CHECK(r3[0].excluded);
    CHECK_FALSE(r3[1].excluded);
    CHECK(o3.shape_filtered(25, 20) == 0);
    CHECK(o3.shape_filtered(60, 20) == 1);
    CHECK(o3.connective_tissue(5, 40) == 0);
    CHECK(o3.connective_tissue(40, 40) == 1);
    CHECK(o3.ct_fraction < out.ct_fraction);

    ExclusionRegion bad{{{0, 0}, {4, 4}, {4, 0}, {0, 4}}, ExclusionKind::type1_freezing};
    CHECK_THROWS_AS(apply_exclusion_regions(o3, r3, labels, {bad}, 1.0), ConfigError);
  }

  TEST_CASE("run_full: all-zero map gives empty outputs") {
    auto r = run_full(ProbabilityMap(200, 200), PipelineParams{}, 0.8);
    CHECK(imgproc::count(r.outputs.postprocessed) == 0);
    CHECK(imgproc::count(r.outputs.muscle_mask) == 0);
    CHECK(imgproc::count(r.outputs.connective_tissue) == 0);
    CHECK(r.records.empty());
    CHECK(r.outputs.ct_fraction == 0.0);
  }

  TEST_CASE("run_full: invariants and determinism over random degradations") {
    testutil::Rng rng(17);
    for (int t = 0; t < 6; ++t) {
      auto s = scene(t, 320);
      synth::DegradeParams d;
      d.blur_sigma = rng.uniform(0.0, 2.0);
      d.noise_amplitude = rng.uniform(0.0, 0.3);
      d.drop_prob = rng.uniform(0.0, 0.3);
      d.seed = rng.next();
      auto prob = synth::degrade_to_probability(s, d);
      PipelineParams p;
      p.use_watershed = rng.bernoulli(0.5);
      p.ct_from_shape_filtered = rng.bernoulli(0.5);
      auto a = run_full(prob, p, s.meta.um_per_px);
      const auto& o = a.outputs;
      REQUIRE(imgproc::is_subset(o.shape_filtered, o.postprocessed));
      REQUIRE(imgproc::is_subset(o.postprocessed, o.muscle_mask));
      REQUIRE(imgproc::is_subset(o.connective_tissue, o.muscle_mask));
      const Mask& fibers = p.ct_from_shape_filtered ? o.shape_filtered : o.postprocessed;
      REQUIRE(imgproc::count(imgproc::mask_and(o.connective_tissue, fibers)) == 0);
      auto m = imgproc::count(o.muscle_mask);
      if (m > 0) REQUIRE(o.ct_fraction == doctest::Approx(double(imgproc::count(o.connective_tissue)) / double(m)));
      REQUIRE(a.records.size() == imgproc::connected_components(o.shape_filtered).count);
      auto b = run_full(prob, p, s.meta.um_per_px);
      REQUIRE(b.outputs.shape_filtered == o.shape_filtered);
      REQUIRE(b.outputs.connective_tissue == o.connective_tissue);
      REQUIRE(b.fiber_labels == a.fiber_labels);
    }
  }

  TEST_CASE("run_full: region tags and per-region CT thickness") {
    auto s = scene(2, 384);
    const double um = s.meta.um_per_px;
    const double mid = 192 * um;
    std::vector<features::RegionPolygon> regions{
        {features::Region::soleus, {{0, 0}, {mid, 0}, {mid, 384 * um}, {0, 384 * um}}}};
    auto r = run_full(synth::degrade_to_probability(s, {}), PipelineParams{}, um, {}, regions);
    std::size_t sol = 0, gas = 0;
    for (auto& f : r.records) {
      if (f.region == features::Region::soleus) {
        ++sol;
        CHECK(f.centroid_x_um < mid);
      } else {
        ++gas;
        CHECK(f.region == features::Region::gastrocnemius);
      }
    }
    CHECK(sol + gas == r.records.size());
    auto ts = ct_region_thickness(r.outputs, regions, features::Region::soleus, um);
    auto tg = ct_region_thickness(r.outputs, regions, features::Region::gastrocnemius, um);
    auto tw = ct_region_thickness(r.outputs, {}, features::Region::whole, um);
    REQUIRE(tw.has_value());
    CHECK(*tw == doctest::Approx(r.outputs.ct_mean_thickness_um));
    if (ts && tg) CHECK(std::min(*ts, *tg) <= *tw + 1e-9);
    auto j = summary_json(r, PipelineParams{}, um);
    CHECK(j["fiber_count"] == r.records.size());
    CHECK(j.contains("ct_fraction"));
    CHECK(j.contains("params"));
  }

  TEST_CASE("regions file parsing") {
    auto j = nlohmann::json::parse(R"([
      {"kind": "type1_freezing", "polygon": [[0,0],[10,0],[10,10]]},
      {"kind": "soleus", "polygon": [[0,0],[50,0],[50,50],[0,50]]},
      {"kind": "type2_loosening", "polygon": [[20,20],[30,20],[30,30]]}
    ])");
    auto f = regions_from_json(j);
    CHECK(f.exclusions.size() == 2);
    CHECK(f.exclusions[1].kind == ExclusionKind::type2_loosening);
    REQUIRE(f.regions.size() == 1);
    CHECK(f.regions[0].region == features::Region::soleus);
    CHECK_THROWS_AS(regions_from_json(nlohmann::json::parse(R"([{"kind":"bogus","polygon":[[0,0],[1,0],[1,1]]}])")),
                    ConfigError);
    CHECK_THROWS_AS(regions_from_json(nlohmann::json::parse(R"([{"kind":"soleus","polygon":[[0,0],[1,0]]}])")),
                    ConfigError);
    CHECK_THROWS_AS(regions_from_json(nlohmann::json::parse(R"([{"kind":"soleus","polygon":[[0,0],[4,4],[4,0],[0,4]]}])")),
                    ConfigError);
  }
}
