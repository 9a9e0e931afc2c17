#include <doctest.h>

#include <sstream>

#include "myosynth/cli.hpp"
#include "myosynth/dataset.hpp"
#include "myosynth/features.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/io.hpp"
#include "support.hpp"

using namespace myosynth;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string s(const fs::path& p) { return p.string(); }

/// Small dataset config so the CLI tests stay fast.
fs::path small_config(const fs::path& dir, int size = 192) {
  json j = synth::to_json(synth::SynthConfig{});
  j["width"] = size;
  j["height"] = size;
  j["tissue_coverage"] = json::array({1.0, 1.0});
  auto p = dir / "config.json";
  io::write_text(p, j.dump(2));
  return p;
}

json read_json(const fs::path& p) { return json::parse(io::read_text(p)); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors, help and version") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"generate"}).code == 2);  // --out is required
    CHECK(run({"generate", "--out", "x", "--count", "many"}).code == 2);
    auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(dataset::version_string()) != std::string::npos);
    auto h = run({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("postprocess") != std::string::npos);
    CHECK(run({"validate"}).code == 2);
  }

  TEST_CASE("generate: invalid config names the field and writes nothing") {
    auto dir = testutil::temp_dir("cli_badcfg");
    json j = synth::to_json(synth::SynthConfig{});
    j["fiber_density"] = json::array({500, 100});
    io::write_text(dir / "bad.json", j.dump());
    auto r = run({"generate", "--config", s(dir / "bad.json"), "--out", s(dir / "out"), "--count", "2"});
    CHECK(r.code == 2);
    CHECK(r.err.find("fiber_density") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out"));
    io::write_text(dir / "broken.json", "{ not json");
    CHECK(run({"generate", "--config", s(dir / "broken.json"), "--out", s(dir / "out")}).code == 2);
    CHECK(run({"generate", "--config", s(dir / "missing.json"), "--out", s(dir / "out")}).code == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("generate: byte-identical across runs and job counts") {
    auto dir = testutil::temp_dir("cli_gen");
    auto cfg = small_config(dir, 160);
    REQUIRE(run({"generate", "--config", s(cfg), "--count", "2", "--seed", "7", "--out", s(dir / "a")}).code == 0);
    REQUIRE(run({"generate", "--config", s(cfg), "--count", "2", "--seed", "7", "--out", s(dir / "b"), "--jobs", "2"})
                .code == 0);
    for (auto& e : fs::directory_iterator(dir / "a"))
      CHECK(io::read_text(e.path()) == io::read_text(dir / "b" / e.path().filename()));
    CHECK(run({"validate", "--dataset", s(dir / "a")}).code == 0);
    auto m = read_json(dir / "a" / "manifest.json");
    CHECK(m["samples"].size() == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("full chain with filters disabled reproduces the fiber cores") {
    auto dir = testutil::temp_dir("cli_chain");
    auto cfg = small_config(dir, 256);
    REQUIRE(run({"generate", "--config", s(cfg), "--count", "1", "--seed", "3", "--out", s(dir / "ds")}).code == 0);
    auto files = dataset::sample_files(0);
    auto inst = dir / "ds" / files.inst;
    auto cls = dir / "ds" / files.classes;
    auto inst_bytes = io::read_text(inst);

    REQUIRE(run({"degrade", "--inst", s(inst), "--class", s(cls), "--out", s(dir / "p_prob.png")}).code == 0);
    CHECK(run({"validate", "--prob", s(dir / "p_prob.png")}).code == 0);
    CHECK(io::read_text(inst) == inst_bytes);

    json params = {{"min_area_um2", 0.0},       {"min_circularity_pre", 0.0}, {"mask_min_area_um2", 0.0},
                   {"shape_circ_min", 0.0},     {"shape_circ_max", 1.0}};
    io::write_text(dir / "params.json", params.dump());
    auto um = read_json(dir / "ds" / "manifest.json")["samples"][0]["um_per_px"].get<double>();
    std::ostringstream ums;
    ums.precision(17);
    ums << um;
    REQUIRE(run({"postprocess", "--prob", s(dir / "p_prob.png"), "--um-per-px", ums.str(), "--params",
                 s(dir / "params.json"), "--out", s(dir / "post")})
                .code == 0);
    for (const char* f : {"postprocessed.png", "shape_filtered.png", "muscle_mask.png", "connective_tissue.png",
                          "fiber_labels.png", "fibers.csv", "summary.json"})
      CHECK(fs::exists(dir / "post" / f));

    // Ground truth: the fiber-class cores as an 8-bit mask.
    auto classes = io::read_png_gray8(cls);
    Mask core(classes.width(), classes.height());
    for (std::size_t i = 0; i < core.size(); ++i) core[i] = classes[i] == 1;
    io::write_mask_png(dir / "core.png", core);
    auto e = run({"evaluate", "--gt", s(dir / "core.png"), "--pred", s(dir / "post" / "fiber_labels.png"), "--out",
                  s(dir / "metrics.json")});
    REQUIRE(e.code == 0);
    auto m = read_json(dir / "metrics.json");
    REQUIRE(m["instance"]["per_threshold"].size() == 11);
    for (auto& t : m["instance"]["per_threshold"]) CHECK(t["ap"] == 1.0);
    CHECK(m["instance"]["mean_ap"] == 1.0);
    CHECK(m["pixel"]["f1"] == 1.0);

    // Rerun is byte-identical.
    REQUIRE(run({"postprocess", "--prob", s(dir / "p_prob.png"), "--um-per-px", ums.str(), "--params",
                 s(dir / "params.json"), "--out", s(dir / "post2")})
                .code == 0);
    for (auto& f : fs::directory_iterator(dir / "post"))
      CHECK(io::read_text(f.path()) == io::read_text(dir / "post2" / f.path().filename()));

    // measure on the label image agrees with the pipeline's own records.
    REQUIRE(run({"measure", "--labels", s(dir / "post" / "fiber_labels.png"), "--um-per-px", ums.str(), "--out",
                 s(dir / "measured.csv")})
                .code == 0);
    auto a = features::parse_fiber_csv(io::read_text(dir / "measured.csv"));
    auto b = features::parse_fiber_csv(io::read_text(dir / "post" / "fibers.csv"));
    CHECK(a.size() == b.size());
    fs::remove_all(dir);
  }

  TEST_CASE("degrade writes float TIFF and rejects other extensions") {
    auto dir = testutil::temp_dir("cli_degrade");
    LabelImage inst(64, 64);
    for (int y = 10; y < 40; ++y)
      for (int x = 10; x < 40; ++x) inst(x, y) = 1;
    Image<std::uint8_t> cls(64, 64);
    for (int y = 12; y < 38; ++y)
      for (int x = 12; x < 38; ++x) cls(x, y) = 1;
    io::write_labels_png(dir / "i.png", inst);
    io::write_png_gray8(dir / "c.png", cls);
    REQUIRE(run({"degrade", "--inst", s(dir / "i.png"), "--class", s(dir / "c.png"), "--out", s(dir / "p.tif"),
                 "--blur", "0.5", "--noise", "0.05", "--seed", "3"})
                .code == 0);
    auto p = io::read_probability(dir / "p.tif");
    CHECK(p(20, 20) > 0.8f);
    CHECK(run({"degrade", "--inst", s(dir / "i.png"), "--class", s(dir / "c.png"), "--out", s(dir / "p.bmp")}).code ==
          2);
    CHECK(run({"degrade", "--inst", s(dir / "i.png"), "--class", s(dir / "c.png"), "--out", s(dir / "p.tif"),
               "--drop", "3"})
              .code == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("postprocess: regions, exclusions and per-region CT summary") {
    auto dir = testutil::temp_dir("cli_regions");
    auto cfg = small_config(dir, 256);
    REQUIRE(run({"generate", "--config", s(cfg), "--count", "1", "--seed", "9", "--out", s(dir / "ds")}).code == 0);
    auto f = dataset::sample_files(0);
    REQUIRE(run({"degrade", "--inst", s(dir / "ds" / f.inst), "--class", s(dir / "ds" / f.classes), "--out",
                 s(dir / "p.tif")})
                .code == 0);
    json regions = json::array({{{"kind", "soleus"}, {"polygon", {{0, 0}, {100, 0}, {100, 300}, {0, 300}}}},
                                {{"kind", "type1_freezing"}, {"polygon", {{150, 0}, {200, 0}, {200, 50}, {150, 50}}}}});
    io::write_text(dir / "regions.json", regions.dump());
    REQUIRE(run({"postprocess", "--prob", s(dir / "p.tif"), "--um-per-px", "0.8", "--regions", s(dir / "regions.json"),
                 "--out", s(dir / "post")})
                .code == 0);
    auto summary = read_json(dir / "post" / "summary.json");
    for (const char* k : {"whole", "soleus", "gastrocnemius"})
      CHECK(summary["ct_mean_thickness_um_by_region"].contains(k));
    auto recs = features::parse_fiber_csv(io::read_text(dir / "post" / "fibers.csv"));
    bool any_excluded = false, any_soleus = false;
    for (auto& r : recs) {
      any_excluded |= r.excluded;
      any_soleus |= r.region == features::Region::soleus;
    }
    CHECK(any_excluded);
    CHECK(any_soleus);

    io::write_text(dir / "badregions.json", R"([{"kind":"soleus","polygon":[[0,0],[4,4],[4,0],[0,4]]}])");
    CHECK(run({"postprocess", "--prob", s(dir / "p.tif"), "--um-per-px", "0.8", "--regions",
               s(dir / "badregions.json"), "--out", s(dir / "post3")})
              .code == 2);
    CHECK(run({"postprocess", "--prob", s(dir / "p.tif"), "--um-per-px", "-1", "--out", s(dir / "post4")}).code == 2);
    CHECK(run({"postprocess", "--prob", s(dir / "none.tif"), "--um-per-px", "1", "--out", s(dir / "post5")}).code == 1);

    // Analyze two sections built from this output.
    json sections = json::array({{{"id", "S2"}, {"fibers", "post/fibers.csv"}, {"summary", "post/summary.json"}},
                                 {{"id", "S1"}, {"fibers", "post/fibers.csv"}, {"summary", "post/summary.json"}}});
    io::write_text(dir / "sections.json", sections.dump());
    json refs = json::array({{{"region", "whole"}, {"mu_um", 36.6}, {"sigma_um", 11.0}},
                             {{"region", "soleus"}, {"mu_um", 33.0}, {"sigma_um", 9.0}},
                             {{"region", "gastrocnemius"}, {"mu_um", 38.0}, {"sigma_um", 10.0}}});
    io::write_text(dir / "refs.json", refs.dump());
    REQUIRE(run({"analyze", "--sections", s(dir / "sections.json"), "--refs", s(dir / "refs.json"), "--out",
                 s(dir / "an")})
                .code == 0);
    auto scatter = io::read_text(dir / "an" / "scatter.csv");
    CHECK(std::count(scatter.begin(), scatter.end(), '\n') == 1 + 6);
    CHECK(scatter.find("\nS1,gastrocnemius") != std::string::npos);
    auto report = read_json(dir / "an" / "report.json");
    CHECK(report["sections"].size() == 6);
    CHECK(fs::exists(dir / "an" / "kde.csv"));
    fs::remove_all(dir);
  }

  TEST_CASE("evaluate: 16-bit labels and 8-bit masks") {
    auto dir = testutil::temp_dir("cli_eval");
    LabelImage a(20, 20);
    for (int y = 2; y < 8; ++y)
      for (int x = 2; x < 8; ++x) a(x, y) = 5;
    for (int y = 10; y < 18; ++y)
      for (int x = 10; x < 18; ++x) a(x, y) = 9;
    io::write_labels_png(dir / "a.png", a);
    io::write_mask_png(dir / "m.png", imgproc::foreground(a));
    auto r = run({"evaluate", "--gt", s(dir / "a.png"), "--pred", s(dir / "m.png")});
    CHECK(r.code == 0);
    CHECK(r.out.find("mean AP 1") != std::string::npos);
    io::write_mask_png(dir / "small.png", Mask(10, 10));
    CHECK(run({"evaluate", "--gt", s(dir / "a.png"), "--pred", s(dir / "small.png")}).code == 1);
    fs::remove_all(dir);
  }

  TEST_CASE("preview writes a grid and its summary") {
    auto dir = testutil::temp_dir("cli_preview");
    REQUIRE(run({"preview", "--sweep", "fiber_density=200,800", "--sweep2", "warp.amplitude=0,12", "--tile", "96",
                 "--out", s(dir / "pv")})
                .code == 0);
    auto png = io::read_png_rgb(dir / "pv" / "preview.png");
    CHECK(png.width() == 2 * 96 + 3 * 4);
    CHECK(png.height() == 2 * 96 + 3 * 4);
    auto j = read_json(dir / "pv" / "preview.json");
    CHECK(j["tiles"].size() == 4);
    CHECK(run({"preview", "--sweep", "fiber_density", "--out", s(dir / "x")}).code == 2);
    CHECK(run({"preview", "--sweep", "fiber_density=a,b", "--out", s(dir / "x")}).code == 2);
    CHECK(run({"preview", "--sweep", "bogus=1", "--out", s(dir / "x")}).code == 2);
    fs::remove_all(dir);
  }

  TEST_CASE("validate reports bad probability files") {
    auto dir = testutil::temp_dir("cli_validate");
    io::write_tiff_float(dir / "bad.tif", FloatImage(4, 4, -0.5f));
    auto r = run({"validate", "--prob", s(dir / "bad.tif")});
    CHECK(r.code == 1);
    CHECK(r.err.find("bad.tif") != std::string::npos);
    fs::remove_all(dir);
  }
}
