#include "myosynth/dataset.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "myosynth/errors.hpp"
#include "myosynth/io.hpp"
#include "myosynth/labels.hpp"

#ifndef MYOSYNTH_VERSION
#define MYOSYNTH_VERSION "0.0.0"
#endif

namespace myosynth::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return std::string("myosynth ") + MYOSYNTH_VERSION; }

SampleFiles sample_files(std::size_t index) {
  char stem[32];
  std::snprintf(stem, sizeof stem, "%05zu", index);
  std::string s(stem);
  return {s + "_rgb.png", s + "_inst.png", s + "_class.png", s + "_weights.tif"};
}

void write_sample(const fs::path& out, std::size_t index, const synth::RenderedSample& s) {
  SampleFiles f = sample_files(index);
  io::write_png_rgb(out / f.rgb, s.rgb);
  io::write_labels_png(out / f.inst, s.instances);
  io::write_png_gray8(out / f.classes, s.classes);
  FloatImage weights = s.weights;
  if (weights.empty()) weights = synth::compute_weight_map(s.instances, {});
  io::write_tiff_float(out / f.weights, weights);
}

GenerateResult generate_dataset(const synth::SynthConfig& cfg, const GenerateOptions& options, const fs::path& out) {
  synth::validate(cfg);
  if (options.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  // Resolve every sample first so configuration errors surface before any I/O.
  std::vector<SampleRecord> records(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    records[i].index = i;
    records[i].params = synth::sample_params(cfg, options.seed, i);
  }

  const bool created = !fs::exists(out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw IoError("cannot create output directory: " + out.string());

  std::vector<fs::path> written;
  std::mutex written_mutex;
  auto cleanup = [&] {
    std::error_code ignore;
    for (const auto& p : written) fs::remove(p, ignore);
    fs::remove(out / "manifest.json", ignore);
    if (created) fs::remove(out, ignore);
  };

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= options.count || failed) return;
      try {
        synth::RenderOptions ro = options.render;
        ro.weights = true;
        synth::RenderedSample s = synth::render_sample(records[i].params, ro);
        records[i].meta = s.meta;
        SampleFiles f = sample_files(i);
        {
          std::lock_guard<std::mutex> lock(written_mutex);
          for (const auto& name : {f.rgb, f.inst, f.classes, f.weights}) written.push_back(out / name);
        }
        write_sample(out, i, s);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  const int jobs = static_cast<int>(std::min<std::size_t>(std::size_t(options.jobs), std::max<std::size_t>(1, options.count)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) {
    cleanup();
    std::rethrow_exception(error);
  }

  GenerateResult result;
  json samples = json::array();
  for (const auto& r : records) {
    SampleFiles f = sample_files(r.index);
    result.total_fibers += r.meta.fiber_count;
    samples.push_back({{"index", r.index},
                       {"seed", r.meta.seed},
                       {"um_per_px", r.meta.um_per_px},
                       {"fiber_count", r.meta.fiber_count},
                       {"params_digest", r.meta.params_digest},
                       {"files", {{"rgb", f.rgb}, {"inst", f.inst}, {"class", f.classes}, {"weights", f.weights}}},
                       {"params", synth::to_json(r.params)}});
  }
  result.manifest = {{"version", version_string()},
                     {"master_seed", options.seed},
                     {"count", options.count},
                     {"total_fibers", result.total_fibers},
                     {"config", synth::to_json(cfg)},
                     {"samples", samples}};
  try {
    io::write_text(out / "manifest.json", result.manifest.dump(2) + "\n");
  } catch (...) {
    cleanup();
    throw;
  }
  result.samples = std::move(records);
  return result;
}

std::vector<std::string> check_dataset(const fs::path& dir) {
  std::vector<std::string> problems;
  json manifest;
  try {
    manifest = json::parse(io::read_text(dir / "manifest.json"));
  } catch (const std::exception& e) {
    problems.push_back(std::string("manifest.json: ") + e.what());
    return problems;
  }
  if (!manifest.contains("samples") || !manifest["samples"].is_array()) {
    problems.push_back("manifest.json: missing samples list");
    return problems;
  }
  for (const auto& s : manifest["samples"]) {
    try {
      std::size_t index = s.at("index").get<std::size_t>();
      SampleFiles f = sample_files(index);
      auto params = synth::params_from_json(s.at("params"));
      const int w = params.width, h = params.height;
      auto size_ok = [&](int iw, int ih, const std::string& name) {
        if (iw != w || ih != h) problems.push_back(name + ": size differs from manifest");
      };
      auto rgb = io::read_png_rgb(dir / f.rgb);
      size_ok(rgb.width(), rgb.height(), f.rgb);
      auto inst = io::read_png_gray16(dir / f.inst);
      size_ok(inst.width(), inst.height(), f.inst);
      auto cls = io::read_png_gray8(dir / f.classes);
      size_ok(cls.width(), cls.height(), f.classes);
      for (auto v : cls.pixels())
        if (v > 2) {
          problems.push_back(f.classes + ": class value outside 0..2");
          break;
        }
      std::uint32_t max_id = 0;
      for (auto v : inst.pixels()) max_id = std::max<std::uint32_t>(max_id, v);
      if (max_id != s.at("fiber_count").get<std::uint32_t>())
        problems.push_back(f.inst + ": max id differs from manifest fiber_count");
      auto weights = io::read_tiff_float(dir / f.weights);
      size_ok(weights.width(), weights.height(), f.weights);
      for (float v : weights.pixels())
        if (!(v > 0.0f) || !std::isfinite(v)) {
          problems.push_back(f.weights + ": non-positive weight");
          break;
        }
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }
  return problems;
}

synth::SceneParams with_param(const synth::SceneParams& base, const std::string& path, double value) {
  json j = synth::to_json(base);
  json* node = &j;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) throw ConfigError(path, "unknown scene parameter");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!node->is_number()) throw ConfigError(path, "not a numeric scene parameter");
  if (node->is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError(path, "expects an integer value");
    *node = static_cast<long long>(value);
  } else {
    *node = value;
  }
  return synth::params_from_json(j);
}

PreviewResult preview(const synth::SynthConfig& cfg, std::uint64_t seed, int tile, const PreviewAxis& cols,
                      const PreviewAxis* rows) {
  if (tile < 64) throw ConfigError("tile", "must be >= 64");
  if (cols.values.empty()) throw ConfigError("sweep", "needs at least one value");
  if (rows && rows->values.empty()) throw ConfigError("sweep2", "needs at least one value");
  synth::SynthConfig c = cfg;
  c.width = tile;
  c.height = tile;
  synth::SceneParams base = synth::sample_params(c, seed, 0);
  const int gutter = 4;
  const int ncols = static_cast<int>(cols.values.size());
  const int nrows = rows ? static_cast<int>(rows->values.size()) : 1;
  PreviewResult r;
  r.grid = RgbImage(ncols * tile + (ncols + 1) * gutter, nrows * tile + (nrows + 1) * gutter, Rgb8{255, 255, 255});
  json tiles = json::array();
  for (int ry = 0; ry < nrows; ++ry)
    for (int cx = 0; cx < ncols; ++cx) {
      synth::SceneParams p = with_param(base, cols.param, cols.values[cx]);
      if (rows) p = with_param(p, rows->param, rows->values[ry]);
      synth::RenderOptions ro;
      ro.weights = false;
      synth::RenderedSample s = synth::render_sample(p, ro);
      const int ox = gutter + cx * (tile + gutter), oy = gutter + ry * (tile + gutter);
      for (int y = 0; y < tile; ++y)
        for (int x = 0; x < tile; ++x) r.grid(ox + x, oy + y) = s.rgb(x, y);
      json t = {{"row", ry}, {"col", cx}, {cols.param, cols.values[cx]}, {"fiber_count", s.meta.fiber_count}};
      if (rows) t[rows->param] = rows->values[ry];
      tiles.push_back(t);
    }
  r.summary = {{"seed", seed}, {"tile", tile}, {"cols", cols.param}, {"tiles", tiles}};
  if (rows) r.summary["rows"] = rows->param;
  return r;
}

}  // namespace myosynth::dataset
