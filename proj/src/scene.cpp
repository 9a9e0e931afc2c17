#include "myosynth/scene.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "myosynth/errors.hpp"
#include "myosynth/json_util.hpp"
#include "myosynth/random.hpp"

namespace myosynth::synth {

using nlohmann::json;
using namespace myosynth::jsonio;

namespace {

Range read_range(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [min, max]");
  return {read_double(j[0], path + "[0]"), read_double(j[1], path + "[1]")};
}

Hsv read_hsv(const json& j, const std::string& path) {
  Hsv c;
  ObjectReader r(j, path);
  r.field("h", [&](const json& v, const std::string& p) { c.h = read_double(v, p); });
  r.field("s", [&](const json& v, const std::string& p) { c.s = read_double(v, p); });
  r.field("v", [&](const json& v, const std::string& p) { c.v = read_double(v, p); });
  r.finish();
  return c;
}

HsvRange read_hsv_range(const json& j, const std::string& path) {
  HsvRange c;
  ObjectReader r(j, path);
  r.field("h", [&](const json& v, const std::string& p) { c.h = read_range(v, p); });
  r.field("s", [&](const json& v, const std::string& p) { c.s = read_range(v, p); });
  r.field("v", [&](const json& v, const std::string& p) { c.v = read_range(v, p); });
  r.finish();
  return c;
}

json range_json(Range r) { return json::array({r.min, r.max}); }
json hsv_json(Hsv c) { return {{"h", c.h}, {"s", c.s}, {"v", c.v}}; }
json hsv_range_json(const HsvRange& c) {
  return {{"h", range_json(c.h)}, {"s", range_json(c.s)}, {"v", range_json(c.v)}};
}

void check_range(Range r, const std::string& field) {
  if (r.min > r.max) throw ConfigError(field, "min > max");
}
void check_range_within(Range r, double lo, double hi, const std::string& field) {
  check_range(r, field);
  if (r.min < lo || r.max > hi) throw ConfigError(field, "outside allowed interval");
}
void check_positive_range(Range r, const std::string& field) {
  check_range(r, field);
  if (!(r.min > 0.0)) throw ConfigError(field, "must be > 0");
}
void check_nonneg_range(Range r, const std::string& field) {
  check_range(r, field);
  if (r.min < 0.0) throw ConfigError(field, "must be >= 0");
}
void check_hsv_range(const HsvRange& c, const std::string& field) {
  check_range_within(c.h, 0.0, 1.0, field + ".h");
  check_range_within(c.s, 0.0, 1.0, field + ".s");
  check_range_within(c.v, 0.0, 1.0, field + ".v");
}
void check_hsv(Hsv c, const std::string& field) {
  for (auto [v, n] : {std::pair{c.h, ".h"}, std::pair{c.s, ".s"}, std::pair{c.v, ".v"}})
    if (v < 0.0 || v > 1.0) throw ConfigError(field + n, "outside [0, 1]");
}
void check_prob(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(field, "probability outside [0, 1]");
}
void check_positive(double v, const std::string& field) {
  if (!(v > 0.0)) throw ConfigError(field, "must be > 0");
}
void check_nonneg(double v, const std::string& field) {
  if (!(v >= 0.0)) throw ConfigError(field, "must be >= 0");
}

double draw(Rng& rng, Range r) { return r.min + (r.max - r.min) * rng.uniform(); }
Hsv draw(Rng& rng, const HsvRange& c) {
  double h = draw(rng, c.h);
  double s = draw(rng, c.s);
  double v = draw(rng, c.v);
  return {h, s, v};
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.width < 64) throw ConfigError("width", "must be >= 64");
  if (c.height < 64) throw ConfigError("height", "must be >= 64");
  if (!(c.um_per_px.min > 0.0)) throw ConfigError("um_per_px.min", "must be > 0");
  if (c.um_per_px.min > c.um_per_px.max) throw ConfigError("um_per_px", "min > max");
  check_nonneg(c.um_per_px.std, "um_per_px.std");
  check_positive(c.geometry_um_per_px, "geometry_um_per_px");
  check_positive_range(c.fiber_density, "fiber_density");
  check_range_within(c.fiber_jitter, 0.0, 1.0, "fiber_jitter");
  check_range_within(c.tissue_coverage, 0.0, 1.0, "tissue_coverage");
  check_nonneg_range(c.warp.frequency, "warp.frequency");
  check_nonneg_range(c.warp.amplitude, "warp.amplitude");
  if (c.warp.octaves < 1 || c.warp.octaves > 8) throw ConfigError("warp.octaves", "must be in 1..8");
  check_nonneg_range(c.endomysium_gap, "endomysium_gap");
  check_positive_range(c.perimysium.density, "perimysium.density");
  check_nonneg_range(c.perimysium.band_width, "perimysium.band_width");
  check_nonneg_range(c.perimysium.waviness, "perimysium.waviness");
  check_hsv_range(c.stain.cytoplasm, "stain.cytoplasm");
  check_hsv(c.stain.cytoplasm_jitter, "stain.cytoplasm_jitter");
  check_hsv_range(c.stain.endomysium, "stain.endomysium");
  check_hsv_range(c.stain.perimysium, "stain.perimysium");
  check_hsv_range(c.stain.nucleus, "stain.nucleus");
  check_hsv_range(c.stain.background, "stain.background");
  check_range_within(c.stain.texture_amplitude, 0.0, 1.0, "stain.texture_amplitude");
  check_nonneg_range(c.nuclei.peripheral_density, "nuclei.peripheral_density");
  check_range_within(c.nuclei.central_prob, 0.0, 1.0, "nuclei.central_prob");
  check_positive_range(c.nuclei.radius, "nuclei.radius");
  check_range_within(c.nuclei.eccentricity, 0.0, 0.99, "nuclei.eccentricity");
  check_range_within(c.artifacts.freeze_hole_prob, 0.0, 1.0, "artifacts.freeze_hole_prob");
  check_positive_range(c.artifacts.freeze_hole_size, "artifacts.freeze_hole_size");
  check_range_within(c.artifacts.fold_prob, 0.0, 1.0, "artifacts.fold_prob");
  check_range_within(c.artifacts.spill_prob, 0.0, 1.0, "artifacts.spill_prob");
  if (c.boundary_halfwidth < 0) throw ConfigError("boundary_halfwidth", "must be >= 0");
  if (c.min_fragment_px < 1) throw ConfigError("min_fragment_px", "must be >= 1");
}

void validate(const SceneParams& p) {
  if (p.width < 64) throw ConfigError("width", "must be >= 64");
  if (p.height < 64) throw ConfigError("height", "must be >= 64");
  check_positive(p.um_per_px, "um_per_px");
  check_positive(p.geometry_um_per_px, "geometry_um_per_px");
  check_positive(p.fiber_density, "fiber_density");
  if (!(p.fiber_jitter >= 0.0 && p.fiber_jitter <= 1.0)) throw ConfigError("fiber_jitter", "outside [0, 1]");
  if (!(p.tissue_coverage >= 0.0 && p.tissue_coverage <= 1.0)) throw ConfigError("tissue_coverage", "outside [0, 1]");
  check_nonneg(p.warp.frequency, "warp.frequency");
  check_nonneg(p.warp.amplitude, "warp.amplitude");
  if (p.warp.octaves < 1 || p.warp.octaves > 8) throw ConfigError("warp.octaves", "must be in 1..8");
  check_nonneg_range(p.endomysium_gap, "endomysium_gap");
  check_positive(p.perimysium.density, "perimysium.density");
  check_nonneg_range(p.perimysium.band_width, "perimysium.band_width");
  check_nonneg(p.perimysium.waviness, "perimysium.waviness");
  check_hsv(p.stain.cytoplasm, "stain.cytoplasm");
  check_hsv(p.stain.cytoplasm_jitter, "stain.cytoplasm_jitter");
  check_hsv(p.stain.endomysium, "stain.endomysium");
  check_hsv(p.stain.perimysium, "stain.perimysium");
  check_hsv(p.stain.nucleus, "stain.nucleus");
  check_hsv(p.stain.background, "stain.background");
  check_prob(p.stain.texture_amplitude, "stain.texture_amplitude");
  check_nonneg(p.nuclei.peripheral_density, "nuclei.peripheral_density");
  check_prob(p.nuclei.central_prob, "nuclei.central_prob");
  check_positive_range(p.nuclei.radius, "nuclei.radius");
  check_range_within(p.nuclei.eccentricity, 0.0, 0.99, "nuclei.eccentricity");
  check_prob(p.artifacts.freeze_hole_prob, "artifacts.freeze_hole_prob");
  check_positive(p.artifacts.freeze_hole_size, "artifacts.freeze_hole_size");
  check_prob(p.artifacts.fold_prob, "artifacts.fold_prob");
  check_prob(p.artifacts.spill_prob, "artifacts.spill_prob");
  if (p.boundary_halfwidth < 0) throw ConfigError("boundary_halfwidth", "must be >= 0");
  if (p.min_fragment_px < 1) throw ConfigError("min_fragment_px", "must be >= 1");
}

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index) {
  return hash_combine(hash_combine(master_seed, 0x73616d706c65ULL), index);
}

SceneParams sample_params(const SynthConfig& cfg, std::uint64_t master_seed, std::uint64_t index) {
  validate(cfg);
  SceneParams p;
  p.seed = sample_seed(master_seed, index);
  Rng rng(p.seed);
  p.width = cfg.width;
  p.height = cfg.height;
  p.um_per_px = rng.truncated_normal(cfg.um_per_px.mean, cfg.um_per_px.std, cfg.um_per_px.min, cfg.um_per_px.max);
  p.geometry_um_per_px = cfg.geometry_um_per_px;
  p.fiber_density = draw(rng, cfg.fiber_density);
  p.fiber_jitter = draw(rng, cfg.fiber_jitter);
  p.warp.frequency = draw(rng, cfg.warp.frequency);
  p.warp.amplitude = draw(rng, cfg.warp.amplitude);
  p.warp.octaves = cfg.warp.octaves;
  p.endomysium_gap = cfg.endomysium_gap;
  p.perimysium.density = draw(rng, cfg.perimysium.density);
  p.perimysium.band_width = cfg.perimysium.band_width;
  p.perimysium.waviness = draw(rng, cfg.perimysium.waviness);
  p.stain.cytoplasm = draw(rng, cfg.stain.cytoplasm);
  p.stain.cytoplasm_jitter = cfg.stain.cytoplasm_jitter;
  p.stain.endomysium = draw(rng, cfg.stain.endomysium);
  p.stain.perimysium = draw(rng, cfg.stain.perimysium);
  p.stain.nucleus = draw(rng, cfg.stain.nucleus);
  p.stain.background = draw(rng, cfg.stain.background);
  p.stain.texture_amplitude = draw(rng, cfg.stain.texture_amplitude);
  p.nuclei.peripheral_density = draw(rng, cfg.nuclei.peripheral_density);
  p.nuclei.central_prob = draw(rng, cfg.nuclei.central_prob);
  p.nuclei.radius = cfg.nuclei.radius;
  p.nuclei.eccentricity = cfg.nuclei.eccentricity;
  p.artifacts.freeze_hole_prob = draw(rng, cfg.artifacts.freeze_hole_prob);
  p.artifacts.freeze_hole_size = draw(rng, cfg.artifacts.freeze_hole_size);
  p.artifacts.fold_prob = draw(rng, cfg.artifacts.fold_prob);
  p.artifacts.spill_prob = draw(rng, cfg.artifacts.spill_prob);
  p.tissue_coverage = draw(rng, cfg.tissue_coverage);
  p.boundary_halfwidth = cfg.boundary_halfwidth;
  p.min_fragment_px = cfg.min_fragment_px;
  return p;
}

json to_json(const SynthConfig& c) {
  json j;
  j["width"] = c.width;
  j["height"] = c.height;
  j["um_per_px"] = {{"mean", c.um_per_px.mean}, {"std", c.um_per_px.std}, {"min", c.um_per_px.min},
                    {"max", c.um_per_px.max}};
  j["geometry_um_per_px"] = c.geometry_um_per_px;
  j["fiber_density"] = range_json(c.fiber_density);
  j["fiber_jitter"] = range_json(c.fiber_jitter);
  j["tissue_coverage"] = range_json(c.tissue_coverage);
  j["warp"] = {{"frequency", range_json(c.warp.frequency)},
               {"amplitude", range_json(c.warp.amplitude)},
               {"octaves", c.warp.octaves}};
  j["endomysium_gap"] = range_json(c.endomysium_gap);
  j["perimysium"] = {{"density", range_json(c.perimysium.density)},
                     {"band_width", range_json(c.perimysium.band_width)},
                     {"waviness", range_json(c.perimysium.waviness)}};
  j["stain"] = {{"cytoplasm", hsv_range_json(c.stain.cytoplasm)},
                {"cytoplasm_jitter", hsv_json(c.stain.cytoplasm_jitter)},
                {"endomysium", hsv_range_json(c.stain.endomysium)},
                {"perimysium", hsv_range_json(c.stain.perimysium)},
                {"nucleus", hsv_range_json(c.stain.nucleus)},
                {"background", hsv_range_json(c.stain.background)},
                {"texture_amplitude", range_json(c.stain.texture_amplitude)}};
  j["nuclei"] = {{"peripheral_density", range_json(c.nuclei.peripheral_density)},
                 {"central_prob", range_json(c.nuclei.central_prob)},
                 {"radius", range_json(c.nuclei.radius)},
                 {"eccentricity", range_json(c.nuclei.eccentricity)}};
  j["artifacts"] = {{"freeze_hole_prob", range_json(c.artifacts.freeze_hole_prob)},
                    {"freeze_hole_size", range_json(c.artifacts.freeze_hole_size)},
                    {"fold_prob", range_json(c.artifacts.fold_prob)},
                    {"spill_prob", range_json(c.artifacts.spill_prob)}};
  j["boundary_halfwidth"] = c.boundary_halfwidth;
  j["min_fragment_px"] = c.min_fragment_px;
  return j;
}

json to_json(const SceneParams& p) {
  json j;
  j["seed"] = p.seed;
  j["width"] = p.width;
  j["height"] = p.height;
  j["um_per_px"] = p.um_per_px;
  j["geometry_um_per_px"] = p.geometry_um_per_px;
  j["fiber_density"] = p.fiber_density;
  j["fiber_jitter"] = p.fiber_jitter;
  j["tissue_coverage"] = p.tissue_coverage;
  j["warp"] = {{"frequency", p.warp.frequency}, {"amplitude", p.warp.amplitude}, {"octaves", p.warp.octaves}};
  j["endomysium_gap"] = range_json(p.endomysium_gap);
  j["perimysium"] = {{"density", p.perimysium.density},
                     {"band_width", range_json(p.perimysium.band_width)},
                     {"waviness", p.perimysium.waviness}};
  j["stain"] = {{"cytoplasm", hsv_json(p.stain.cytoplasm)},
                {"cytoplasm_jitter", hsv_json(p.stain.cytoplasm_jitter)},
                {"endomysium", hsv_json(p.stain.endomysium)},
                {"perimysium", hsv_json(p.stain.perimysium)},
                {"nucleus", hsv_json(p.stain.nucleus)},
                {"background", hsv_json(p.stain.background)},
                {"texture_amplitude", p.stain.texture_amplitude}};
  j["nuclei"] = {{"peripheral_density", p.nuclei.peripheral_density},
                 {"central_prob", p.nuclei.central_prob},
                 {"radius", range_json(p.nuclei.radius)},
                 {"eccentricity", range_json(p.nuclei.eccentricity)}};
  j["artifacts"] = {{"freeze_hole_prob", p.artifacts.freeze_hole_prob},
                    {"freeze_hole_size", p.artifacts.freeze_hole_size},
                    {"fold_prob", p.artifacts.fold_prob},
                    {"spill_prob", p.artifacts.spill_prob}};
  j["boundary_halfwidth"] = p.boundary_halfwidth;
  j["min_fragment_px"] = p.min_fragment_px;
  return j;
}

SynthConfig config_from_json(const json& j) {
  SynthConfig c;
  ObjectReader r(j, "");
  using P = const std::string&;
  r.field("width", [&](const json& v, P p) { c.width = read_int(v, p); });
  r.field("height", [&](const json& v, P p) { c.height = read_int(v, p); });
  r.field("um_per_px", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("mean", [&](const json& x, P q) { c.um_per_px.mean = read_double(x, q); });
    o.field("std", [&](const json& x, P q) { c.um_per_px.std = read_double(x, q); });
    o.field("min", [&](const json& x, P q) { c.um_per_px.min = read_double(x, q); });
    o.field("max", [&](const json& x, P q) { c.um_per_px.max = read_double(x, q); });
    o.finish();
  });
  r.field("geometry_um_per_px", [&](const json& v, P p) { c.geometry_um_per_px = read_double(v, p); });
  r.field("fiber_density", [&](const json& v, P p) { c.fiber_density = read_range(v, p); });
  r.field("fiber_jitter", [&](const json& v, P p) { c.fiber_jitter = read_range(v, p); });
  r.field("tissue_coverage", [&](const json& v, P p) { c.tissue_coverage = read_range(v, p); });
  r.field("warp", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("frequency", [&](const json& x, P q) { c.warp.frequency = read_range(x, q); });
    o.field("amplitude", [&](const json& x, P q) { c.warp.amplitude = read_range(x, q); });
    o.field("octaves", [&](const json& x, P q) { c.warp.octaves = read_int(x, q); });
    o.finish();
  });
  r.field("endomysium_gap", [&](const json& v, P p) { c.endomysium_gap = read_range(v, p); });
  r.field("perimysium", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("density", [&](const json& x, P q) { c.perimysium.density = read_range(x, q); });
    o.field("band_width", [&](const json& x, P q) { c.perimysium.band_width = read_range(x, q); });
    o.field("waviness", [&](const json& x, P q) { c.perimysium.waviness = read_range(x, q); });
    o.finish();
  });
  r.field("stain", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("cytoplasm", [&](const json& x, P q) { c.stain.cytoplasm = read_hsv_range(x, q); });
    o.field("cytoplasm_jitter", [&](const json& x, P q) { c.stain.cytoplasm_jitter = read_hsv(x, q); });
    o.field("endomysium", [&](const json& x, P q) { c.stain.endomysium = read_hsv_range(x, q); });
    o.field("perimysium", [&](const json& x, P q) { c.stain.perimysium = read_hsv_range(x, q); });
    o.field("nucleus", [&](const json& x, P q) { c.stain.nucleus = read_hsv_range(x, q); });
    o.field("background", [&](const json& x, P q) { c.stain.background = read_hsv_range(x, q); });
    o.field("texture_amplitude", [&](const json& x, P q) { c.stain.texture_amplitude = read_range(x, q); });
    o.finish();
  });
  r.field("nuclei", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("peripheral_density", [&](const json& x, P q) { c.nuclei.peripheral_density = read_range(x, q); });
    o.field("central_prob", [&](const json& x, P q) { c.nuclei.central_prob = read_range(x, q); });
    o.field("radius", [&](const json& x, P q) { c.nuclei.radius = read_range(x, q); });
    o.field("eccentricity", [&](const json& x, P q) { c.nuclei.eccentricity = read_range(x, q); });
    o.finish();
  });
  r.field("artifacts", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("freeze_hole_prob", [&](const json& x, P q) { c.artifacts.freeze_hole_prob = read_range(x, q); });
    o.field("freeze_hole_size", [&](const json& x, P q) { c.artifacts.freeze_hole_size = read_range(x, q); });
    o.field("fold_prob", [&](const json& x, P q) { c.artifacts.fold_prob = read_range(x, q); });
    o.field("spill_prob", [&](const json& x, P q) { c.artifacts.spill_prob = read_range(x, q); });
    o.finish();
  });
  r.field("boundary_halfwidth", [&](const json& v, P p) { c.boundary_halfwidth = read_int(v, p); });
  r.field("min_fragment_px", [&](const json& v, P p) { c.min_fragment_px = read_int(v, p); });
  r.finish();
  validate(c);
  return c;
}

SceneParams params_from_json(const json& j) {
  SceneParams s;
  ObjectReader r(j, "");
  using P = const std::string&;
  r.field("seed", [&](const json& v, P p) { s.seed = read_u64(v, p); });
  r.field("width", [&](const json& v, P p) { s.width = read_int(v, p); });
  r.field("height", [&](const json& v, P p) { s.height = read_int(v, p); });
  r.field("um_per_px", [&](const json& v, P p) { s.um_per_px = read_double(v, p); });
  r.field("geometry_um_per_px", [&](const json& v, P p) { s.geometry_um_per_px = read_double(v, p); });
  r.field("fiber_density", [&](const json& v, P p) { s.fiber_density = read_double(v, p); });
  r.field("fiber_jitter", [&](const json& v, P p) { s.fiber_jitter = read_double(v, p); });
  r.field("tissue_coverage", [&](const json& v, P p) { s.tissue_coverage = read_double(v, p); });
  r.field("warp", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("frequency", [&](const json& x, P q) { s.warp.frequency = read_double(x, q); });
    o.field("amplitude", [&](const json& x, P q) { s.warp.amplitude = read_double(x, q); });
    o.field("octaves", [&](const json& x, P q) { s.warp.octaves = read_int(x, q); });
    o.finish();
  });
  r.field("endomysium_gap", [&](const json& v, P p) { s.endomysium_gap = read_range(v, p); });
  r.field("perimysium", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("density", [&](const json& x, P q) { s.perimysium.density = read_double(x, q); });
    o.field("band_width", [&](const json& x, P q) { s.perimysium.band_width = read_range(x, q); });
    o.field("waviness", [&](const json& x, P q) { s.perimysium.waviness = read_double(x, q); });
    o.finish();
  });
  r.field("stain", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("cytoplasm", [&](const json& x, P q) { s.stain.cytoplasm = read_hsv(x, q); });
    o.field("cytoplasm_jitter", [&](const json& x, P q) { s.stain.cytoplasm_jitter = read_hsv(x, q); });
    o.field("endomysium", [&](const json& x, P q) { s.stain.endomysium = read_hsv(x, q); });
    o.field("perimysium", [&](const json& x, P q) { s.stain.perimysium = read_hsv(x, q); });
    o.field("nucleus", [&](const json& x, P q) { s.stain.nucleus = read_hsv(x, q); });
    o.field("background", [&](const json& x, P q) { s.stain.background = read_hsv(x, q); });
    o.field("texture_amplitude", [&](const json& x, P q) { s.stain.texture_amplitude = read_double(x, q); });
    o.finish();
  });
  r.field("nuclei", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("peripheral_density", [&](const json& x, P q) { s.nuclei.peripheral_density = read_double(x, q); });
    o.field("central_prob", [&](const json& x, P q) { s.nuclei.central_prob = read_double(x, q); });
    o.field("radius", [&](const json& x, P q) { s.nuclei.radius = read_range(x, q); });
    o.field("eccentricity", [&](const json& x, P q) { s.nuclei.eccentricity = read_range(x, q); });
    o.finish();
  });
  r.field("artifacts", [&](const json& v, P p) {
    ObjectReader o(v, p);
    o.field("freeze_hole_prob", [&](const json& x, P q) { s.artifacts.freeze_hole_prob = read_double(x, q); });
    o.field("freeze_hole_size", [&](const json& x, P q) { s.artifacts.freeze_hole_size = read_double(x, q); });
    o.field("fold_prob", [&](const json& x, P q) { s.artifacts.fold_prob = read_double(x, q); });
    o.field("spill_prob", [&](const json& x, P q) { s.artifacts.spill_prob = read_double(x, q); });
    o.finish();
  });
  r.field("boundary_halfwidth", [&](const json& v, P p) { s.boundary_halfwidth = read_int(v, p); });
  r.field("min_fragment_px", [&](const json& v, P p) { s.min_fragment_px = read_int(v, p); });
  r.finish();
  validate(s);
  return s;
}

std::string params_digest(const SceneParams& params) {
  const std::string text = to_json(params).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace myosynth::synth
