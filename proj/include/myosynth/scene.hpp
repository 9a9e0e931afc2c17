#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "myosynth/color.hpp"

namespace myosynth::synth {

/// Closed interval [min, max].
struct Range {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

struct HsvRange {
  Range h, s, v;
};

/// Sampling ranges for a batch of scenes. Scalar scene parameters are drawn
/// uniformly from a Range here; parameters that are themselves spatial
/// (min, max) ranges in SceneParams are copied through unchanged.
///
/// Geometry lengths are in um at `geometry_um_per_px`: shapes are rasterized
/// at that reference scale, while each sample's physical calibration
/// `um_per_px` is drawn independently from a truncated normal.
struct SynthConfig {
  int width = 2048;
  int height = 2048;
  struct {
    double mean = 0.79;
    double std = 0.22;
    double min = 0.3;
    double max = 1.5;
  } um_per_px;
  double geometry_um_per_px = 0.79;

  Range fiber_density{330.0, 410.0};  // feature points per mm^2
  Range fiber_jitter{0.8, 1.0};
  Range tissue_coverage{0.45, 0.85};  // fraction of the field covered by the section
  struct {
    Range frequency{0.004, 0.010};  // 1/um
    Range amplitude{4.0, 12.0};     // um
    int octaves = 2;
  } warp;
  Range endomysium_gap{1.5, 6.0};  // um, spatial range
  struct {
    Range density{3.0, 8.0};       // cells per mm^2
    Range band_width{3.0, 12.0};   // um, spatial range
    Range waviness{20.0, 60.0};    // um of warp
  } perimysium;
  struct {
    HsvRange cytoplasm{{0.90, 0.98}, {0.30, 0.60}, {0.72, 0.92}};
    Hsv cytoplasm_jitter{0.015, 0.08, 0.06};
    HsvRange endomysium{{0.88, 0.97}, {0.08, 0.25}, {0.88, 0.97}};
    HsvRange perimysium{{0.88, 0.97}, {0.12, 0.32}, {0.84, 0.95}};
    HsvRange nucleus{{0.68, 0.78}, {0.40, 0.70}, {0.30, 0.55}};
    HsvRange background{{0.85, 1.0}, {0.0, 0.06}, {0.93, 0.99}};
    Range texture_amplitude{0.03, 0.10};
  } stain;
  struct {
    Range peripheral_density{0.01, 0.03};  // nuclei per um of fiber rim
    Range central_prob{0.0, 0.10};
    Range radius{2.0, 3.5};                // um, spatial range
    Range eccentricity{0.3, 0.85};         // spatial range
  } nuclei;
  struct {
    Range freeze_hole_prob{0.0, 0.08};
    Range freeze_hole_size{2.0, 6.0};  // um
    Range fold_prob{0.0, 0.3};
    Range spill_prob{0.0, 0.3};
  } artifacts;
  int boundary_halfwidth = 2;
  int min_fragment_px = 16;
};

/// Fully resolved description of one synthetic image.
struct SceneParams {
  std::uint64_t seed = 0;
  int width = 2048;
  int height = 2048;
  double um_per_px = 0.79;
  double geometry_um_per_px = 0.79;
  double fiber_density = 300.0;
  double fiber_jitter = 1.0;
  double tissue_coverage = 1.0;
  struct {
    double frequency = 0.006;
    double amplitude = 8.0;
    int octaves = 2;
  } warp;
  Range endomysium_gap{1.5, 6.0};
  struct {
    double density = 5.0;
    Range band_width{3.0, 12.0};
    double waviness = 40.0;
  } perimysium;
  struct {
    Hsv cytoplasm{0.94, 0.45, 0.82};
    Hsv cytoplasm_jitter{0.015, 0.08, 0.06};
    Hsv endomysium{0.92, 0.15, 0.93};
    Hsv perimysium{0.92, 0.22, 0.9};
    Hsv nucleus{0.73, 0.55, 0.42};
    Hsv background{0.92, 0.03, 0.96};
    double texture_amplitude = 0.06;
  } stain;
  struct {
    double peripheral_density = 0.02;
    double central_prob = 0.05;
    Range radius{2.0, 3.5};
    Range eccentricity{0.3, 0.85};
  } nuclei;
  struct {
    double freeze_hole_prob = 0.0;
    double freeze_hole_size = 4.0;
    double fold_prob = 0.0;
    double spill_prob = 0.0;
  } artifacts;
  int boundary_halfwidth = 2;
  int min_fragment_px = 16;
};

/// Throws ConfigError naming the first invalid field.
void validate(const SynthConfig& cfg);
void validate(const SceneParams& params);

/// Deterministic in (cfg, master_seed, index); each index draws from its own
/// stream, so adding samples never perturbs earlier ones.
SceneParams sample_params(const SynthConfig& cfg, std::uint64_t master_seed, std::uint64_t index);

std::uint64_t sample_seed(std::uint64_t master_seed, std::uint64_t index);

nlohmann::json to_json(const SynthConfig& cfg);
nlohmann::json to_json(const SceneParams& params);
/// Strict parse: unknown keys are rejected, missing keys keep defaults.
SynthConfig config_from_json(const nlohmann::json& j);
SceneParams params_from_json(const nlohmann::json& j);

/// Hex FNV-1a digest of the canonical JSON form.
std::string params_digest(const SceneParams& params);

}  // namespace myosynth::synth
