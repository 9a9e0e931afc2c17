#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "myosynth/image.hpp"
#include "myosynth/labels.hpp"
#include "myosynth/scene.hpp"

namespace myosynth::synth {

/// Largest id storable in the 16-bit instance PNG.
inline constexpr std::uint32_t kMaxFibers = 65535;

struct SampleMeta {
  std::uint64_t seed = 0;
  double um_per_px = 0.0;
  std::uint32_t fiber_count = 0;
  std::string params_digest;
};

struct RenderedSample {
  RgbImage rgb;
  LabelImage instances;
  ClassImage classes;
  FloatImage weights;
  SampleMeta meta;
};

/// Tissue geometry before any color is applied.
struct Geometry {
  LabelImage instances;        // compact ids 1..fiber_count
  Mask perimysium;             // coarse connective-tissue bands
  Mask tissue;                 // section area; the rest is bare slide
  std::vector<std::uint32_t> cell_ids;  // indexed by instance id; Worley id of the fiber cell
  std::uint32_t fiber_count = 0;
};

/// Rasterizes the fiber tessellation and relabels it into compact,
/// 4-connected instances. Fragments smaller than min_fragment_px become
/// background. Throws GenerationError past kMaxFibers instances.
Geometry render_geometry(const SceneParams& params);

struct RenderOptions {
  bool weights = true;
  WeightParams weight_params{};
};

/// Full composite: geometry, labels, weight map, then color, nuclei and
/// artifacts. Labels are final before any painting, so nuclei and artifacts
/// only touch the RGB image.
RenderedSample render_sample(const SceneParams& params, const RenderOptions& options = {});

}  // namespace myosynth::synth
