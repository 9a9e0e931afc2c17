#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "myosynth/render.hpp"
#include "myosynth/scene.hpp"

namespace myosynth::dataset {

/// Build identifier embedded in manifests.
std::string version_string();

/// File names of sample `index` inside a dataset directory.
struct SampleFiles {
  std::string rgb, inst, classes, weights;
};
SampleFiles sample_files(std::size_t index);

struct GenerateOptions {
  std::size_t count = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  synth::RenderOptions render{};
};

struct SampleRecord {
  std::size_t index = 0;
  synth::SceneParams params;
  synth::SampleMeta meta;
};

struct GenerateResult {
  std::vector<SampleRecord> samples;
  std::uint64_t total_fibers = 0;
  nlohmann::json manifest;
};

/// Writes the dataset layout and manifest.json. Output bytes depend only on
/// (cfg, options.count, options.seed), not on options.jobs. On failure every
/// file written so far is removed (and `out` itself if this call created it)
/// before the exception propagates.
GenerateResult generate_dataset(const synth::SynthConfig& cfg, const GenerateOptions& options,
                                const std::filesystem::path& out);

/// Writes one rendered sample under `out` using the layout names.
void write_sample(const std::filesystem::path& out, std::size_t index, const synth::RenderedSample& s);

/// Checks that manifest.json and every listed file exist with the declared
/// formats and sizes. Returns human-readable problems; empty when valid.
std::vector<std::string> check_dataset(const std::filesystem::path& dir);

struct PreviewAxis {
  std::string param;  // dotted path into the SceneParams JSON, e.g. "fiber_density"
  std::vector<double> values;
};

struct PreviewResult {
  RgbImage grid;
  nlohmann::json summary;  // tiles with parameter values and fiber counts
};

/// Renders a grid of tiles from one base scene (cfg, seed, index 0), varying
/// `cols` along x and optionally `rows` along y.
PreviewResult preview(const synth::SynthConfig& cfg, std::uint64_t seed, int tile, const PreviewAxis& cols,
                      const PreviewAxis* rows = nullptr);

/// Sets a numeric SceneParams field by dotted path; throws ConfigError for
/// unknown or non-numeric paths.
synth::SceneParams with_param(const synth::SceneParams& base, const std::string& path, double value);

}  // namespace myosynth::dataset
