#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "myosynth/features.hpp"
#include "myosynth/image.hpp"
#include "myosynth/polygon.hpp"

namespace myosynth::pipeline {

struct PipelineParams {
  int threshold = 210;                // on round(255 p)
  bool use_watershed = false;
  double watershed_h = 1.0;           // px
  double min_area_um2 = 150.0;
  double min_circularity_pre = 0.1;
  int dilate_erode_iters = 10;
  std::int64_t hole_max_px2 = 3500;
  double mask_min_area_um2 = 1.5e6;
  /// The muscle-mask size filter never demands more than this fraction of
  /// the field of view, so tiles smaller than the filter area keep tissue.
  double mask_min_area_max_fraction = 0.25;
  double shape_circ_min = 0.35;
  double shape_circ_max = 0.95;
  std::optional<double> max_feret_um;
  /// Measure connective tissue against the shape-filtered fibers instead of
  /// the post-processed ones.
  bool ct_from_shape_filtered = false;
};

void validate(const PipelineParams& p);
nlohmann::json to_json(const PipelineParams& p);
/// Strict: unknown keys rejected, missing keys keep defaults.
PipelineParams params_from_json(const nlohmann::json& j);

struct SegmentationOutputs {
  Mask postprocessed;
  Mask shape_filtered;
  Mask muscle_mask;
  Mask connective_tissue;
  DoubleImage ct_thickness_um;  // local thickness on the unexcluded CT; 0 elsewhere
  double ct_fraction = 0.0;
  double ct_area_um2 = 0.0;
  double ct_mean_thickness_um = 0.0;
};

enum class ExclusionKind { type1_freezing, type2_loosening };

struct ExclusionRegion {
  geom::Polygon polygon;  // um
  ExclusionKind kind = ExclusionKind::type1_freezing;
};

/// Threshold, optional watershed, then drop 8-connected components below
/// min_area_um2 or min_circularity_pre.
Mask postprocess(const ProbabilityMap& prob, const PipelineParams& p, double um_per_px);

/// Closing (dilate then erode), hole removal by area opening of the inverse,
/// and the size filter on 4-connected mask components.
Mask build_muscle_mask(const Mask& postprocessed, const PipelineParams& p, double um_per_px);

/// Keeps 8-connected components with circularity in [min, max] and, when
/// set, maximum Feret diameter <= max_feret_um.
Mask shape_filter(const Mask& fibers, const PipelineParams& p, double um_per_px);

struct ConnectiveTissue {
  Mask mask;
  DoubleImage thickness_um;
  double fraction = 0.0;
  double area_um2 = 0.0;
  double mean_thickness_um = 0.0;
};

/// CT = muscle_mask AND NOT fibers; thickness is the local thickness of CT.
ConnectiveTissue connective_tissue(const Mask& muscle_mask, const Mask& fibers, double um_per_px);

/// Fibers whose centroid lies in a region are dropped from shape_filtered and
/// flagged excluded; CT pixels whose centers lie in a region are removed and
/// the CT summary recomputed. The muscle mask is left unchanged.
void apply_exclusion_regions(SegmentationOutputs& out, std::vector<features::FiberRecord>& records,
                             const LabelImage& fiber_labels, const std::vector<ExclusionRegion>& regions,
                             double um_per_px);

struct FullResult {
  SegmentationOutputs outputs;
  LabelImage fiber_labels;  // 8-connected components of shape_filtered before exclusion
  std::vector<features::FiberRecord> records;
};

FullResult run_full(const ProbabilityMap& prob, const PipelineParams& p, double um_per_px,
                    const std::vector<ExclusionRegion>& exclusions = {},
                    const std::vector<features::RegionPolygon>& regions = {});

/// Mean CT thickness over CT pixels tagged with `region` (pixel centers
/// tested against the region polygons with the same fallback rule as fibers).
/// Returns nullopt when the region holds no CT.
std::optional<double> ct_region_thickness(const SegmentationOutputs& out,
                                          const std::vector<features::RegionPolygon>& regions,
                                          features::Region region, double um_per_px);

/// Summary JSON: fiber_count, ct_fraction, ct_area_um2, ct_mean_thickness_um, params.
nlohmann::json summary_json(const FullResult& r, const PipelineParams& p, double um_per_px);

/// Regions file: [{"kind": ..., "polygon": [[x, y], ...]}, ...]. Kinds
/// type1_freezing and type2_loosening are exclusions; soleus and
/// gastrocnemius are anatomical regions.
struct RegionsFile {
  std::vector<ExclusionRegion> exclusions;
  std::vector<features::RegionPolygon> regions;
};
RegionsFile regions_from_json(const nlohmann::json& j);

}  // namespace myosynth::pipeline
