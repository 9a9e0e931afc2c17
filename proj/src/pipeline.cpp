#include "myosynth/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "myosynth/errors.hpp"
#include "myosynth/imgproc.hpp"
#include "myosynth/json_util.hpp"

namespace myosynth::pipeline {

using nlohmann::json;
using namespace myosynth::jsonio;
using features::FiberRecord;
using features::Region;
using imgproc::Connectivity;

namespace {

void require_scale(double um_per_px) {
  if (!(um_per_px > 0.0) || !std::isfinite(um_per_px)) throw ConfigError("um_per_px", "must be > 0");
}

template <typename Keep>
Mask filter_components(const Mask& mask, Keep keep) {
  auto cc = imgproc::connected_components(mask, Connectivity::eight);
  auto shapes = features::measure_shapes(cc.labels);
  std::vector<bool> keep_id(shapes.size(), false);
  for (std::uint32_t id = 1; id < shapes.size(); ++id) keep_id[id] = keep(shapes[id]);
  return imgproc::select_labels(cc.labels, keep_id);
}

geom::Point pixel_center_um(std::size_t i, int width, double um_per_px) {
  return {(double(i % std::size_t(width)) + 0.5) * um_per_px, (double(i / std::size_t(width)) + 0.5) * um_per_px};
}

void summarize_ct(ConnectiveTissue& ct, const Mask& muscle_mask, double um_per_px) {
  std::int64_t ct_px = imgproc::count(ct.mask);
  std::int64_t mm_px = imgproc::count(muscle_mask);
  ct.fraction = mm_px > 0 ? double(ct_px) / double(mm_px) : 0.0;
  ct.area_um2 = double(ct_px) * um_per_px * um_per_px;
  ct.mean_thickness_um = imgproc::masked_mean(ct.thickness_um, ct.mask);
}

Region tag_point(const std::vector<features::RegionPolygon>& regions, geom::Point p, Region fallback) {
  for (const auto& r : regions)
    if (geom::contains(r.polygon, p)) return r.region;
  return fallback;
}

}  // namespace

void validate(const PipelineParams& p) {
  if (p.threshold < 0 || p.threshold > 255) throw ConfigError("threshold", "must be in 0..255");
  if (!(p.watershed_h >= 0.0)) throw ConfigError("watershed_h", "must be >= 0");
  if (!(p.min_area_um2 >= 0.0)) throw ConfigError("min_area_um2", "must be >= 0");
  if (!(p.min_circularity_pre >= 0.0)) throw ConfigError("min_circularity_pre", "must be >= 0");
  if (p.dilate_erode_iters < 0) throw ConfigError("dilate_erode_iters", "must be >= 0");
  if (p.hole_max_px2 < 0) throw ConfigError("hole_max_px2", "must be >= 0");
  if (!(p.mask_min_area_um2 >= 0.0)) throw ConfigError("mask_min_area_um2", "must be >= 0");
  if (!(p.mask_min_area_max_fraction >= 0.0 && p.mask_min_area_max_fraction <= 1.0))
    throw ConfigError("mask_min_area_max_fraction", "outside [0, 1]");
  if (!(p.shape_circ_min >= 0.0)) throw ConfigError("shape_circ_min", "must be >= 0");
  if (!(p.shape_circ_max >= p.shape_circ_min)) throw ConfigError("shape_circ_max", "must be >= shape_circ_min");
  if (p.max_feret_um && !(*p.max_feret_um > 0.0)) throw ConfigError("max_feret_um", "must be > 0");
}

json to_json(const PipelineParams& p) {
  json j;
  j["threshold"] = p.threshold;
  j["use_watershed"] = p.use_watershed;
  j["watershed_h"] = p.watershed_h;
  j["min_area_um2"] = p.min_area_um2;
  j["min_circularity_pre"] = p.min_circularity_pre;
  j["dilate_erode_iters"] = p.dilate_erode_iters;
  j["hole_max_px2"] = p.hole_max_px2;
  j["mask_min_area_um2"] = p.mask_min_area_um2;
  j["mask_min_area_max_fraction"] = p.mask_min_area_max_fraction;
  j["shape_circ_min"] = p.shape_circ_min;
  j["shape_circ_max"] = p.shape_circ_max;
  j["max_feret_um"] = p.max_feret_um ? json(*p.max_feret_um) : json(nullptr);
  j["ct_from_shape_filtered"] = p.ct_from_shape_filtered;
  return j;
}

PipelineParams params_from_json(const json& j) {
  PipelineParams p;
  ObjectReader r(j, "");
  using P = const std::string&;
  r.field("threshold", [&](const json& v, P k) { p.threshold = read_int(v, k); });
  r.field("use_watershed", [&](const json& v, P k) { p.use_watershed = read_bool(v, k); });
  r.field("watershed_h", [&](const json& v, P k) { p.watershed_h = read_double(v, k); });
  r.field("min_area_um2", [&](const json& v, P k) { p.min_area_um2 = read_double(v, k); });
  r.field("min_circularity_pre", [&](const json& v, P k) { p.min_circularity_pre = read_double(v, k); });
  r.field("dilate_erode_iters", [&](const json& v, P k) { p.dilate_erode_iters = read_int(v, k); });
  r.field("hole_max_px2", [&](const json& v, P k) { p.hole_max_px2 = read_int(v, k); });
  r.field("mask_min_area_um2", [&](const json& v, P k) { p.mask_min_area_um2 = read_double(v, k); });
  r.field("mask_min_area_max_fraction", [&](const json& v, P k) { p.mask_min_area_max_fraction = read_double(v, k); });
  r.field("shape_circ_min", [&](const json& v, P k) { p.shape_circ_min = read_double(v, k); });
  r.field("shape_circ_max", [&](const json& v, P k) { p.shape_circ_max = read_double(v, k); });
  r.field("max_feret_um", [&](const json& v, P k) {
    if (v.is_null()) {
      p.max_feret_um.reset();
    } else {
      p.max_feret_um = read_double(v, k);
    }
  });
  r.field("ct_from_shape_filtered", [&](const json& v, P k) { p.ct_from_shape_filtered = read_bool(v, k); });
  r.finish();
  validate(p);
  return p;
}

Mask postprocess(const ProbabilityMap& prob, const PipelineParams& p, double um_per_px) {
  validate(p);
  require_scale(um_per_px);
  Mask mask = imgproc::threshold_map(prob, p.threshold);
  if (p.use_watershed) mask = imgproc::foreground(imgproc::watershed_split(mask, p.watershed_h));
  const double px_area = um_per_px * um_per_px;
  return filter_components(mask, [&](const features::Shape& s) {
    return s.area > 0 && !(s.area * px_area < p.min_area_um2) && !(s.circularity < p.min_circularity_pre);
  });
}

Mask build_muscle_mask(const Mask& postprocessed, const PipelineParams& p, double um_per_px) {
  validate(p);
  require_scale(um_per_px);
  Mask closed = imgproc::erode(imgproc::dilate(postprocessed, p.dilate_erode_iters), p.dilate_erode_iters);
  Mask filled = imgproc::invert(imgproc::area_opening(imgproc::invert(closed), p.hole_max_px2, Connectivity::four));
  const double px_area = um_per_px * um_per_px;
  const double field = double(postprocessed.size()) * px_area;
  const double min_area = std::min(p.mask_min_area_um2, p.mask_min_area_max_fraction * field);
  auto cc = imgproc::connected_components(filled, Connectivity::four);
  std::vector<std::int64_t> area(std::size_t(cc.count) + 1, 0);
  for (auto l : cc.labels.pixels()) ++area[l];
  std::vector<bool> keep(area.size(), false);
  for (std::uint32_t id = 1; id <= cc.count; ++id) keep[id] = !(double(area[id]) * px_area < min_area);
  return imgproc::select_labels(cc.labels, keep);
}

Mask shape_filter(const Mask& fibers, const PipelineParams& p, double um_per_px) {
  validate(p);
  require_scale(um_per_px);
  return filter_components(fibers, [&](const features::Shape& s) {
    if (s.area == 0) return false;
    if (s.circularity < p.shape_circ_min || s.circularity > p.shape_circ_max) return false;
    if (p.max_feret_um && s.feret_max * um_per_px > *p.max_feret_um) return false;
    return true;
  });
}

ConnectiveTissue connective_tissue(const Mask& muscle_mask, const Mask& fibers, double um_per_px) {
  require_scale(um_per_px);
  require_same_shape(muscle_mask, fibers, "connective_tissue");
  ConnectiveTissue ct;
  ct.mask = imgproc::mask_and_not(muscle_mask, fibers);
  ct.thickness_um = imgproc::local_thickness(ct.mask, um_per_px);
  summarize_ct(ct, muscle_mask, um_per_px);
  return ct;
}

void apply_exclusion_regions(SegmentationOutputs& out, std::vector<FiberRecord>& records,
                             const LabelImage& fiber_labels, const std::vector<ExclusionRegion>& regions,
                             double um_per_px) {
  require_scale(um_per_px);
  for (std::size_t i = 0; i < regions.size(); ++i)
    geom::require_simple(regions[i].polygon, "exclusions[" + std::to_string(i) + "].polygon");
  if (regions.empty()) return;
  auto inside_any = [&](geom::Point p) {
    return std::any_of(regions.begin(), regions.end(), [&](const ExclusionRegion& r) { return geom::contains(r.polygon, p); });
  };
  std::uint32_t max_id = 0;
  for (auto v : fiber_labels.pixels()) max_id = std::max(max_id, v);
  std::vector<bool> drop(std::size_t(max_id) + 1, false);
  for (auto& r : records) {
    if (inside_any({r.centroid_x_um, r.centroid_y_um})) {
      r.excluded = true;
      if (r.id <= max_id) drop[r.id] = true;
    }
  }
  for (std::size_t i = 0; i < fiber_labels.size(); ++i)
    if (drop[fiber_labels[i]]) out.shape_filtered[i] = 0;

  ConnectiveTissue ct{out.connective_tissue, out.ct_thickness_um};
  const int w = ct.mask.width();
  for (std::size_t i = 0; i < ct.mask.size(); ++i)
    if (ct.mask[i] && inside_any(pixel_center_um(i, w, um_per_px))) {
      ct.mask[i] = 0;
      ct.thickness_um[i] = 0.0;
    }
  summarize_ct(ct, out.muscle_mask, um_per_px);
  out.connective_tissue = std::move(ct.mask);
  out.ct_thickness_um = std::move(ct.thickness_um);
  out.ct_fraction = ct.fraction;
  out.ct_area_um2 = ct.area_um2;
  out.ct_mean_thickness_um = ct.mean_thickness_um;
}

FullResult run_full(const ProbabilityMap& prob, const PipelineParams& p, double um_per_px,
                    const std::vector<ExclusionRegion>& exclusions,
                    const std::vector<features::RegionPolygon>& regions) {
  FullResult r;
  SegmentationOutputs& o = r.outputs;
  Mask post = postprocess(prob, p, um_per_px);
  o.muscle_mask = build_muscle_mask(post, p, um_per_px);
  o.postprocessed = imgproc::mask_and(post, o.muscle_mask);
  o.shape_filtered = shape_filter(o.postprocessed, p, um_per_px);
  ConnectiveTissue ct =
      connective_tissue(o.muscle_mask, p.ct_from_shape_filtered ? o.shape_filtered : o.postprocessed, um_per_px);
  o.connective_tissue = std::move(ct.mask);
  o.ct_thickness_um = std::move(ct.thickness_um);
  o.ct_fraction = ct.fraction;
  o.ct_area_um2 = ct.area_um2;
  o.ct_mean_thickness_um = ct.mean_thickness_um;

  r.fiber_labels = imgproc::connected_components(o.shape_filtered, Connectivity::eight).labels;
  r.records = features::measure_objects(r.fiber_labels, um_per_px);
  features::assign_regions(r.records, regions);
  apply_exclusion_regions(o, r.records, r.fiber_labels, exclusions, um_per_px);
  return r;
}

std::optional<double> ct_region_thickness(const SegmentationOutputs& out,
                                          const std::vector<features::RegionPolygon>& regions, Region region,
                                          double um_per_px) {
  bool has_soleus = std::any_of(regions.begin(), regions.end(),
                                [](const features::RegionPolygon& r) { return r.region == Region::soleus; });
  const Region fallback = has_soleus ? Region::gastrocnemius : Region::whole;
  double sum = 0.0;
  std::int64_t n = 0;
  const int w = out.connective_tissue.width();
  for (std::size_t i = 0; i < out.connective_tissue.size(); ++i) {
    if (!out.connective_tissue[i]) continue;
    if (region != Region::whole && tag_point(regions, pixel_center_um(i, w, um_per_px), fallback) != region) continue;
    sum += out.ct_thickness_um[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / double(n);
}

json summary_json(const FullResult& r, const PipelineParams& p, double um_per_px) {
  std::size_t fibers = std::count_if(r.records.begin(), r.records.end(), [](const FiberRecord& f) { return !f.excluded; });
  json j;
  j["fiber_count"] = fibers;
  j["ct_fraction"] = r.outputs.ct_fraction;
  j["ct_area_um2"] = r.outputs.ct_area_um2;
  j["ct_mean_thickness_um"] = r.outputs.ct_mean_thickness_um;
  j["um_per_px"] = um_per_px;
  j["params"] = to_json(p);
  return j;
}

RegionsFile regions_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("regions", "expected a list");
  RegionsFile f;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "regions[" + std::to_string(i) + "]";
    std::string kind;
    geom::Polygon poly;
    ObjectReader r(j[i], path);
    r.field("kind", [&](const json& v, const std::string& k) { kind = read_string(v, k); });
    r.field("polygon", [&](const json& v, const std::string& k) {
      if (!v.is_array()) throw ConfigError(k, "expected a list of [x, y] points");
      for (std::size_t n = 0; n < v.size(); ++n) {
        const std::string pk = k + "[" + std::to_string(n) + "]";
        if (!v[n].is_array() || v[n].size() != 2) throw ConfigError(pk, "expected [x, y]");
        poly.push_back({read_double(v[n][0], pk), read_double(v[n][1], pk)});
      }
    });
    r.finish();
    if (kind.empty()) throw ConfigError(path + ".kind", "missing");
    geom::require_simple(poly, path + ".polygon");
    if (kind == "type1_freezing") {
      f.exclusions.push_back({poly, ExclusionKind::type1_freezing});
    } else if (kind == "type2_loosening") {
      f.exclusions.push_back({poly, ExclusionKind::type2_loosening});
    } else {
      f.regions.push_back({features::region_from_string(kind, path + ".kind"), poly});
    }
  }
  return f;
}

}  // namespace myosynth::pipeline
