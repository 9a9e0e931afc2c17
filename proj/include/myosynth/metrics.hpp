#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "myosynth/image.hpp"

namespace myosynth::metrics {

struct PixelMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Confusion-matrix scores for the foreground class; 0/0 evaluates to 0.
PixelMetrics pixel_metrics(const Mask& gt, const Mask& pred);

struct Match {
  std::uint32_t gt_id = 0;
  std::uint32_t pred_id = 0;
  double iou = 0.0;
};

struct InstanceMatchResult {
  double iou_threshold = 0.0;
  std::vector<Match> matches;  // ordered by gt_id
  std::int64_t tp = 0, fp = 0, fn = 0;
  double ap = 0.0;  // tp / (tp + fp + fn); 1 when both sides are empty
};

/// Overlap of every intersecting (gt, pred) pair, from one pass over the
/// pixels. Ids are the label values present in each image.
struct OverlapTable {
  std::vector<std::uint32_t> gt_ids, pred_ids;  // sorted
  std::vector<Match> pairs;                     // iou > 0
};
OverlapTable overlaps(const LabelImage& gt, const LabelImage& pred);

/// One-to-one assignment among pairs with iou >= threshold maximizing the
/// number of matches, then total IoU.
InstanceMatchResult match_instances(const LabelImage& gt, const LabelImage& pred, double iou_threshold);
InstanceMatchResult match_from_table(const OverlapTable& table, double iou_threshold);

/// The 11 thresholds 0.50, 0.55, ..., 1.00.
std::vector<double> iou_thresholds();

struct ApSweep {
  std::vector<InstanceMatchResult> per_threshold;
  double mean_ap = 0.0;
};
ApSweep ap_sweep(const LabelImage& gt, const LabelImage& pred);

nlohmann::json metrics_json(const PixelMetrics& pixel, const ApSweep& sweep);

}  // namespace myosynth::metrics
