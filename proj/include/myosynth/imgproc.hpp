#pragma once

#include <cstdint>
#include <vector>

#include "myosynth/image.hpp"

/// Binary and label raster kernels. Out-of-image pixels count as background,
/// except for erosion, which pads with foreground so that closing stays
/// extensive on objects touching the image border.
namespace myosynth::imgproc {

enum class Connectivity { four = 4, eight = 8 };

/// True where round(255 * p) >= level.
Mask threshold_map(const ProbabilityMap& prob, int level);

struct Components {
  LabelImage labels;
  std::uint32_t count = 0;
};

/// Labels 1..count numbered in raster order of each component's first pixel.
Components connected_components(const Mask& mask, Connectivity conn = Connectivity::eight);

/// Relabel so ids become 1..n in raster order of first appearance; returns n.
std::uint32_t compact_labels(LabelImage& labels);

Mask dilate(const Mask& mask, int iterations);
Mask erode(const Mask& mask, int iterations);
Mask invert(const Mask& mask);
Mask fill_holes(const Mask& mask);

/// Removes foreground components with area <= max_area.
Mask area_opening(const Mask& mask, std::int64_t max_area, Connectivity conn = Connectivity::eight);

/// Squared Euclidean distance from every pixel to the nearest pixel where
/// `features` is nonzero. No virtual border; +inf when there are no features.
DoubleImage squared_distance_to(const Mask& features);

/// Exact Euclidean distance (px) from each foreground pixel to the nearest
/// background pixel, the one-pixel frame outside the image included.
DoubleImage distance_transform(const Mask& mask);

/// Squared form of distance_transform; integer-valued.
DoubleImage squared_distance_transform(const Mask& mask);

/// Distance-transform watershed. Seeds are the regional maxima of the
/// h-maxima transform of the distance field; flooding is 8-connected in
/// descending distance order and pixels reached by two basins become cut
/// lines (label 0).
LabelImage watershed_split(const Mask& mask, double h = 1.0);

/// Per-pixel diameter (in um) of the largest inscribed disc containing the
/// pixel. A disc centered at c has radius D(c), the distance transform value,
/// and covers pixels strictly closer than D(c).
DoubleImage local_thickness(const Mask& mask, double um_per_px);

/// Mean of `values` over pixels where `mask` is set; 0 for an empty mask.
double masked_mean(const DoubleImage& values, const Mask& mask);

std::int64_t count(const Mask& mask);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_and_not(const Mask& a, const Mask& b);
bool is_subset(const Mask& a, const Mask& b);
Mask foreground(const LabelImage& labels);

/// Removes (sets to 0) every label whose `keep` entry is false. `keep` is
/// indexed by label id.
Mask select_labels(const LabelImage& labels, const std::vector<bool>& keep);

}  // namespace myosynth::imgproc
