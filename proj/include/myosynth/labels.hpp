#pragma once

#include <cstdint>

#include "myosynth/image.hpp"

namespace myosynth::synth {

enum class PixelClass : std::uint8_t { background = 0, fiber = 1, boundary = 2 };

using ClassImage = Image<std::uint8_t>;

/// 2 where a fiber pixel has a pixel with a different id (0 included) within
/// `boundary_halfwidth` in Chebyshev distance, 1 for remaining fiber pixels,
/// 0 on background. Out-of-image pixels are ignored.
ClassImage extract_class_map(const LabelImage& instances, int boundary_halfwidth);

/// U-Net border-weighting parameters.
struct WeightParams {
  double w0 = 400.0;
  double sigma = 5.0;
  double fiber_body_weight = 50.0;
  double background_weight = 10.0;
};

void validate(const WeightParams& wp);

/// w = w_class + w0 * exp(-(d1 + d2)^2 / (2 sigma^2)), border term applied on
/// background only. Pass d2 = +inf when there is no second instance.
double pixel_weight(bool is_fiber, double d1, double d2, const WeightParams& wp);

/// Distance (px) beyond which d1 + d2 makes the border term smaller than 1e-9.
double border_cutoff(const WeightParams& wp);

/// Weight map with d1, d2 = Euclidean center distances to the nearest and
/// second-nearest distinct instances. Distances past `border_cutoff` are
/// treated as infinite.
FloatImage compute_weight_map(const LabelImage& instances, const WeightParams& wp);

}  // namespace myosynth::synth
