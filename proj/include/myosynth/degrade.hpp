#pragma once

#include <cstdint>

#include "myosynth/image.hpp"
#include "myosynth/labels.hpp"
#include "myosynth/render.hpp"

namespace myosynth::synth {

/// Turns ground truth into a plausible model output for pipeline testing.
struct DegradeParams {
  double blur_sigma = 0.0;       // px; 0 disables
  double noise_amplitude = 0.0;  // added value noise in [-a, a]
  double noise_frequency = 0.1;  // 1/px
  double drop_prob = 0.0;        // per instance
  std::uint64_t seed = 0;
};

void validate(const DegradeParams& d);

/// Fiber-class indicator (class 1), minus dropped instances, blurred with a
/// normalized sampled Gaussian (radius ceil(3 sigma), zero outside the
/// image), plus value noise, clamped to [0, 1].
ProbabilityMap degrade_to_probability(const LabelImage& instances, const ClassImage& classes, const DegradeParams& d);
ProbabilityMap degrade_to_probability(const RenderedSample& sample, const DegradeParams& d);

/// Separable Gaussian used above, exposed for reuse and testing.
DoubleImage gaussian_blur(const DoubleImage& img, double sigma);

}  // namespace myosynth::synth
