#include "myosynth/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "myosynth/errors.hpp"
#include "myosynth/noise.hpp"
#include "myosynth/random.hpp"

namespace myosynth::synth {

void validate(const DegradeParams& d) {
  if (!(d.blur_sigma >= 0.0) || !std::isfinite(d.blur_sigma)) throw ConfigError("blur_sigma", "must be >= 0");
  if (!(d.noise_amplitude >= 0.0 && d.noise_amplitude <= 1.0)) throw ConfigError("noise_amplitude", "outside [0, 1]");
  if (!(d.noise_frequency >= 0.0) || !std::isfinite(d.noise_frequency))
    throw ConfigError("noise_frequency", "must be >= 0");
  if (!(d.drop_prob >= 0.0 && d.drop_prob <= 1.0)) throw ConfigError("drop_prob", "outside [0, 1]");
}

DoubleImage gaussian_blur(const DoubleImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
  for (auto& v : k) v /= sum;
  const int w = img.width(), h = img.height();
  DoubleImage tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = std::max(-r, -x); i <= std::min(r, w - 1 - x); ++i) acc += k[i + r] * img(x + i, y);
      tmp(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = std::max(-r, -y); i <= std::min(r, h - 1 - y); ++i) acc += k[i + r] * tmp(x, y + i);
      out(x, y) = acc;
    }
  return out;
}

ProbabilityMap degrade_to_probability(const LabelImage& instances, const ClassImage& classes, const DegradeParams& d) {
  validate(d);
  require_same_shape(instances, classes, "degrade_to_probability");
  std::uint32_t max_id = 0;
  for (auto v : instances.pixels()) max_id = std::max(max_id, v);
  std::vector<bool> dropped(std::size_t(max_id) + 1, false);
  const std::uint64_t drop_seed = hash_combine(d.seed, 2);
  if (d.drop_prob > 0.0)
    for (std::uint32_t id = 1; id <= max_id; ++id) dropped[id] = to_unit(hash_combine(drop_seed, id)) < d.drop_prob;

  DoubleImage indicator(instances.width(), instances.height());
  for (std::size_t i = 0; i < indicator.size(); ++i)
    indicator[i] = (classes[i] == 1 && !dropped[instances[i]]) ? 1.0 : 0.0;
  DoubleImage blurred = gaussian_blur(indicator, d.blur_sigma);

  const std::uint64_t noise_seed = hash_combine(d.seed, 1);
  ProbabilityMap out(instances.width(), instances.height());
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) {
      double v = blurred(x, y);
      if (d.noise_amplitude > 0.0)
        v += d.noise_amplitude * noise::value_noise(noise_seed, d.noise_frequency, 1, {x + 0.5, y + 0.5});
      out(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  return out;
}

ProbabilityMap degrade_to_probability(const RenderedSample& sample, const DegradeParams& d) {
  return degrade_to_probability(sample.instances, sample.classes, d);
}

}  // namespace myosynth::synth
