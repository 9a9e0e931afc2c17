#pragma once

#include <cstdint>
#include <vector>

namespace myosynth::noise {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Jittered lattice of feature points for cellular (Worley) noise. Cell (i, j)
/// spans [i, i+1) x [j, j+1) in units of `cell_size`; its feature point is a
/// pure function of (seed, i, j) and sits within jitter * cell_size / 2 of the
/// cell center on each axis.
struct FeatureGrid {
  double cell_size = 1.0;
  std::uint64_t seed = 0;
  double jitter = 1.0;
};

struct WorleySample {
  double f1 = 0.0;
  double f2 = 0.0;
  std::uint32_t cell_id = 0;
  Vec2 nearest_point;
};

Vec2 feature_point(const FeatureGrid& grid, std::int64_t i, std::int64_t j);
std::uint32_t feature_cell_id(const FeatureGrid& grid, std::int64_t i, std::int64_t j);

/// Exact F1/F2 over the 5x5 cell neighborhood of `p`. Ties resolve to the
/// cell scanned first (row-major, j then i).
WorleySample worley_eval(const FeatureGrid& grid, Vec2 p);

/// Feature points of a cell rectangle computed once. eval() returns exactly
/// what worley_eval returns, falling back to it outside the table.
class FeatureTable {
 public:
  FeatureTable(const FeatureGrid& grid, Vec2 lo, Vec2 hi);
  WorleySample eval(Vec2 p) const;

 private:
  FeatureGrid grid_;
  std::int64_t i0_ = 0, j0_ = 0, ni_ = 0, nj_ = 0;
  std::vector<Vec2> points_;
  std::vector<std::uint32_t> ids_;
};

/// Lattice value in [-1, 1] for integer coordinate (i, j).
double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j);

/// Octave-summed smoothstep value noise, normalized to [-1, 1]. Octave o uses
/// frequency * 2^o, gain 0.5^o and its own derived seed.
double value_noise(std::uint64_t seed, double frequency, int octaves, Vec2 p);

/// Sum of per-octave gains, 2 - 2^(1 - octaves).
double octave_gain_sum(int octaves);

struct WarpField {
  double frequency = 0.0;
  double amplitude = 0.0;
  int octaves = 1;
  std::uint64_t seed = 0;
};

Vec2 warp_displacement(const WarpField& w, Vec2 p);

/// p + displacement; |displacement| <= amplitude * octave_gain_sum(octaves).
Vec2 warp_point(const WarpField& w, Vec2 p);

}  // namespace myosynth::noise
