#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "myosynth/features.hpp"

namespace myosynth::analysis {

using features::FiberRecord;
using features::Region;

/// Healthy-population diameter reference for one region.
struct ReferenceStats {
  Region region = Region::whole;
  double mu_um = 0.0;
  double sigma_um = 0.0;
  std::string source;
};

/// refs.json: [{"region": ..., "mu_um": ..., "sigma_um": ..., "source": ...}].
std::vector<ReferenceStats> refs_from_json(const nlohmann::json& j);

enum class Abnormality { normal, small, large };

/// Abnormal iff |d - mu| > 2 sigma (strict); the sign picks small or large.
Abnormality classify(double diameter_um, const ReferenceStats& ref);

/// One flag per record, each compared against its own region's reference.
/// Throws ConfigError when a record's region has no reference.
std::vector<Abnormality> classify_abnormal(const std::vector<FiberRecord>& records,
                                           const std::vector<ReferenceStats>& refs);

struct SectionStats {
  std::string section_id;
  Region region = Region::whole;
  std::size_t fiber_count = 0;
  std::optional<double> mean_diameter_um;  // unset without fibers
  std::optional<double> std_diameter_um;   // population (divide by n)
  std::optional<double> mean_area_um2;
  std::optional<double> ct_mean_thickness_um;
  std::size_t abnormal_small_count = 0;
  std::size_t abnormal_large_count = 0;
};

/// Aggregates non-excluded records of `region` (all of them for whole).
/// Abnormal counts are filled when `refs` is given.
SectionStats section_stats(const std::string& section_id, const std::vector<FiberRecord>& records,
                           std::optional<double> ct_mean_thickness_um, Region region,
                           const std::vector<ReferenceStats>* refs = nullptr);

struct KdeCurve {
  double bandwidth = 0.0;
  std::vector<double> x;
  std::vector<double> density;
};

/// Gaussian KDE on 256 points over [min - 3h, max + 3h], rescaled so its
/// trapezoid integral is 1. Default h is Silverman's 1.06 s n^(-1/5) with the
/// sample standard deviation s, or 1 um when the sample has no spread.
/// Throws std::invalid_argument for fewer than 2 values.
KdeCurve kde(const std::vector<double>& values, std::optional<double> bandwidth = std::nullopt);
KdeCurve kde_diameters(const std::vector<FiberRecord>& records, std::optional<double> bandwidth = std::nullopt);

double trapezoid(const KdeCurve& c);

/// Rows sorted by (section_id, region).
std::string scatter_csv(std::vector<SectionStats> stats);
std::string kde_csv(const KdeCurve& c);
nlohmann::json stats_json(const SectionStats& s);
nlohmann::json report_json(const std::vector<SectionStats>& stats, const std::vector<ReferenceStats>& refs);

}  // namespace myosynth::analysis
