#include "myosynth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "myosynth/errors.hpp"
#include "myosynth/format.hpp"
#include "myosynth/json_util.hpp"

namespace myosynth::analysis {

using nlohmann::json;
using namespace myosynth::jsonio;

namespace {

const ReferenceStats* find_ref(const std::vector<ReferenceStats>& refs, Region r) {
  for (const auto& ref : refs)
    if (ref.region == r) return &ref;
  return nullptr;
}

bool included(const FiberRecord& r, Region region) {
  return !r.excluded && (region == Region::whole || r.region == region);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

}  // namespace

std::vector<ReferenceStats> refs_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("refs", "expected a list");
  std::vector<ReferenceStats> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "refs[" + std::to_string(i) + "]";
    ReferenceStats r;
    bool has_region = false, has_mu = false, has_sigma = false;
    ObjectReader o(j[i], path);
    o.field("region", [&](const json& v, const std::string& k) {
      r.region = features::region_from_string(read_string(v, k), k);
      has_region = true;
    });
    o.field("mu_um", [&](const json& v, const std::string& k) {
      r.mu_um = read_double(v, k);
      has_mu = true;
    });
    o.field("sigma_um", [&](const json& v, const std::string& k) {
      r.sigma_um = read_double(v, k);
      has_sigma = true;
    });
    o.field("source", [&](const json& v, const std::string& k) { r.source = read_string(v, k); });
    o.finish();
    if (!has_region) throw ConfigError(path + ".region", "missing");
    if (!has_mu) throw ConfigError(path + ".mu_um", "missing");
    if (!has_sigma) throw ConfigError(path + ".sigma_um", "missing");
    if (r.sigma_um < 0.0) throw ConfigError(path + ".sigma_um", "must be >= 0");
    if (find_ref(out, r.region)) throw ConfigError(path + ".region", "duplicate reference");
    out.push_back(r);
  }
  return out;
}

Abnormality classify(double d, const ReferenceStats& ref) {
  double dev = d - ref.mu_um;
  if (!(std::abs(dev) > 2.0 * ref.sigma_um)) return Abnormality::normal;
  return dev < 0 ? Abnormality::small : Abnormality::large;
}

std::vector<Abnormality> classify_abnormal(const std::vector<FiberRecord>& records,
                                           const std::vector<ReferenceStats>& refs) {
  std::vector<Abnormality> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const ReferenceStats* ref = find_ref(refs, r.region);
    if (!ref) throw ConfigError("refs", "no reference for region '" + features::to_string(r.region) + "'");
    out.push_back(classify(r.diameter_um(), *ref));
  }
  return out;
}

SectionStats section_stats(const std::string& section_id, const std::vector<FiberRecord>& records,
                           std::optional<double> ct_mean_thickness_um, Region region,
                           const std::vector<ReferenceStats>* refs) {
  SectionStats s;
  s.section_id = section_id;
  s.region = region;
  s.ct_mean_thickness_um = ct_mean_thickness_um;
  std::vector<FiberRecord> sel;
  for (const auto& r : records)
    if (included(r, region)) sel.push_back(r);
  s.fiber_count = sel.size();
  if (!sel.empty()) {
    double sum = 0.0, area = 0.0;
    for (const auto& r : sel) {
      sum += r.diameter_um();
      area += r.area_um2;
    }
    const double n = double(sel.size());
    const double mean = sum / n;
    double var = 0.0;
    for (const auto& r : sel) var += (r.diameter_um() - mean) * (r.diameter_um() - mean);
    s.mean_diameter_um = mean;
    s.std_diameter_um = std::sqrt(var / n);
    s.mean_area_um2 = area / n;
  }
  if (refs) {
    for (auto a : classify_abnormal(sel, *refs)) {
      if (a == Abnormality::small) ++s.abnormal_small_count;
      if (a == Abnormality::large) ++s.abnormal_large_count;
    }
  }
  return s;
}

KdeCurve kde(const std::vector<double>& values, std::optional<double> bandwidth) {
  if (values.size() < 2) throw std::invalid_argument("kde needs at least 2 values");
  const double n = double(values.size());
  double h;
  if (bandwidth) {
    if (!(*bandwidth > 0.0)) throw std::invalid_argument("kde bandwidth must be > 0");
    h = *bandwidth;
  } else {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / (n - 1.0));
    h = 1.06 * sd * std::pow(n, -0.2);
    if (!(h > 0.0)) h = 1.0;
  }
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 3.0 * h, hi = *hi_it + 3.0 * h;
  constexpr int kPoints = 256;
  KdeCurve c;
  c.bandwidth = h;
  const double norm = 1.0 / (n * h * std::sqrt(2.0 * 3.141592653589793));
  for (int k = 0; k < kPoints; ++k) {
    double x = lo + (hi - lo) * k / (kPoints - 1);
    double acc = 0.0;
    for (double v : values) {
      double z = (x - v) / h;
      acc += std::exp(-0.5 * z * z);
    }
    c.x.push_back(x);
    c.density.push_back(acc * norm);
  }
  double area = trapezoid(c);
  if (area > 0.0)
    for (double& d : c.density) d /= area;
  return c;
}

KdeCurve kde_diameters(const std::vector<FiberRecord>& records, std::optional<double> bandwidth) {
  std::vector<double> d;
  for (const auto& r : records)
    if (!r.excluded) d.push_back(r.diameter_um());
  return kde(d, bandwidth);
}

double trapezoid(const KdeCurve& c) {
  double s = 0.0;
  for (std::size_t i = 1; i < c.x.size(); ++i) s += 0.5 * (c.density[i] + c.density[i - 1]) * (c.x[i] - c.x[i - 1]);
  return s;
}

std::string scatter_csv(std::vector<SectionStats> stats) {
  std::stable_sort(stats.begin(), stats.end(), [](const SectionStats& a, const SectionStats& b) {
    return a.section_id != b.section_id ? a.section_id < b.section_id : a.region < b.region;
  });
  std::ostringstream out;
  out << "section_id,region,fiber_count,mean_diameter_um,std_diameter_um,ct_mean_thickness_um\n";
  for (const auto& s : stats)
    out << s.section_id << ',' << features::to_string(s.region) << ',' << s.fiber_count << ','
        << opt_csv(s.mean_diameter_um) << ',' << opt_csv(s.std_diameter_um) << ',' << opt_csv(s.ct_mean_thickness_um)
        << '\n';
  return out.str();
}

std::string kde_csv(const KdeCurve& c) {
  std::ostringstream out;
  out << "x,density\n";
  for (std::size_t i = 0; i < c.x.size(); ++i) out << fmt_double(c.x[i]) << ',' << fmt_double(c.density[i]) << '\n';
  return out.str();
}

json stats_json(const SectionStats& s) {
  return {{"section_id", s.section_id},
          {"region", features::to_string(s.region)},
          {"fiber_count", s.fiber_count},
          {"mean_diameter_um", opt(s.mean_diameter_um)},
          {"std_diameter_um", opt(s.std_diameter_um)},
          {"mean_area_um2", opt(s.mean_area_um2)},
          {"ct_mean_thickness_um", opt(s.ct_mean_thickness_um)},
          {"abnormal_small_count", s.abnormal_small_count},
          {"abnormal_large_count", s.abnormal_large_count}};
}

json report_json(const std::vector<SectionStats>& stats, const std::vector<ReferenceStats>& refs) {
  json sections = json::array();
  for (const auto& s : stats) sections.push_back(stats_json(s));
  json r = json::array();
  for (const auto& ref : refs)
    r.push_back({{"region", features::to_string(ref.region)},
                 {"mu_um", ref.mu_um},
                 {"sigma_um", ref.sigma_um},
                 {"source", ref.source}});
  return {{"sections", sections}, {"references", r}};
}

}  // namespace myosynth::analysis
