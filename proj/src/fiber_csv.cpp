#include <charconv>
#include <ostream>
#include <sstream>

#include "myosynth/errors.hpp"
#include "myosynth/features.hpp"
#include "myosynth/format.hpp"

namespace myosynth::features {

namespace {

constexpr const char* kHeader =
    "id,area_um2,perimeter_um,circularity,feret_min_um,feret_max_um,equiv_diameter_um,centroid_x_um,centroid_y_um,"
    "region,excluded";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') {
      out.emplace_back();
    } else {
      out.back().push_back(c);
    }
  }
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IoError("fiber CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

void write_fiber_csv(std::ostream& out, const std::vector<FiberRecord>& records) {
  out << kHeader << '\n';
  for (const auto& r : records) {
    out << r.id << ',' << fmt_double(r.area_um2) << ',' << fmt_double(r.perimeter_um) << ','
        << fmt_double(r.circularity) << ',' << fmt_double(r.feret_min_um) << ',' << fmt_double(r.feret_max_um) << ','
        << fmt_double(r.equiv_diameter_um) << ',' << fmt_double(r.centroid_x_um) << ','
        << fmt_double(r.centroid_y_um) << ',' << to_string(r.region) << ',' << (r.excluded ? "true" : "false")
        << '\n';
  }
}

std::string fiber_csv(const std::vector<FiberRecord>& records) {
  std::ostringstream ss;
  write_fiber_csv(ss, records);
  return ss.str();
}

std::vector<FiberRecord> parse_fiber_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw IoError("fiber CSV: unexpected header");
  std::vector<FiberRecord> out;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto f = split(line);
    if (f.size() != 11) throw IoError("fiber CSV line " + std::to_string(n) + ": expected 11 fields");
    FiberRecord r;
    r.id = static_cast<std::uint32_t>(parse_double(f[0], n));
    r.area_um2 = parse_double(f[1], n);
    r.perimeter_um = parse_double(f[2], n);
    r.circularity = parse_double(f[3], n);
    r.feret_min_um = parse_double(f[4], n);
    r.feret_max_um = parse_double(f[5], n);
    r.equiv_diameter_um = parse_double(f[6], n);
    r.centroid_x_um = parse_double(f[7], n);
    r.centroid_y_um = parse_double(f[8], n);
    r.region = region_from_string(f[9], "fiber CSV line " + std::to_string(n));
    if (f[10] != "true" && f[10] != "false")
      throw IoError("fiber CSV line " + std::to_string(n) + ": excluded must be true or false");
    r.excluded = f[10] == "true";
    out.push_back(r);
  }
  return out;
}

}  // namespace myosynth::features
