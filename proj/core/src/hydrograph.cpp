#include "floodmra/hydrograph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "floodmra/errors.hpp"

namespace floodmra {

Hydrograph read_hydrograph_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open hydrograph file: " + path);
  Hydrograph h;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty hydrograph file");
  // Header row is required but its exact spelling is not checked.
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t, q;
    if (!(ls >> t >> q))
      throw ParseError(path + ": malformed row at line " + std::to_string(line_no));
    if (!h.samples.empty() && t <= h.samples.back().t)
      throw ParseError(path + ": times must be strictly increasing (line " +
                       std::to_string(line_no) + ")");
    if (q < 0.0)
      throw ParseError(path + ": negative discharge at line " + std::to_string(line_no));
    h.samples.push_back({t, q});
  }
  if (h.samples.empty()) throw ParseError(path + ": hydrograph has no samples");
  return h;
}

double hydrograph_at(const Hydrograph& h, double t) {
  if (h.samples.empty()) throw ConfigError("hydrograph_at: empty hydrograph");
  const auto& s = h.samples;
  if (t <= s.front().t) return s.front().q;
  if (t >= s.back().t) return s.back().q;
  auto hi = std::upper_bound(s.begin(), s.end(), t,
                             [](double tv, const Hydrograph::Sample& a) { return tv < a.t; });
  auto lo = hi - 1;
  if (t == lo->t) return lo->q;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return lo->q + w * (hi->q - lo->q);
}

}  // namespace floodmra
