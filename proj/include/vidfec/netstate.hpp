#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vidfec {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }

struct NodePosition {
  int id = 0;
  double x = 0.0;
  double y = 0.0;                 // metres
  std::optional<double> snr_db;   // measured link quality, when available
};

namespace detail {

// > 0 when o->a->b turns counter-clockwise (b lies left of o->a).
inline double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline bool lex_less(const Point& a, const Point& b) {
  return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Appends the hull chain strictly between a and b, given the points strictly
// right of a->b. Walking right bulges first yields counter-clockwise order.
inline void quickhull_side(std::vector<Point>& out, const Point& a, const Point& b,
                           const std::vector<Point>& pts) {
  if (pts.empty()) return;
  std::size_t far = 0;
  double far_dist = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = -cross(a, b, pts[i]);
    if (d > far_dist || (d == far_dist && lex_less(pts[i], pts[far]))) {
      far_dist = d;
      far = i;
    }
  }
  const Point c = pts[far];
  std::vector<Point> right_ac, right_cb;
  for (const auto& p : pts) {
    if (cross(a, c, p) < 0.0) right_ac.push_back(p);
    else if (cross(c, b, p) < 0.0) right_cb.push_back(p);
  }
  quickhull_side(out, a, c, right_ac);
  out.push_back(c);
  quickhull_side(out, c, b, right_cb);
}

}  // namespace detail

// Convex hull, counter-clockwise, starting at the lexicographically least
// vertex. Collinear inputs collapse to a two-point "polygon" with zero area;
// interior and edge points are dropped.
inline std::vector<Point> quickhull(const std::vector<Point>& pts) {
  if (pts.empty()) return {};
  Point lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    if (detail::lex_less(p, lo)) lo = p;
    if (detail::lex_less(hi, p)) hi = p;
  }
  if (lo == hi) return {lo};  // all points identical

  std::vector<Point> below, above;
  for (const auto& p : pts) {
    const double side = detail::cross(lo, hi, p);
    if (side < 0.0) below.push_back(p);
    else if (side > 0.0) above.push_back(p);
  }
  std::vector<Point> out;
  out.push_back(lo);
  detail::quickhull_side(out, lo, hi, below);
  out.push_back(hi);
  detail::quickhull_side(out, hi, lo, above);
  return out;
}

// Shoelace area; orientation-independent. Fewer than three vertices cover
// no area.
inline double polygon_area(const std::vector<Point>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) * 0.5;
}

// Reduced-point hull: slice the x-range into strips, keep each strip's
// lowest and highest point plus the global x extremes, and hull that subset.
// The result is never larger than the exact hull, and refining by splitting
// every strip in two only grows it (each kept point stays kept).
inline std::vector<Point> bfp_hull(const std::vector<Point>& pts, int strips) {
  if (strips < 1) throw std::invalid_argument("bfp_hull: strips must be >= 1");
  if (pts.empty()) return {};
  double x_min = pts[0].x, x_max = pts[0].x;
  for (const auto& p : pts) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
  }
  const double range = x_max - x_min;
  std::vector<std::optional<std::size_t>> strip_min(static_cast<std::size_t>(strips));
  std::vector<std::optional<std::size_t>> strip_max(static_cast<std::size_t>(strips));
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (detail::lex_less(pts[i], pts[lo])) lo = i;
    if (detail::lex_less(pts[hi], pts[i])) hi = i;
    std::size_t s = 0;
    if (range > 0.0)
      s = std::min(static_cast<std::size_t>((pts[i].x - x_min) / range * strips),
                   static_cast<std::size_t>(strips - 1));
    auto& mn = strip_min[s];
    auto& mx = strip_max[s];
    if (!mn || pts[i].y < pts[*mn].y) mn = i;
    if (!mx || pts[i].y > pts[*mx].y) mx = i;
  }
  std::vector<Point> subset{pts[lo], pts[hi]};
  for (int s = 0; s < strips; ++s) {
    if (strip_min[static_cast<std::size_t>(s)]) subset.push_back(pts[*strip_min[static_cast<std::size_t>(s)]]);
    if (strip_max[static_cast<std::size_t>(s)]) subset.push_back(pts[*strip_max[static_cast<std::size_t>(s)]]);
  }
  return quickhull(subset);
}

// Nodes per square kilometre over the exact hull of their positions
// (metres). Collinear or single-node layouts cover no area, which callers
// treat as the sparse fallback.
inline std::optional<double> density_per_km2(const std::vector<Point>& positions) {
  const double area_m2 = polygon_area(quickhull(positions));
  if (area_m2 <= 0.0) return std::nullopt;
  return static_cast<double>(positions.size()) / (area_m2 / 1e6);
}

inline std::vector<Point> to_points(const std::vector<NodePosition>& nodes) {
  std::vector<Point> pts;
  pts.reserve(nodes.size());
  for (const auto& n : nodes) pts.push_back({n.x, n.y});
  return pts;
}

// Loss-rate estimate over the most recent `window` packet outcomes.
class WindowedPlr {
 public:
  explicit WindowedPlr(int window) : window_(window) {
    if (window < 1) throw std::invalid_argument("WindowedPlr: window must be >= 1");
  }

  void record(bool lost) {
    outcomes_.push_back(lost);
    if (lost) ++lost_;
    if (static_cast<int>(outcomes_.size()) > window_) {
      if (outcomes_.front()) --lost_;
      outcomes_.pop_front();
    }
  }

  bool empty() const { return outcomes_.empty(); }
  int count() const { return static_cast<int>(outcomes_.size()); }
  int window() const { return window_; }

  // No observations yet reads as a clean channel.
  double plr() const {
    if (outcomes_.empty()) return 0.0;
    return static_cast<double>(lost_) / static_cast<double>(outcomes_.size());
  }

 private:
  int window_;
  int lost_ = 0;
  std::deque<bool> outcomes_;
};

// --- Position files -----------------------------------------------------------
//
// CSV with header `node_id,x,y` or `node_id,x,y,snr_db`. The SNR column is
// all-or-nothing: mixed availability has no serialization.

inline void save_positions_csv(const std::string& path, const std::vector<NodePosition>& nodes) {
  bool all_snr = !nodes.empty();
  bool any_snr = false;
  for (const auto& n : nodes) {
    all_snr = all_snr && n.snr_db.has_value();
    any_snr = any_snr || n.snr_db.has_value();
  }
  if (any_snr && !all_snr)
    throw std::invalid_argument("save_positions_csv: SNR set on some nodes but not all");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_positions_csv: cannot open " + path);
  out << (all_snr ? "node_id,x,y,snr_db\n" : "node_id,x,y\n");
  char buf[96];
  for (const auto& n : nodes) {
    if (all_snr)
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g", n.id, n.x, n.y, *n.snr_db);
    else
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g", n.id, n.x, n.y);
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("save_positions_csv: write failed for " + path);
}

inline std::vector<NodePosition> load_positions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_positions_csv: cannot open " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  bool with_snr;
  if (header == "node_id,x,y")
    with_snr = false;
  else if (header == "node_id,x,y,snr_db")
    with_snr = true;
  else
    throw std::runtime_error(path + ": unrecognized header '" + header + "'");

  std::vector<NodePosition> nodes;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != (with_snr ? 4u : 3u))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": wrong field count");
    try {
      NodePosition n;
      std::size_t used = 0;
      n.id = std::stoi(fields[0], &used);
      if (used != fields[0].size()) throw std::invalid_argument("id");
      n.x = std::stod(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("x");
      n.y = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("y");
      if (with_snr) {
        n.snr_db = std::stod(fields[3], &used);
        if (used != fields[3].size()) throw std::invalid_argument("snr");
      }
      nodes.push_back(n);
    } catch (const std::logic_error&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed field");
    }
  }
  return nodes;
}

}  // namespace vidfec
