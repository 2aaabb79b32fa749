#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "infotrack/errors.hpp"

namespace infotrack {

using Vec2 = Eigen::Vector2d;

/// Axis-aligned rectangle in meters.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }

  bool contains(const Vec2& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }

  bool contains_strict(const Vec2& p) const {
    return p.x() > xmin && p.x() < xmax && p.y() > ymin && p.y() < ymax;
  }

  bool overlaps(const Rect& o) const {
    return xmin < o.xmax && o.xmin < xmax && ymin < o.ymax && o.ymin < ymax;
  }

  /// Clamps a point into the rectangle.
  Vec2 clamp(const Vec2& p) const {
    return {std::clamp(p.x(), xmin, xmax), std::clamp(p.y(), ymin, ymax)};
  }

  /// Nearest point on the rectangle boundary to p (p may be inside or outside).
  Vec2 closest_boundary_point(const Vec2& p) const {
    if (!contains_strict(p)) {
      return clamp(p);
    }
    // Inside: project to the nearest face.
    const double dl = p.x() - xmin, dr = xmax - p.x();
    const double db = p.y() - ymin, dt = ymax - p.y();
    const double m = std::min({dl, dr, db, dt});
    if (m == dl) return {xmin, p.y()};
    if (m == dr) return {xmax, p.y()};
    if (m == db) return {p.x(), ymin};
    return {p.x(), ymax};
  }
};

/// One axis-aligned face, stored as a segment.
struct Segment {
  Vec2 a;
  Vec2 b;
};

/// Parameter and face orientation of a segment/face crossing.
/// axis = 0 for a face with an x-normal (vertical face), 1 for a y-normal.
struct FaceCrossing {
  double t = 0.0;
  int axis = 0;
};

namespace detail {

/// Liang-Barsky clip of segment p0->p1 against a rectangle. Returns the
/// parameter interval [t0, t1] of the portion inside, or nullopt.
inline std::optional<std::pair<double, double>> clip_segment(const Vec2& p0, const Vec2& p1,
                                                             const Rect& r) {
  const double dx = p1.x() - p0.x();
  const double dy = p1.y() - p0.y();
  double t0 = 0.0, t1 = 1.0;
  const double p[4] = {-dx, dx, -dy, dy};
  const double q[4] = {p0.x() - r.xmin, r.xmax - p0.x(), p0.y() - r.ymin, r.ymax - p0.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
    } else {
      const double t = q[i] / p[i];
      if (p[i] < 0.0) {
        if (t > t1) return std::nullopt;
        if (t > t0) t0 = t;
      } else {
        if (t < t0) return std::nullopt;
        if (t < t1) t1 = t;
      }
    }
  }
  return std::make_pair(t0, t1);
}

}  // namespace detail

/// True when the open segment p0->p1 passes through the interior of r.
inline bool segment_intersects_rect(const Vec2& p0, const Vec2& p1, const Rect& r) {
  const auto clipped = detail::clip_segment(p0, p1, r);
  return clipped && clipped->second - clipped->first > 1e-12;
}

/// Rectangular world with axis-aligned rectangular obstacles.
struct WorldMap {
  Rect bounds;
  std::vector<Rect> obstacles;

  bool in_bounds(const Vec2& p) const { return bounds.contains(p); }

  bool in_obstacle(const Vec2& p) const {
    for (const auto& o : obstacles) {
      if (o.contains(p)) return true;
    }
    return false;
  }

  bool in_free_space(const Vec2& p) const { return in_bounds(p) && !in_obstacle(p); }

  /// Line-of-sight test: true when no obstacle blocks the segment p0->p1.
  /// The outer wall never occludes points inside the map.
  bool line_of_sight(const Vec2& p0, const Vec2& p1) const {
    for (const auto& o : obstacles) {
      if (segment_intersects_rect(p0, p1, o)) return false;
    }
    return true;
  }

  /// First wall or obstacle face crossed by the segment p0->p1, assuming p0
  /// is in free space. Returns nullopt when the whole segment stays free.
  std::optional<FaceCrossing> first_face_crossing(const Vec2& p0, const Vec2& p1) const {
    const double dx = p1.x() - p0.x();
    const double dy = p1.y() - p0.y();
    std::optional<FaceCrossing> best;
    auto consider = [&best](double t, int axis) {
      if (t >= 0.0 && t <= 1.0 && (!best || t < best->t)) best = FaceCrossing{t, axis};
    };
    // Outer walls, crossed from the inside out.
    if (dx > 0.0 && p1.x() > bounds.xmax) consider((bounds.xmax - p0.x()) / dx, 0);
    if (dx < 0.0 && p1.x() < bounds.xmin) consider((bounds.xmin - p0.x()) / dx, 0);
    if (dy > 0.0 && p1.y() > bounds.ymax) consider((bounds.ymax - p0.y()) / dy, 1);
    if (dy < 0.0 && p1.y() < bounds.ymin) consider((bounds.ymin - p0.y()) / dy, 1);
    // Obstacle faces, entered from the outside. The slab with the larger
    // entry parameter is the face actually crossed.
    for (const auto& o : obstacles) {
      const auto clipped = detail::clip_segment(p0, p1, o);
      if (!clipped || clipped->second - clipped->first <= 1e-12) continue;
      const double t_enter = clipped->first;
      if (t_enter <= 0.0) continue;  // started inside; handled by caller clamping
      double tx = -1.0;
      if (dx > 0.0) tx = (o.xmin - p0.x()) / dx;
      else if (dx < 0.0) tx = (o.xmax - p0.x()) / dx;
      double ty = -1.0;
      if (dy > 0.0) ty = (o.ymin - p0.y()) / dy;
      else if (dy < 0.0) ty = (o.ymax - p0.y()) / dy;
      consider(t_enter, tx >= ty ? 0 : 1);
    }
    return best;
  }

  /// All wall and obstacle faces as segments (outer boundary + each obstacle).
  std::vector<Segment> all_faces() const {
    std::vector<Segment> faces;
    auto add_rect = [&faces](const Rect& r) {
      faces.push_back({{r.xmin, r.ymin}, {r.xmax, r.ymin}});
      faces.push_back({{r.xmax, r.ymin}, {r.xmax, r.ymax}});
      faces.push_back({{r.xmax, r.ymax}, {r.xmin, r.ymax}});
      faces.push_back({{r.xmin, r.ymax}, {r.xmin, r.ymin}});
    };
    add_rect(bounds);
    for (const auto& o : obstacles) add_rect(o);
    return faces;
  }

  /// Moves a point into free space: clamp to bounds, then push out of any
  /// containing obstacle to just outside its nearest face.
  Vec2 project_to_free(const Vec2& p) const {
    Vec2 q = bounds.clamp(p);
    for (const auto& o : obstacles) {
      if (o.contains(q)) {
        const Vec2 s = o.closest_boundary_point(q);
        Vec2 outward = q - s;
        if (outward.squaredNorm() < 1e-18) {
          outward = (q - Vec2{(o.xmin + o.xmax) / 2, (o.ymin + o.ymax) / 2});
          if (outward.squaredNorm() < 1e-18) outward = {1.0, 0.0};
        }
        q = s + 1e-6 * outward.normalized();
        q = bounds.clamp(q);
      }
    }
    return q;
  }

  void validate() const {
    if (bounds.width() <= 0.0 || bounds.height() <= 0.0) {
      throw ConfigError("map bounds must have positive extent");
    }
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const auto& o = obstacles[i];
      if (o.width() <= 0.0 || o.height() <= 0.0) {
        throw ConfigError("obstacle must have positive extent");
      }
      if (o.xmin <= bounds.xmin || o.xmax >= bounds.xmax || o.ymin <= bounds.ymin ||
          o.ymax >= bounds.ymax) {
        throw ConfigError("obstacle must lie strictly inside map bounds");
      }
      for (std::size_t j = i + 1; j < obstacles.size(); ++j) {
        if (o.overlaps(obstacles[j])) throw ConfigError("obstacles must be pairwise disjoint");
      }
    }
  }

  /// Built-in layouts. "obstacle-30" is a 30x30 m map with four 4x4 m blocks
  /// centered at (9,9), (21,9), (9,21), (21,21).
  static WorldMap named(const std::string& name) {
    if (name == "empty-100") return WorldMap{{0.0, 0.0, 100.0, 100.0}, {}};
    if (name == "empty-50") return WorldMap{{0.0, 0.0, 50.0, 50.0}, {}};
    if (name == "empty-27") return WorldMap{{0.0, 0.0, 27.0, 27.0}, {}};
    if (name == "obstacle-30") {
      WorldMap m{{0.0, 0.0, 30.0, 30.0},
                 {{7.0, 7.0, 11.0, 11.0},
                  {19.0, 7.0, 23.0, 11.0},
                  {7.0, 19.0, 11.0, 23.0},
                  {19.0, 19.0, 23.0, 23.0}}};
      m.validate();
      return m;
    }
    throw ConfigError("unknown map name: " + name);
  }

  static WorldMap from_json(const nlohmann::json& j) {
    WorldMap m;
    const auto& b = j.at("bounds");
    if (!b.is_array() || b.size() != 4) throw ConfigError("map bounds must be [xmin,ymin,xmax,ymax]");
    m.bounds = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    if (j.contains("obstacles")) {
      for (const auto& ob : j.at("obstacles")) {
        if (!ob.is_array() || ob.size() != 4) throw ConfigError("obstacle must be [xmin,ymin,xmax,ymax]");
        m.obstacles.push_back(
            {ob[0].get<double>(), ob[1].get<double>(), ob[2].get<double>(), ob[3].get<double>()});
      }
    }
    m.validate();
    return m;
  }

  static WorldMap load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open map file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed map file " + path + ": " + e.what());
    }
    return from_json(j);
  }

  /// Resolves either a built-in layout name or a path to a map file.
  static WorldMap resolve(const std::string& name_or_path) {
    try {
      return named(name_or_path);
    } catch (const ConfigError&) {
      return load_file(name_or_path);
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["bounds"] = {bounds.xmin, bounds.ymin, bounds.xmax, bounds.ymax};
    auto obs = nlohmann::json::array();
    for (const auto& o : obstacles) obs.push_back({o.xmin, o.ymin, o.xmax, o.ymax});
    j["obstacles"] = obs;
    return j;
  }
};

}  // namespace infotrack
