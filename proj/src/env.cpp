#include "infoflow/env.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace infoflow::env {

namespace {

constexpr double kGeomEps = 1e-9;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return p.x() >= std::min(a.x(), b.x()) - kGeomEps &&
         p.x() <= std::max(a.x(), b.x()) + kGeomEps &&
         p.y() >= std::min(a.y(), b.y()) - kGeomEps &&
         p.y() <= std::max(a.y(), b.y()) + kGeomEps;
}

// Segment-segment intersection; touching and collinear overlap both count.
bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1,
                        const Vec2& q2) {
  const double d1 = cross2(q2 - q1, p1 - q1);
  const double d2 = cross2(q2 - q1, p2 - q1);
  const double d3 = cross2(p2 - p1, q1 - p1);
  const double d4 = cross2(p2 - p1, q2 - p1);

  if (((d1 > kGeomEps && d2 < -kGeomEps) || (d1 < -kGeomEps && d2 > kGeomEps)) &&
      ((d3 > kGeomEps && d4 < -kGeomEps) || (d3 < -kGeomEps && d4 > kGeomEps))) {
    return true;
  }
  if (std::abs(d1) <= kGeomEps && on_segment(q1, q2, p1)) return true;
  if (std::abs(d2) <= kGeomEps && on_segment(q1, q2, p2)) return true;
  if (std::abs(d3) <= kGeomEps && on_segment(p1, p2, q1)) return true;
  if (std::abs(d4) <= kGeomEps && on_segment(p1, p2, q2)) return true;
  return false;
}

bool point_on_segment(const Vec2& p, const Segment& seg) {
  if (std::abs(cross2(seg.b - seg.a, p - seg.a)) > kGeomEps) return false;
  return on_segment(seg.a, seg.b, p);
}

}  // namespace

std::string room_name(RoomId id) {
  switch (id) {
    case RoomId::Bottom: return "bottom";
    case RoomId::Middle: return "middle";
    case RoomId::Top: return "top";
  }
  return "bottom";
}

std::vector<Segment> WorldGeometry::solid_segments() const {
  std::vector<Segment> segments;
  for (const Wall& wall : walls) {
    auto doors = wall.doors;
    std::sort(doors.begin(), doors.end());
    double cursor = 0.0;
    for (const auto& [lo, hi] : doors) {
      if (lo > cursor) {
        segments.push_back({Vec2(cursor, wall.y), Vec2(lo, wall.y)});
      }
      cursor = std::max(cursor, hi);
    }
    if (cursor < arena) {
      segments.push_back({Vec2(cursor, wall.y), Vec2(arena, wall.y)});
    }
  }
  return segments;
}

std::vector<Vec2> WorldGeometry::door_centers() const {
  std::vector<Vec2> centers;
  for (const Wall& wall : walls) {
    for (const auto& [lo, hi] : wall.doors) {
      centers.emplace_back(0.5 * (lo + hi), wall.y);
    }
  }
  return centers;
}

void WorldGeometry::validate() const {
  if (arena <= 0.0) throw std::runtime_error("geometry: arena must be positive");
  if (action_bound <= 0.0) {
    throw std::runtime_error("geometry: action bound must be positive");
  }
  if (walls.size() != 2) {
    throw std::runtime_error("geometry: expected 2 walls for a 3-room world, got " +
                             std::to_string(walls.size()));
  }
  double prev = 0.0;
  for (const Wall& wall : walls) {
    if (wall.y <= prev || wall.y >= arena) {
      throw std::runtime_error("geometry: wall lines must be strictly inside "
                               "the arena and ascending");
    }
    prev = wall.y;
    if (wall.doors.size() != 1) {
      throw std::runtime_error("geometry: each wall needs exactly one door so "
                               "adjacent rooms connect through one gap");
    }
    const auto& [lo, hi] = wall.doors.front();
    if (!(lo < hi) || lo <= 0.0 || hi >= arena) {
      throw std::runtime_error("geometry: door interval must be nonempty and "
                               "strictly inside the wall");
    }
  }
}

WorldGeometry three_room_geometry() {
  WorldGeometry g;
  g.arena = 40.0;
  g.action_bound = 10.0;
  g.walls = {
      {40.0 / 3.0, {{8.0, 12.0}}},
      {80.0 / 3.0, {{28.0, 32.0}}},
  };
  return g;
}

void save_geometry(const WorldGeometry& g, const std::filesystem::path& path) {
  nlohmann::json j;
  j["arena"] = g.arena;
  j["action_bound"] = g.action_bound;
  j["bound_mode"] = g.bound_mode == ActionBoundMode::Box ? "box" : "length";
  j["walls"] = nlohmann::json::array();
  for (const Wall& wall : g.walls) {
    nlohmann::json w;
    w["y"] = wall.y;
    w["doors"] = wall.doors;
    j["walls"].push_back(w);
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("geometry: cannot open '" + path.string() +
                             "' for writing");
  }
  out << j.dump(2) << '\n';
}

WorldGeometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("geometry: cannot open '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("geometry: parse error in '" + path.string() +
                             "': " + e.what());
  }
  WorldGeometry g;
  g.arena = j.value("arena", 40.0);
  g.action_bound = j.value("action_bound", 10.0);
  const std::string mode = j.value("bound_mode", "box");
  if (mode == "box") {
    g.bound_mode = ActionBoundMode::Box;
  } else if (mode == "length") {
    g.bound_mode = ActionBoundMode::Length;
  } else {
    throw std::runtime_error("geometry: unknown bound_mode '" + mode + "'");
  }
  for (const auto& w : j.at("walls")) {
    Wall wall;
    wall.y = w.at("y").get<double>();
    for (const auto& d : w.at("doors")) {
      wall.doors.emplace_back(d.at(0).get<double>(), d.at(1).get<double>());
    }
    g.walls.push_back(std::move(wall));
  }
  std::sort(g.walls.begin(), g.walls.end(),
            [](const Wall& a, const Wall& b) { return a.y < b.y; });
  return g;
}

World::World(WorldGeometry geometry)
    : geometry_(std::move(geometry)), solid_(geometry_.solid_segments()) {}

Action World::clip_action(const Action& a) const {
  const double bound = geometry_.action_bound;
  if (geometry_.bound_mode == ActionBoundMode::Box) {
    return {std::clamp(a.ax, -bound, bound), std::clamp(a.ay, -bound, bound)};
  }
  const double len = std::hypot(a.ax, a.ay);
  if (len <= bound || len == 0.0) return a;
  const double scale = bound / len;
  return {a.ax * scale, a.ay * scale};
}

bool World::state_valid(const State& s) const {
  if (s.x < 0.0 || s.x > geometry_.arena || s.y < 0.0 || s.y > geometry_.arena) {
    return false;
  }
  for (const Segment& seg : solid_) {
    if (point_on_segment(s.vec(), seg)) return false;
  }
  return true;
}

bool World::segment_blocked(const State& p, const Vec2& q) const {
  if (q.x() < 0.0 || q.x() > geometry_.arena || q.y() < 0.0 ||
      q.y() > geometry_.arena) {
    return true;
  }
  const Vec2 start = p.vec();
  for (const Segment& seg : solid_) {
    if (segments_intersect(start, q, seg.a, seg.b)) return true;
  }
  return false;
}

State World::step(const State& s, const Action& a) const {
  const Action clipped = clip_action(a);
  const Vec2 target = s.vec() + clipped.vec();
  if (segment_blocked(s, target)) return s;
  return {target.x(), target.y()};
}

State World::reset(const ResetMode& mode, std::mt19937_64& rng) const {
  if (const auto* fixed = std::get_if<FixedReset>(&mode)) {
    if (!state_valid(fixed->state)) {
      throw std::invalid_argument("env: fixed reset state is not a valid state");
    }
    return fixed->state;
  }
  const double y_max = std::holds_alternative<UniformBottomRoom>(mode) &&
                               !geometry_.walls.empty()
                           ? geometry_.walls.front().y
                           : geometry_.arena;
  std::uniform_real_distribution<double> dx(0.0, geometry_.arena);
  std::uniform_real_distribution<double> dy(0.0, y_max);
  for (;;) {
    State s{dx(rng), dy(rng)};
    if (state_valid(s)) return s;
  }
}

RoomId World::room_of(const State& s) const {
  int index = 0;
  for (const Wall& wall : geometry_.walls) {
    if (s.y > wall.y) ++index;  // ties resolve toward the lower room
  }
  index = std::min(index, 2);
  return static_cast<RoomId>(index);
}

}  // namespace infoflow::env
