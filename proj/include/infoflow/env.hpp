#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "infoflow/types.hpp"

namespace infoflow::env {

struct State {
  double x = 0.0;
  double y = 0.0;

  Vec2 vec() const { return Vec2(x, y); }
};

struct Action {
  double ax = 0.0;
  double ay = 0.0;

  Vec2 vec() const { return Vec2(ax, ay); }
};

enum class RoomId { Bottom = 0, Middle = 1, Top = 2 };

std::string room_name(RoomId id);

struct Segment {
  Vec2 a;
  Vec2 b;
};

// Full-width horizontal wall with door openings. Doors are open intervals on
// x; the solid parts are what collides.
struct Wall {
  double y = 0.0;
  std::vector<std::pair<double, double>> doors;
};

// How out-of-range actions are interpreted: componentwise box clip (default)
// or clipping the displacement length to action_bound.
enum class ActionBoundMode { Box, Length };

struct WorldGeometry {
  double arena = 40.0;
  double action_bound = 10.0;
  ActionBoundMode bound_mode = ActionBoundMode::Box;
  std::vector<Wall> walls;  // sorted ascending by y

  int room_count() const { return static_cast<int>(walls.size()) + 1; }
  std::vector<Segment> solid_segments() const;
  std::vector<Vec2> door_centers() const;
  // Throws std::runtime_error when the room/door invariants are violated.
  void validate() const;
};

// The paper's layout: 40x40 arena, walls at y=40/3 and y=80/3, door gaps of
// width 4 centered at x=10 (lower) and x=30 (upper).
WorldGeometry three_room_geometry();

void save_geometry(const WorldGeometry& g, const std::filesystem::path& path);
WorldGeometry load_geometry(const std::filesystem::path& path);

struct FixedReset {
  State state;
};
struct UniformAnywhere {};
struct UniformBottomRoom {};
using ResetMode = std::variant<UniformAnywhere, UniformBottomRoom, FixedReset>;

class World {
 public:
  explicit World(WorldGeometry geometry);

  const WorldGeometry& geometry() const { return geometry_; }

  // Returns s + a when the straight segment stays inside the arena and
  // crosses no solid wall; otherwise returns s unchanged. Out-of-range
  // actions are clipped, never rejected.
  State step(const State& s, const Action& a) const;

  State reset(const ResetMode& mode, std::mt19937_64& rng) const;

  // Ties on a wall line resolve toward the lower room.
  RoomId room_of(const State& s) const;

  // True iff the segment p -> q leaves the arena or intersects a solid wall
  // segment (door gaps are openings).
  bool segment_blocked(const State& p, const Vec2& q) const;

  Action clip_action(const Action& a) const;
  bool state_valid(const State& s) const;

 private:
  WorldGeometry geometry_;
  std::vector<Segment> solid_;
};

}  // namespace infoflow::env
