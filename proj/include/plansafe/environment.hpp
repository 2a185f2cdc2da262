#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plansafe/trace.hpp"

namespace plansafe::env {

// Two task domains share one interface: drone navigation over landmark
// rooms ("Goto <room>") and tabletop pick-and-place ("Move <block> <box>").
enum class DomainKind { navigation, manipulation };

std::string_view domain_kind_name(DomainKind kind);
DomainKind parse_domain_kind(std::string_view name);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Vec3&) const = default;
};

double distance(const Vec3& a, const Vec3& b);

// A named, fixed point in the workspace: a room, a block, or a box.
// Coordinates are in meters.
struct Entity {
  std::string name;
  Vec3 position;
};

// One executable action, fully resolved against the entity tables.
// `proposition` is the event atom the action emits when executed
// (navigation: the landmark name; manipulation: "<block>_in_<box>").
struct Action {
  std::string text;         // e.g. "Goto blue_room" or "Move blk3 boxB"
  std::string proposition;  // event atom emitted on execution
  int target = -1;          // landmark index (navigation) or block index
  int box = -1;             // destination box index (manipulation only)
};

// The distinguished plan terminator token.
inline constexpr std::string_view kDoneToken = "DONE";

// A plan is an ordered list of action strings with DONE exactly once, last.
using Plan = std::vector<std::string>;

// Where the agent is and, for manipulation, which blocks it has already
// moved (each block may be moved at most once). `at` is kAtInitial for the
// starting pose, otherwise a landmark index (navigation) or a box index
// (manipulation — the arm ends where it dropped the block).
struct AgentState {
  static constexpr int kAtInitial = -1;

  int at = kAtInitial;
  std::uint32_t moved_mask = 0;

  bool operator==(const AgentState&) const = default;

  // Dense, collision-free key for search tables.
  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(at + 1))
            << 32) |
           moved_mask;
  }
};

struct ApplyResult {
  AgentState next;
  std::string proposition;  // singleton labeling of this step
  double cost = 0.0;        // time-steps
};

struct SimulationResult {
  ltl::Trace trace;  // one singleton labeling per action, DONE excluded
  double total_cost = 0.0;
};

// Explicit construction input; `random_environment` fills one procedurally
// and tests construct small hand-made instances. Validated on construction.
struct EnvironmentConfig {
  DomainKind kind = DomainKind::navigation;
  std::vector<Entity> landmarks;  // navigation rooms
  std::vector<Entity> blocks;     // manipulation
  std::vector<Entity> boxes;      // manipulation
  Vec3 initial_position;
  double travel_speed = 1.0;     // meters per time-step
  double action_overhead = 0.0;  // fixed time-steps per action
  Vec3 bounds_min;
  Vec3 bounds_max;
  std::uint64_t seed = 0;  // recorded for reproducibility; 0 = hand-built
};

// Immutable labeled transition system with a kinematic cost model.
// Every action emits exactly one event proposition, so traces are one-hot.
class Environment {
 public:
  explicit Environment(EnvironmentConfig config);

  DomainKind kind() const { return config_.kind; }
  std::uint64_t seed() const { return config_.seed; }
  const std::vector<Entity>& landmarks() const { return config_.landmarks; }
  const std::vector<Entity>& blocks() const { return config_.blocks; }
  const std::vector<Entity>& boxes() const { return config_.boxes; }
  const Vec3& initial_position() const { return config_.initial_position; }
  double travel_speed() const { return config_.travel_speed; }
  double action_overhead() const { return config_.action_overhead; }
  const Vec3& bounds_min() const { return config_.bounds_min; }
  const Vec3& bounds_max() const { return config_.bounds_max; }

  // All actions, sorted by action text; index into this table is the
  // canonical action id used throughout.
  const std::vector<Action>& actions() const { return actions_; }
  std::optional<std::size_t> find_action(std::string_view text) const;

  // Sorted, unique event propositions; the one-hot trace universe.
  const std::vector<std::string>& propositions() const {
    return propositions_;
  }

  AgentState initial_state() const { return AgentState{}; }
  Vec3 position_of(const AgentState& state) const;

  bool is_applicable(const AgentState& state, const Action& action) const;

  // Transition + labeling + kinematic cost. Cost = travel distance /
  // travel_speed + action_overhead; manipulation travel is the two-leg
  // reach (agent to block, then block to box). Throws on inapplicable or
  // unknown actions.
  ApplyResult apply(const AgentState& state, const Action& action) const;
  ApplyResult apply(const AgentState& state, std::string_view action) const;

 private:
  EnvironmentConfig config_;
  std::vector<Action> actions_;
  std::vector<std::string> propositions_;
};

// Folds `apply` over the plan (which must end in DONE); the trace collects
// one singleton labeling per action. Errors mention the failing step index.
SimulationResult simulate(const Environment& env, const Plan& plan);

// Throws unless the plan is in-vocabulary, applicable in sequence, and
// DONE-terminated.
void validate_plan(const Environment& env, const Plan& plan);

// Deterministic procedural generator. Navigation: 12 uniquely colored rooms
// on 3 or 4 floors of a 30 x 20 m building, drone start randomized.
// Manipulation: 16 blocks on 4 racks, 2-4 destination boxes, arm start
// randomized. Coordinates are grid-quantized so serialization round-trips
// exactly.
Environment random_environment(DomainKind kind, std::uint64_t seed);

// Structured-text (JSON) round-trip of the full configuration.
std::string environment_to_json(const Environment& env);
Environment environment_from_json(const std::string& text);
Environment load_environment(const std::string& path);
void save_environment(const Environment& env, const std::string& path);

// Compact human-readable summary (entity names, coordinates, start pose),
// suitable as planner-prompt context.
std::string description_text(const Environment& env);

}  // namespace plansafe::env
