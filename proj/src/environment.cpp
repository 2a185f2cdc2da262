#include "plansafe/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plansafe/error.hpp"
#include "plansafe/formula.hpp"
#include "plansafe/rng.hpp"

namespace plansafe::env {

namespace {

using ordered_json = nlohmann::ordered_json;

void check(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::generic, "invalid environment: " + message);
}

bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

bool within(const Vec3& v, const Vec3& lo, const Vec3& hi) {
  return lo.x <= v.x && v.x <= hi.x && lo.y <= v.y && v.y <= hi.y &&
         lo.z <= v.z && v.z <= hi.z;
}

std::string format_vec(const Vec3& v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%.2f, %.2f, %.2f)", v.x, v.y, v.z);
  return buf;
}

}  // namespace

std::string_view domain_kind_name(DomainKind kind) {
  return kind == DomainKind::navigation ? "navigation" : "manipulation";
}

DomainKind parse_domain_kind(std::string_view name) {
  if (name == "navigation") return DomainKind::navigation;
  if (name == "manipulation") return DomainKind::manipulation;
  throw Error(ErrorCode::parse_error,
              "unknown domain kind: " + std::string(name));
}

double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Environment::Environment(EnvironmentConfig config)
    : config_(std::move(config)) {
  const bool nav = config_.kind == DomainKind::navigation;
  if (nav) {
    check(!config_.landmarks.empty(), "navigation needs landmarks");
    check(config_.blocks.empty() && config_.boxes.empty(),
          "navigation takes no blocks or boxes");
  } else {
    check(!config_.blocks.empty() && !config_.boxes.empty(),
          "manipulation needs blocks and boxes");
    check(config_.landmarks.empty(), "manipulation takes no landmarks");
    check(config_.blocks.size() <= 32, "at most 32 blocks supported");
  }
  check(config_.travel_speed > 0.0, "travel speed must be positive");
  check(config_.action_overhead >= 0.0, "action overhead must be >= 0");
  check(finite(config_.initial_position), "initial position must be finite");
  check(finite(config_.bounds_min) && finite(config_.bounds_max),
        "bounds must be finite");
  check(within(config_.initial_position, config_.bounds_min,
               config_.bounds_max),
        "initial position outside bounds");

  std::set<std::string> names;
  auto note_entity = [&](const Entity& e) {
    check(ltl::is_valid_atom_name(e.name),
          "entity name is not a valid atom: " + e.name);
    check(names.insert(e.name).second, "duplicate entity name: " + e.name);
    check(finite(e.position), "non-finite coordinates for " + e.name);
    check(within(e.position, config_.bounds_min, config_.bounds_max),
          "entity outside bounds: " + e.name);
  };
  for (const Entity& e : config_.landmarks) note_entity(e);
  for (const Entity& e : config_.blocks) note_entity(e);
  for (const Entity& e : config_.boxes) note_entity(e);

  if (nav) {
    for (std::size_t i = 0; i < config_.landmarks.size(); ++i) {
      const std::string& name = config_.landmarks[i].name;
      actions_.push_back(
          Action{"Goto " + name, name, static_cast<int>(i), -1});
    }
  } else {
    for (std::size_t b = 0; b < config_.blocks.size(); ++b) {
      for (std::size_t x = 0; x < config_.boxes.size(); ++x) {
        const std::string& blk = config_.blocks[b].name;
        const std::string& box = config_.boxes[x].name;
        actions_.push_back(Action{"Move " + blk + " " + box,
                                  blk + "_in_" + box, static_cast<int>(b),
                                  static_cast<int>(x)});
      }
    }
  }
  std::sort(actions_.begin(), actions_.end(),
            [](const Action& a, const Action& b) { return a.text < b.text; });

  for (const Action& a : actions_) {
    check(ltl::is_valid_atom_name(a.proposition),
          "derived proposition is not a valid atom: " + a.proposition);
    propositions_.push_back(a.proposition);
  }
  std::sort(propositions_.begin(), propositions_.end());
  propositions_.erase(
      std::unique(propositions_.begin(), propositions_.end()),
      propositions_.end());
  check(propositions_.size() == actions_.size(),
        "event propositions must be distinct per action");
  check(propositions_.size() <= ltl::Trace::kMaxUniverseSize,
        "too many event propositions");
}

std::optional<std::size_t> Environment::find_action(
    std::string_view text) const {
  auto it = std::lower_bound(
      actions_.begin(), actions_.end(), text,
      [](const Action& a, std::string_view t) { return a.text < t; });
  if (it == actions_.end() || it->text != text) return std::nullopt;
  return static_cast<std::size_t>(it - actions_.begin());
}

Vec3 Environment::position_of(const AgentState& state) const {
  if (state.at == AgentState::kAtInitial) return config_.initial_position;
  if (config_.kind == DomainKind::navigation) {
    return config_.landmarks.at(static_cast<std::size_t>(state.at)).position;
  }
  return config_.boxes.at(static_cast<std::size_t>(state.at)).position;
}

bool Environment::is_applicable(const AgentState& state,
                                const Action& action) const {
  if (config_.kind == DomainKind::navigation) {
    return action.target >= 0 &&
           action.target < static_cast<int>(config_.landmarks.size());
  }
  if (action.target < 0 ||
      action.target >= static_cast<int>(config_.blocks.size()) ||
      action.box < 0 || action.box >= static_cast<int>(config_.boxes.size())) {
    return false;
  }
  return (state.moved_mask >> action.target & 1u) == 0;
}

ApplyResult Environment::apply(const AgentState& state,
                               const Action& action) const {
  if (!is_applicable(state, action)) {
    throw Error(ErrorCode::invalid_action,
                "action not applicable: " + action.text);
  }
  const Vec3 from = position_of(state);
  ApplyResult out;
  out.proposition = action.proposition;
  if (config_.kind == DomainKind::navigation) {
    const Vec3 to =
        config_.landmarks[static_cast<std::size_t>(action.target)].position;
    out.cost = distance(from, to) / config_.travel_speed +
               config_.action_overhead;
    out.next = state;
    out.next.at = action.target;
  } else {
    const Vec3 blk =
        config_.blocks[static_cast<std::size_t>(action.target)].position;
    const Vec3 box =
        config_.boxes[static_cast<std::size_t>(action.box)].position;
    out.cost = (distance(from, blk) + distance(blk, box)) /
                   config_.travel_speed +
               config_.action_overhead;
    out.next = state;
    out.next.at = action.box;
    out.next.moved_mask |= 1u << action.target;
  }
  return out;
}

ApplyResult Environment::apply(const AgentState& state,
                               std::string_view action) const {
  auto id = find_action(action);
  if (!id) {
    throw Error(ErrorCode::invalid_action,
                "unknown action: " + std::string(action));
  }
  return apply(state, actions_[*id]);
}

SimulationResult simulate(const Environment& env, const Plan& plan) {
  if (plan.empty() || plan.back() != kDoneToken) {
    throw Error(ErrorCode::invalid_action, "plan must end with DONE");
  }
  SimulationResult out{ltl::Trace(env.propositions()), 0.0};
  AgentState state = env.initial_state();
  for (std::size_t i = 0; i + 1 < plan.size(); ++i) {
    if (plan[i] == kDoneToken) {
      throw Error(ErrorCode::invalid_action,
                  "DONE before the end of the plan (plan step " +
                      std::to_string(i) + ")");
    }
    ApplyResult step;
    try {
      step = env.apply(state, plan[i]);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (plan step " +
                                std::to_string(i) + ")");
    }
    out.trace.push_back({step.proposition});
    out.total_cost += step.cost;
    state = step.next;
  }
  return out;
}

void validate_plan(const Environment& env, const Plan& plan) {
  (void)simulate(env, plan);
}

namespace {

constexpr const char* kRoomNames[12] = {
    "red_room",   "blue_room",  "green_room",   "yellow_room",
    "purple_room", "orange_room", "pink_room",   "brown_room",
    "cyan_room",  "magenta_room", "white_room",  "black_room"};

// Draws grid positions until one is unused; the grids are far larger than
// the entity counts, so this terminates quickly.
Vec3 fresh_position(std::mt19937_64& rng, std::set<std::string>& used,
                    const std::function<Vec3()>& draw) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vec3 v = draw();
    if (used.insert(format_vec(v)).second) return v;
  }
  throw Error(ErrorCode::generic, "could not place entity");
}

Environment random_navigation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EnvironmentConfig cfg;
  cfg.kind = DomainKind::navigation;
  cfg.seed = seed;
  cfg.travel_speed = 0.25;
  cfg.action_overhead = 5.0;

  const int floors = 3 + static_cast<int>(pick(rng, 2));
  const double height = 3.0 * floors;
  cfg.bounds_min = {0.0, 0.0, 0.0};
  cfg.bounds_max = {30.0, 20.0, height};

  std::set<std::string> used;
  for (const char* name : kRoomNames) {
    Vec3 pos = fresh_position(rng, used, [&] {
      const int floor = static_cast<int>(pick(rng, floors));
      return Vec3{grid_value(rng, 0.0, 30.0, 0.25),
                  grid_value(rng, 0.0, 20.0, 0.25), 3.0 * floor + 1.5};
    });
    cfg.landmarks.push_back(Entity{name, pos});
  }
  cfg.initial_position = {grid_value(rng, 0.0, 30.0, 0.25),
                          grid_value(rng, 0.0, 20.0, 0.25),
                          grid_value(rng, 0.5, height - 0.5, 0.25)};
  return Environment(std::move(cfg));
}

Environment random_manipulation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EnvironmentConfig cfg;
  cfg.kind = DomainKind::manipulation;
  cfg.seed = seed;
  cfg.travel_speed = 0.02;
  cfg.action_overhead = 40.0;
  cfg.bounds_min = {0.0, 0.0, 0.0};
  cfg.bounds_max = {1.5, 2.2, 1.2};

  std::set<std::string> used;
  for (int b = 0; b < 16; ++b) {
    Vec3 pos = fresh_position(rng, used, [&] {
      const double rack_x = 0.3 + 0.3 * static_cast<double>(pick(rng, 4));
      return Vec3{rack_x, grid_value(rng, 0.1, 1.5, 0.01),
                  grid_value(rng, 0.1, 0.9, 0.01)};
    });
    cfg.blocks.push_back(Entity{"blk" + std::to_string(b), pos});
  }
  const int num_boxes = 2 + static_cast<int>(pick(rng, 3));
  for (int x = 0; x < num_boxes; ++x) {
    Vec3 pos = fresh_position(rng, used, [&] {
      return Vec3{grid_value(rng, 0.1, 1.4, 0.01),
                  grid_value(rng, 1.8, 2.1, 0.01), 0.05};
    });
    cfg.boxes.push_back(Entity{std::string("box") +
                                   static_cast<char>('A' + x),
                               pos});
  }
  cfg.initial_position = {grid_value(rng, 0.2, 1.3, 0.01),
                          grid_value(rng, 0.4, 1.2, 0.01),
                          grid_value(rng, 0.3, 0.9, 0.01)};
  return Environment(std::move(cfg));
}

}  // namespace

Environment random_environment(DomainKind kind, std::uint64_t seed) {
  return kind == DomainKind::navigation ? random_navigation(seed)
                                        : random_manipulation(seed);
}

namespace {

ordered_json vec_to_json(const Vec3& v) {
  return ordered_json::array({v.x, v.y, v.z});
}

Vec3 vec_from_json(const ordered_json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::parse_error,
                "environment: position must be [x, y, z]");
  }
  return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json entities_to_json(const std::vector<Entity>& entities) {
  ordered_json arr = ordered_json::array();
  for (const Entity& e : entities) {
    arr.push_back(
        ordered_json{{"name", e.name}, {"position", vec_to_json(e.position)}});
  }
  return arr;
}

std::vector<Entity> entities_from_json(const ordered_json& j) {
  std::vector<Entity> out;
  for (const auto& e : j) {
    out.push_back(Entity{e.at("name").get<std::string>(),
                         vec_from_json(e.at("position"))});
  }
  return out;
}

constexpr const char* kEnvFormatTag = "plansafe-environment v1";

}  // namespace

std::string environment_to_json(const Environment& env) {
  ordered_json j;
  j["format"] = kEnvFormatTag;
  j["kind"] = domain_kind_name(env.kind());
  j["seed"] = env.seed();
  j["travel_speed"] = env.travel_speed();
  j["action_overhead"] = env.action_overhead();
  j["bounds"] = ordered_json{{"min", vec_to_json(env.bounds_min())},
                             {"max", vec_to_json(env.bounds_max())}};
  j["initial_position"] = vec_to_json(env.initial_position());
  j["landmarks"] = entities_to_json(env.landmarks());
  j["blocks"] = entities_to_json(env.blocks());
  j["boxes"] = entities_to_json(env.boxes());
  return j.dump(2) + "\n";
}

Environment environment_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("environment: invalid JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kEnvFormatTag) {
      throw Error(ErrorCode::parse_error,
                  "environment: unsupported format tag");
    }
    EnvironmentConfig cfg;
    cfg.kind = parse_domain_kind(j.at("kind").get<std::string>());
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.travel_speed = j.at("travel_speed").get<double>();
    cfg.action_overhead = j.at("action_overhead").get<double>();
    cfg.bounds_min = vec_from_json(j.at("bounds").at("min"));
    cfg.bounds_max = vec_from_json(j.at("bounds").at("max"));
    cfg.initial_position = vec_from_json(j.at("initial_position"));
    cfg.landmarks = entities_from_json(j.at("landmarks"));
    cfg.blocks = entities_from_json(j.at("blocks"));
    cfg.boxes = entities_from_json(j.at("boxes"));
    return Environment(std::move(cfg));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                std::string("environment: missing or mistyped field: ") +
                    e.what());
  }
}

Environment load_environment(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io_error, "cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return environment_from_json(buf.str());
}

void save_environment(const Environment& env, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io_error, "cannot open " + path + " for writing");
  }
  out << environment_to_json(env);
  if (!out) {
    throw Error(ErrorCode::io_error, "failed writing " + path);
  }
}

std::string description_text(const Environment& env) {
  std::ostringstream out;
  if (env.kind() == DomainKind::navigation) {
    out << "Drone navigation environment (seed " << env.seed() << "): "
        << env.landmarks().size() << " rooms in a building of "
        << env.bounds_max().x << " x " << env.bounds_max().y << " x "
        << env.bounds_max().z << " m.\n";
    for (const Entity& e : env.landmarks()) {
      out << "  room " << e.name << " at " << format_vec(e.position) << "\n";
    }
    out << "Drone starts at " << format_vec(env.initial_position()) << ".\n";
    out << "Action: Goto <room>. Visiting a room emits its name as an "
           "event.\n";
  } else {
    out << "Tabletop manipulation environment (seed " << env.seed()
        << "): " << env.blocks().size() << " blocks on racks, "
        << env.boxes().size() << " destination boxes.\n";
    for (const Entity& e : env.blocks()) {
      out << "  block " << e.name << " at " << format_vec(e.position) << "\n";
    }
    for (const Entity& e : env.boxes()) {
      out << "  box " << e.name << " at " << format_vec(e.position) << "\n";
    }
    out << "Arm starts at " << format_vec(env.initial_position())
        << ". Each block can be moved at most once.\n";
    out << "Action: Move <block> <box>. Moving emits "
           "<block>_in_<box> as an event.\n";
  }
  return out.str();
}

}  // namespace plansafe::env
