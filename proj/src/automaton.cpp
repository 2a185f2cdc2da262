#include "plansafe/automaton.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <functional>
#include <unordered_set>
#include <utility>

#include "plansafe/error.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/simplify.hpp"

namespace plansafe::automaton {

using ltl::Formula;
using ltl::Op;
using ltl::Trace;

const char* alphabet_mode_name(AlphabetMode m) noexcept {
  return m == AlphabetMode::full ? "full" : "one-hot";
}

std::optional<AlphabetMode> alphabet_mode_from_name(std::string_view name) {
  if (name == "full") return AlphabetMode::full;
  if (name == "one-hot" || name == "one_hot" || name == "onehot") {
    return AlphabetMode::one_hot;
  }
  return std::nullopt;
}

namespace {

using AtomPredicate = std::function<bool(const std::string&)>;

// One unsimplified progression step. Strong Next: the continuation must be
// non-empty for X f to have held, hence the "f & F true" residual ("F true"
// is exactly "at least one step remains").
Formula progress_raw(const Formula& f, const AtomPredicate& in_label) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Atom:
      return in_label(f.atom_name()) ? Formula::make_true()
                                     : Formula::make_false();
    case Op::Not:
      return Formula::make_not(progress_raw(f.child(), in_label));
    case Op::And:
      return Formula::make_and(progress_raw(f.left(), in_label),
                               progress_raw(f.right(), in_label));
    case Op::Or:
      return Formula::make_or(progress_raw(f.left(), in_label),
                              progress_raw(f.right(), in_label));
    case Op::Implies:
      return Formula::make_implies(progress_raw(f.left(), in_label),
                                   progress_raw(f.right(), in_label));
    case Op::Next:
      return Formula::make_and(f.child(),
                               Formula::make_finally(Formula::make_true()));
    case Op::Globally:
      return Formula::make_and(progress_raw(f.child(), in_label), f);
    case Op::Finally:
      return Formula::make_or(progress_raw(f.child(), in_label), f);
    case Op::Until:
      return Formula::make_or(
          progress_raw(f.right(), in_label),
          Formula::make_and(progress_raw(f.left(), in_label), f));
  }
  throw Error(ErrorCode::generic, "unreachable formula operator");
}

std::unordered_map<std::string, std::size_t> index_universe(
    const std::vector<std::string>& universe) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    if (!ltl::is_valid_atom_name(universe[i])) {
      throw Error(ErrorCode::generic,
                  "invalid atom name in universe: '" + universe[i] + "'");
    }
    if (!index.emplace(universe[i], i).second) {
      throw Error(ErrorCode::generic,
                  "duplicate atom in universe: '" + universe[i] + "'");
    }
  }
  return index;
}

void require_atoms_in_universe(
    const Formula& f,
    const std::unordered_map<std::string, std::size_t>& index) {
  for (const std::string& a : f.atoms()) {
    if (!index.count(a)) {
      throw Error(ErrorCode::generic,
                  "formula atom '" + a + "' is not in the universe");
    }
  }
}

}  // namespace

Formula progress(const Formula& f, const std::vector<std::string>& label,
                 const std::vector<std::string>& universe) {
  auto index = index_universe(universe);
  require_atoms_in_universe(f, index);
  std::unordered_set<std::string> in(label.begin(), label.end());
  for (const std::string& a : in) {
    if (!index.count(a)) {
      throw Error(ErrorCode::generic,
                  "label atom '" + a + "' is not in the universe");
    }
  }
  Formula raw = progress_raw(
      f, [&](const std::string& a) { return in.count(a) > 0; });
  return ltl::canonicalize(raw);
}

bool end_accepting(const Formula& f) {
  switch (f.op()) {
    case Op::True:
      return true;
    case Op::False:
    case Op::Atom:
    case Op::Next:
    case Op::Finally:
    case Op::Until:
      return false;
    case Op::Globally:
      return true;
    case Op::Not:
      return !end_accepting(f.child());
    case Op::And:
      return end_accepting(f.left()) && end_accepting(f.right());
    case Op::Or:
      return end_accepting(f.left()) || end_accepting(f.right());
    case Op::Implies:
      return !end_accepting(f.left()) || end_accepting(f.right());
  }
  throw Error(ErrorCode::generic, "unreachable formula operator");
}

Formula conjoin(const std::vector<Formula>& fs) {
  if (fs.empty()) {
    throw Error(ErrorCode::generic, "conjoin requires at least one formula");
  }
  Formula acc = fs.back();
  for (std::size_t i = fs.size() - 1; i-- > 0;) {
    acc = Formula::make_and(fs[i], std::move(acc));
  }
  return acc;
}

const Formula& TraceAutomaton::residual(StateId s) const {
  if (s >= residuals_.size()) {
    throw Error(ErrorCode::generic, "automaton state id out of range");
  }
  return residuals_[s];
}

bool TraceAutomaton::is_accepting(StateId s) const {
  if (s >= accepting_.size()) {
    throw Error(ErrorCode::generic, "automaton state id out of range");
  }
  return accepting_[s] != 0;
}

bool TraceAutomaton::is_dead(StateId s) const {
  if (s >= dead_.size()) {
    throw Error(ErrorCode::generic, "automaton state id out of range");
  }
  return dead_[s] != 0;
}

std::vector<TraceAutomaton::StateId> TraceAutomaton::dead_states() const {
  std::vector<StateId> out;
  for (StateId s = 0; s < dead_.size(); ++s) {
    if (dead_[s]) out.push_back(s);
  }
  return out;
}

TraceAutomaton::StateId TraceAutomaton::next_state(
    StateId s, std::size_t label_index) const {
  if (s >= residuals_.size() || label_index >= num_labels_) {
    throw Error(ErrorCode::generic, "automaton transition lookup out of range");
  }
  return delta_[s * num_labels_ + label_index];
}

std::size_t TraceAutomaton::label_index_of_bits(std::uint64_t bits) const {
  if (mode_ == AlphabetMode::full) {
    if (universe_.size() < 64 && (bits >> universe_.size()) != 0) {
      throw Error(ErrorCode::generic, "label has bits outside the universe");
    }
    return static_cast<std::size_t>(bits);
  }
  if (std::popcount(bits) != 1 ||
      static_cast<std::size_t>(std::countr_zero(bits)) >= universe_.size()) {
    throw Error(ErrorCode::generic,
                "label must name exactly one universe atom in one-hot mode");
  }
  return static_cast<std::size_t>(std::countr_zero(bits));
}

std::uint64_t TraceAutomaton::label_bits_of_index(
    std::size_t label_index) const {
  if (label_index >= num_labels_) {
    throw Error(ErrorCode::generic, "label index out of range");
  }
  return mode_ == AlphabetMode::full
             ? static_cast<std::uint64_t>(label_index)
             : (std::uint64_t{1} << label_index);
}

TraceAutomaton::StateId TraceAutomaton::step(StateId s,
                                             std::uint64_t label_bits) const {
  return next_state(s, label_index_of_bits(label_bits));
}

TraceAutomaton::StateId TraceAutomaton::run(const Trace& t) const {
  if (t.universe() != universe_) {
    throw Error(ErrorCode::generic,
                "trace universe does not match the automaton universe");
  }
  StateId s = initial_;
  for (std::size_t i = 0; i < t.size(); ++i) s = step(s, t.label_bits(i));
  return s;
}

bool TraceAutomaton::accepts(const Trace& t) const {
  return is_accepting(run(t));
}

std::string TraceAutomaton::render_label(std::size_t label_index) const {
  std::uint64_t bits = label_bits_of_index(label_index);
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < universe_.size(); ++i) {
    if (bits & (std::uint64_t{1} << i)) {
      if (!first) out += ",";
      out += universe_[i];
      first = false;
    }
  }
  out += "}";
  return out;
}

std::string TraceAutomaton::dump() const {
  std::string out = "trace-automaton v1\n";
  out += "mode ";
  out += alphabet_mode_name(mode_);
  out += "\nuniverse";
  for (const std::string& a : universe_) {
    out += " ";
    out += a;
  }
  out += "\ninitial " + std::to_string(initial_);
  out += "\nstates " + std::to_string(residuals_.size()) + "\n";
  for (StateId s = 0; s < residuals_.size(); ++s) {
    out += "state " + std::to_string(s) +
           " accepting=" + (accepting_[s] ? "1" : "0") +
           " dead=" + (dead_[s] ? "1" : "0") +
           " residual=" + ltl::render_infix(residuals_[s]) + "\n";
  }
  out += "edges " + std::to_string(num_edges()) + "\n";
  for (StateId s = 0; s < residuals_.size(); ++s) {
    for (std::size_t li = 0; li < num_labels_; ++li) {
      out += "edge " + std::to_string(s) + " " + render_label(li) + " " +
             std::to_string(delta_[s * num_labels_ + li]) + "\n";
    }
  }
  return out;
}

std::string TraceAutomaton::to_dot() const {
  std::string out = "digraph trace_automaton {\n  rankdir=LR;\n";
  out += "  start [shape=point, label=\"\"];\n";
  out += "  start -> s" + std::to_string(initial_) + ";\n";
  for (StateId s = 0; s < residuals_.size(); ++s) {
    out += "  s" + std::to_string(s) + " [shape=" +
           (accepting_[s] ? "doublecircle" : "circle");
    if (dead_[s]) out += ", style=filled, fillcolor=lightgray";
    out += ", label=\"" + std::to_string(s) + ": " +
           ltl::render_infix(residuals_[s]) + "\"];\n";
  }
  // Parallel edges are merged and their labels comma-joined.
  for (StateId s = 0; s < residuals_.size(); ++s) {
    std::unordered_map<StateId, std::string> grouped;
    std::vector<StateId> order;
    for (std::size_t li = 0; li < num_labels_; ++li) {
      StateId dst = delta_[s * num_labels_ + li];
      auto [it, inserted] = grouped.emplace(dst, render_label(li));
      if (inserted) {
        order.push_back(dst);
      } else {
        it->second += " " + render_label(li);
      }
    }
    for (StateId dst : order) {
      out += "  s" + std::to_string(s) + " -> s" + std::to_string(dst) +
             " [label=\"" + grouped[dst] + "\"];\n";
    }
  }
  out += "}\n";
  return out;
}

TraceAutomaton compile(const Formula& f,
                       const std::vector<std::string>& universe,
                       AlphabetMode mode, std::size_t state_cap) {
  if (state_cap < 1) {
    throw Error(ErrorCode::generic, "state cap must be at least 1");
  }
  if (universe.size() > Trace::kMaxUniverseSize) {
    throw Error(ErrorCode::generic, "universe has more than 64 atoms");
  }
  if (mode == AlphabetMode::full && universe.size() > 16) {
    throw Error(ErrorCode::generic,
                "full alphabet mode supports at most 16 atoms (got " +
                    std::to_string(universe.size()) + ")");
  }
  auto index = index_universe(universe);
  require_atoms_in_universe(f, index);

  TraceAutomaton a;
  a.universe_ = universe;
  a.mode_ = mode;
  a.num_labels_ = mode == AlphabetMode::full
                      ? (std::size_t{1} << universe.size())
                      : universe.size();

  ltl::Canonicalizer canon;
  std::unordered_map<Formula, TraceAutomaton::StateId, ltl::FormulaHash>
      intern;
  auto intern_state = [&](Formula g) {
    auto it = intern.find(g);
    if (it != intern.end()) return it->second;
    if (a.residuals_.size() >= state_cap) {
      throw Error(ErrorCode::state_cap_exceeded,
                  "automaton state cap exceeded: more than " +
                      std::to_string(state_cap) +
                      " states required (partial automaton discarded)");
    }
    auto id = static_cast<TraceAutomaton::StateId>(a.residuals_.size());
    a.residuals_.push_back(g);
    intern.emplace(std::move(g), id);
    return id;
  };

  a.initial_ = intern_state(canon(f));
  for (TraceAutomaton::StateId s = 0; s < a.residuals_.size(); ++s) {
    for (std::size_t li = 0; li < a.num_labels_; ++li) {
      std::uint64_t bits = a.label_bits_of_index(li);
      Formula raw =
          progress_raw(a.residuals_[s], [&](const std::string& atom) {
            auto it = index.find(atom);
            if (it == index.end()) {
              throw Error(ErrorCode::generic,
                          "formula atom '" + atom +
                              "' is not in the universe");
            }
            return ((bits >> it->second) & 1) != 0;
          });
      a.delta_.push_back(intern_state(canon(raw)));
    }
  }

  a.accepting_.resize(a.residuals_.size());
  for (std::size_t s = 0; s < a.residuals_.size(); ++s) {
    a.accepting_[s] = end_accepting(a.residuals_[s]) ? 1 : 0;
  }

  // Dead = not backward-reachable from any accepting state.
  std::vector<std::vector<TraceAutomaton::StateId>> reverse(
      a.residuals_.size());
  for (std::size_t s = 0; s < a.residuals_.size(); ++s) {
    for (std::size_t li = 0; li < a.num_labels_; ++li) {
      reverse[a.delta_[s * a.num_labels_ + li]].push_back(
          static_cast<TraceAutomaton::StateId>(s));
    }
  }
  std::vector<std::uint8_t> alive(a.residuals_.size(), 0);
  std::deque<TraceAutomaton::StateId> queue;
  for (std::size_t s = 0; s < a.residuals_.size(); ++s) {
    if (a.accepting_[s]) {
      alive[s] = 1;
      queue.push_back(static_cast<TraceAutomaton::StateId>(s));
    }
  }
  while (!queue.empty()) {
    TraceAutomaton::StateId s = queue.front();
    queue.pop_front();
    for (TraceAutomaton::StateId p : reverse[s]) {
      if (!alive[p]) {
        alive[p] = 1;
        queue.push_back(p);
      }
    }
  }
  a.dead_.resize(a.residuals_.size());
  for (std::size_t s = 0; s < a.residuals_.size(); ++s) {
    a.dead_[s] = alive[s] ? 0 : 1;
  }
  return a;
}

EquivalenceResult check_equivalence(const TraceAutomaton& a,
                                    const TraceAutomaton& b) {
  if (a.universe() != b.universe() || a.mode() != b.mode()) {
    throw Error(ErrorCode::generic,
                "equivalence requires the same universe and alphabet mode");
  }
  const std::size_t labels = a.num_labels();
  auto key = [](TraceAutomaton::StateId x, TraceAutomaton::StateId y) {
    return (static_cast<std::uint64_t>(x) << 32) | y;
  };

  struct PairInfo {
    std::uint32_t parent;      // index into `pairs`
    std::uint32_t label;       // label index taken from the parent
  };
  std::unordered_map<std::uint64_t, std::uint32_t> seen;
  std::vector<std::pair<TraceAutomaton::StateId, TraceAutomaton::StateId>>
      pairs;
  std::vector<PairInfo> info;

  auto make_witness = [&](std::uint32_t pair_idx) {
    std::vector<std::size_t> labels_rev;
    for (std::uint32_t at = pair_idx; at != 0; at = info[at].parent) {
      labels_rev.push_back(info[at].label);
    }
    Trace t(a.universe());
    for (auto it = labels_rev.rbegin(); it != labels_rev.rend(); ++it) {
      t.push_back_bits(a.label_bits_of_index(*it));
    }
    return t;
  };

  auto add_pair = [&](TraceAutomaton::StateId x, TraceAutomaton::StateId y,
                      std::uint32_t parent, std::uint32_t label) {
    auto [it, inserted] =
        seen.emplace(key(x, y), static_cast<std::uint32_t>(pairs.size()));
    if (!inserted) return std::optional<std::uint32_t>{};
    pairs.emplace_back(x, y);
    info.push_back({parent, label});
    return std::optional<std::uint32_t>{it->second};
  };

  add_pair(a.initial_state(), b.initial_state(), 0, 0);
  if (a.is_accepting(a.initial_state()) != b.is_accepting(b.initial_state())) {
    EquivalenceResult r;
    r.equivalent = false;
    r.witness = Trace(a.universe());  // the empty trace distinguishes them
    return r;
  }
  // Breadth-first product walk with labels in enumeration order, so the
  // first differing pair found is reached by the lexicographically least
  // shortest label sequence.
  for (std::uint32_t head = 0; head < pairs.size(); ++head) {
    auto [x, y] = pairs[head];
    for (std::size_t li = 0; li < labels; ++li) {
      TraceAutomaton::StateId nx = a.next_state(x, li);
      TraceAutomaton::StateId ny = b.next_state(y, li);
      auto added =
          add_pair(nx, ny, head, static_cast<std::uint32_t>(li));
      if (added && a.is_accepting(nx) != b.is_accepting(ny)) {
        EquivalenceResult r;
        r.equivalent = false;
        r.witness = make_witness(*added);
        return r;
      }
    }
  }
  EquivalenceResult r;
  r.equivalent = true;
  return r;
}

EquivalenceResult check_equivalence(const Formula& f, const Formula& g,
                                    const std::vector<std::string>& universe,
                                    AlphabetMode mode, std::size_t state_cap) {
  TraceAutomaton a = compile(f, universe, mode, state_cap);
  TraceAutomaton b = compile(g, universe, mode, state_cap);
  return check_equivalence(a, b);
}

bool are_equivalent(const Formula& f, const Formula& g,
                    const std::vector<std::string>& universe,
                    AlphabetMode mode, std::size_t state_cap) {
  return check_equivalence(f, g, universe, mode, state_cap).equivalent;
}

AutomatonCache::AutomatonCache(std::vector<std::string> universe,
                               AlphabetMode mode, std::size_t state_cap)
    : universe_(std::move(universe)), mode_(mode), state_cap_(state_cap) {}

std::shared_ptr<const TraceAutomaton> AutomatonCache::automaton(
    const Formula& f) {
  Formula key = ltl::canonicalize(f);
  auto it = automata_.find(key);
  if (it != automata_.end()) return it->second;
  auto built = std::make_shared<TraceAutomaton>(
      compile(key, universe_, mode_, state_cap_));
  automata_.emplace(std::move(key), built);
  return built;
}

bool AutomatonCache::are_equivalent(const Formula& f, const Formula& g) {
  ++equivalence_queries_;
  Formula cf = ltl::canonicalize(f);
  Formula cg = ltl::canonicalize(g);
  if (cf == cg) return true;
  if (Formula::compare(cg, cf) < 0) std::swap(cf, cg);
  auto key = std::make_pair(cf, cg);
  auto it = verdicts_.find(key);
  if (it != verdicts_.end()) {
    ++equivalence_cache_hits_;
    return it->second;
  }
  bool eq = check_equivalence(*automaton(cf), *automaton(cg)).equivalent;
  verdicts_.emplace(std::move(key), eq);
  return eq;
}

}  // namespace plansafe::automaton
