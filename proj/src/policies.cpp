#include "plansafe/policies.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>

#include "json.hpp"
#include "plansafe/error.hpp"

namespace plansafe::decoding {

ActionDistribution normalize_weights(std::vector<WeightedAction> weights) {
  return ActionDistribution(std::move(weights));
}

ActionDistribution UniformPolicy::propose(const PolicyContext& ctx) {
  std::vector<WeightedAction> entries;
  entries.reserve(ctx.candidates.size());
  for (const std::string& a : ctx.candidates) {
    entries.push_back(WeightedAction{a, 1.0});
  }
  return normalize_weights(std::move(entries));
}

ActionDistribution GreedyNearestPolicy::propose(const PolicyContext& ctx) {
  const env::Environment& e = ctx.environment;
  const env::Vec3 from = e.position_of(ctx.state);
  std::vector<WeightedAction> entries;
  entries.reserve(ctx.candidates.size());
  for (const std::string& text : ctx.candidates) {
    if (text == env::kDoneToken) {
      entries.push_back(WeightedAction{text, done_weight_});
      continue;
    }
    const auto id = e.find_action(text);
    if (!id) {
      throw Error(ErrorCode::invalid_action,
                  "candidate not in the environment vocabulary: " + text);
    }
    const env::Action& a = e.actions()[*id];
    double travel = 0.0;
    if (e.kind() == env::DomainKind::navigation) {
      travel = env::distance(
          from, e.landmarks()[static_cast<std::size_t>(a.target)].position);
    } else {
      const env::Vec3 blk =
          e.blocks()[static_cast<std::size_t>(a.target)].position;
      const env::Vec3 box =
          e.boxes()[static_cast<std::size_t>(a.box)].position;
      travel = env::distance(from, blk) + env::distance(blk, box);
    }
    entries.push_back(WeightedAction{text, 1.0 / (0.1 + travel)});
  }
  return normalize_weights(std::move(entries));
}

ScriptedPolicy::ScriptedPolicy(std::vector<std::vector<WeightedAction>> rows)
    : rows_(std::move(rows)) {}

ScriptedPolicy::ScriptedPolicy(const std::vector<std::string>& actions) {
  for (const std::string& a : actions) {
    rows_.push_back({WeightedAction{a, 1.0}});
  }
}

ActionDistribution ScriptedPolicy::propose(const PolicyContext& ctx) {
  const std::size_t step = ctx.history.size();
  if (step >= rows_.size()) {
    return UniformPolicy().propose(ctx);
  }
  std::vector<WeightedAction> row;
  for (const WeightedAction& w : rows_[step]) {
    if (w.probability > 0.0) row.push_back(w);
  }
  return normalize_weights(std::move(row));
}

SubprocessPolicy::SubprocessPolicy(std::vector<std::string> command)
    : command_(std::move(command)) {
  if (command_.empty()) {
    throw Error(ErrorCode::generic, "subprocess policy needs a command");
  }
  start();
}

SubprocessPolicy::~SubprocessPolicy() { shutdown(); }

void SubprocessPolicy::start() {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0) {
    throw Error(ErrorCode::io_error,
                std::string("pipe failed: ") + std::strerror(errno));
  }
  pid_ = fork();
  if (pid_ < 0) {
    throw Error(ErrorCode::io_error,
                std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid_ == 0) {
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    std::vector<char*> argv;
    argv.reserve(command_.size() + 1);
    for (std::string& s : command_) argv.push_back(s.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    std::perror("execvp");
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  to_child_ = to_child[1];
  from_child_ = fdopen(from_child[0], "r");
  if (!from_child_) {
    shutdown();
    throw Error(ErrorCode::io_error, "fdopen failed");
  }
}

void SubprocessPolicy::shutdown() noexcept {
  if (to_child_ >= 0) {
    close(to_child_);
    to_child_ = -1;
  }
  if (from_child_) {
    std::fclose(from_child_);
    from_child_ = nullptr;
  }
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

ActionDistribution SubprocessPolicy::propose(const PolicyContext& ctx) {
  nlohmann::ordered_json request;
  request["type"] = "propose";
  request["environment"] = env::description_text(ctx.environment);
  request["task"] = std::string(ctx.task_text);
  request["history"] = ctx.history;
  request["candidates"] = ctx.candidates;
  const std::string line = request.dump() + "\n";

  const char* data = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const ssize_t n = write(to_child_, data, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::protocol_error,
                  std::string("policy subprocess write failed: ") +
                      std::strerror(errno));
    }
    data += n;
    left -= static_cast<std::size_t>(n);
  }

  std::string reply;
  for (int c = std::fgetc(from_child_); c != EOF && c != '\n';
       c = std::fgetc(from_child_)) {
    reply.push_back(static_cast<char>(c));
  }
  if (reply.empty()) {
    throw Error(ErrorCode::protocol_error,
                "policy subprocess closed the stream or sent an empty reply");
  }

  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(reply);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::protocol_error,
                std::string("policy subprocess sent invalid JSON: ") +
                    e.what());
  }
  std::vector<WeightedAction> weights;
  try {
    for (const auto& entry : parsed.at("weights")) {
      weights.push_back(WeightedAction{entry.at("action").get<std::string>(),
                                       entry.at("weight").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::protocol_error,
                std::string("policy subprocess reply malformed: ") + e.what());
  }
  try {
    return normalize_weights(std::move(weights));
  } catch (const Error& e) {
    throw Error(ErrorCode::protocol_error,
                std::string("policy subprocess weights invalid: ") + e.what());
  }
}

}  // namespace plansafe::decoding
