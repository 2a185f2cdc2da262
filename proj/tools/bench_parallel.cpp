// Benchmark comparing the OpenMP-parallel batch driver against the serial
// reference loop on the toolkit's two batch workloads: corpus generation
// and corpus evaluation. Results must agree exactly; only wall time may
// differ.

#include <chrono>
#include <cstdio>
#include <string>

#include "plansafe/datagen.hpp"
#include "plansafe/evaluation.hpp"
#include "plansafe/parallel.hpp"
#include "plansafe/parser.hpp"
#include "plansafe/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double time_generation(const plansafe::datagen::CorpusConfig& config,
                       bool serial, std::string* digest) {
  Clock::time_point start = Clock::now();
  plansafe::datagen::Corpus corpus;
  if (serial) {
    // Equivalent record-by-record serial loop.
    corpus.environments.reserve(config.environments);
    for (std::size_t i = 0; i < config.environments; ++i) {
      corpus.environments.push_back(plansafe::env::random_environment(
          config.domain, plansafe::mix_seed(config.seed, 1000000 + i)));
    }
    for (std::size_t i = 0; i < config.environments; ++i) {
      for (std::size_t j = 0; j < config.records_per_environment; ++j) {
        plansafe::datagen::TaskRecord record = plansafe::datagen::make_task(
            corpus.environments[i], 1 + (j % 5),
            plansafe::mix_seed(config.seed,
                               i * config.records_per_environment + j));
        record.environment_id = i;
        corpus.records.push_back(std::move(record));
      }
    }
  } else {
    corpus = plansafe::datagen::generate_corpus(config);
  }
  double elapsed = seconds_since(start);
  std::string d;
  for (const plansafe::datagen::TaskRecord& record : corpus.records) {
    d += plansafe::ltl::render_prefix(
        plansafe::datagen::grounded_spec(record));
    d += '\n';
  }
  *digest = std::move(d);
  return elapsed;
}

double time_evaluation(const plansafe::datagen::Corpus& corpus, bool serial,
                       std::string* digest) {
  plansafe::evaluation::EvaluationConfig config;
  config.planner = plansafe::evaluation::PlannerKind::constrained;
  config.seed = 12;
  config.serial = serial;
  Clock::time_point start = Clock::now();
  plansafe::evaluation::EvaluationReport report =
      plansafe::evaluation::evaluate(corpus, config);
  double elapsed = seconds_since(start);
  std::string d;
  for (const plansafe::evaluation::TaskOutcome& outcome : report.outcomes) {
    d += outcome.safe ? 'S' : '-';
    d += std::to_string(outcome.cost);
    d += '\n';
  }
  *digest = std::move(d);
  return elapsed;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t environments = 40;
  if (argc > 1) environments = static_cast<std::size_t>(std::stoul(argv[1]));

  plansafe::datagen::CorpusConfig config;
  config.environments = environments;
  config.records_per_environment = 5;
  config.seed = 21;

  std::printf("workload: %zu environments x %zu records\n",
              config.environments, config.records_per_environment);

  std::string serial_digest, parallel_digest;
  double gen_serial = time_generation(config, true, &serial_digest);
  double gen_parallel = time_generation(config, false, &parallel_digest);
  bool gen_match = serial_digest == parallel_digest;
  std::printf("generation   serial %.3fs   parallel %.3fs   speedup %.2fx"
              "   results %s\n",
              gen_serial, gen_parallel, gen_serial / gen_parallel,
              gen_match ? "identical" : "MISMATCH");

  plansafe::datagen::Corpus corpus =
      plansafe::datagen::generate_corpus(config);
  double eval_serial = time_evaluation(corpus, true, &serial_digest);
  double eval_parallel = time_evaluation(corpus, false, &parallel_digest);
  bool eval_match = serial_digest == parallel_digest;
  std::printf("evaluation   serial %.3fs   parallel %.3fs   speedup %.2fx"
              "   results %s\n",
              eval_serial, eval_parallel, eval_serial / eval_parallel,
              eval_match ? "identical" : "MISMATCH");

  return gen_match && eval_match ? 0 : 1;
}
