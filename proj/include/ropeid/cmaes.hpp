#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ropeid/rng.hpp"

namespace ropeid {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct CmaesConfig {
  int dimension = 0;
  int lambda = 60;  // population size
  VectorXd initial_mean;
  double sigma0 = 0.3;
  int max_iterations = 50;
  std::optional<double> target_fitness;
  std::optional<VectorXd> lower;
  std::optional<VectorXd> upper;
  std::uint64_t seed = 0;
  // Objective exceptions become this fitness instead of aborting.
  bool penalize_failures = true;
  double failure_fitness = 1e6;
  int eval_threads = 0;  // 0 -> worker_count()

  void check() const;
};

struct CmaesHistoryRow {
  int iteration = 0;
  double best = 0.0;          // best-so-far fitness
  double mean_fitness = 0.0;  // mean fitness of the generation
  double sigma = 0.0;
};

struct CmaesState {
  VectorXd mean;
  MatrixXd covariance;
  double sigma = 0.0;
  VectorXd path_sigma;
  VectorXd path_c;
  int iteration = 0;
  long evaluations = 0;
  VectorXd best_point;
  double best_fitness = std::numeric_limits<double>::infinity();
  Rng rng{0};
  // samples of the current generation (y = pre-clamp step in search space,
  // x = clamped candidate handed to the objective)
  std::vector<VectorXd> gen_steps;
  std::vector<VectorXd> gen_candidates;

  static CmaesState init(const CmaesConfig& config);
};

// Samples lambda candidates from N(mean, sigma^2 C). Candidates are clamped
// to the box componentwise; the pre-clamp steps stay in the state for the
// update.
std::vector<VectorXd> ask(CmaesState& state, const CmaesConfig& config);

// Standard weighted-recombination mean update, cumulative step-size
// adaptation, rank-1 + rank-mu covariance update. Throws on non-finite
// fitness.
void tell(CmaesState& state, const std::vector<double>& fitnesses, const CmaesConfig& config);

struct CmaesResult {
  VectorXd best_point;
  double best_fitness = 0.0;
  std::vector<CmaesHistoryRow> history;
  long evaluations = 0;
};

// Full ask/evaluate/tell loop. Objective evaluations within one generation
// run in parallel; the result is identical for any worker count.
CmaesResult minimize(const std::function<double(const VectorXd&)>& objective,
                     const CmaesConfig& config);

// CSV with header iteration,best,mean_fitness,sigma.
void export_history_csv(const std::vector<CmaesHistoryRow>& history, const std::string& path);

}  // namespace ropeid
