#include "ropeid/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "ropeid/parallel.hpp"

namespace ropeid {

namespace {

// Strategy constants per Hansen's tutorial formulation.
struct Constants {
  int n = 0, lambda = 0, mu = 0;
  VectorXd weights;
  double mu_eff = 0.0, c_sigma = 0.0, d_sigma = 0.0, c_c = 0.0, c_1 = 0.0, c_mu = 0.0, chi_n = 0.0;

  explicit Constants(const CmaesConfig& cfg) {
    n = cfg.dimension;
    lambda = cfg.lambda;
    mu = lambda / 2;
    weights.resize(mu);
    for (int i = 0; i < mu; ++i) weights[i] = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    weights /= weights.sum();
    mu_eff = 1.0 / weights.squaredNorm();
    c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
    d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
    c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
    c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
    c_mu = std::min(1.0 - c_1,
                    2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((n + 2.0) * (n + 2.0) + mu_eff));
    chi_n = std::sqrt(static_cast<double>(n)) *
            (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  }
};

// Symmetric eigendecomposition with eigenvalue floor repair.
void decompose(const MatrixXd& c, MatrixXd& basis, VectorXd& scale) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(0.5 * (c + c.transpose()));
  basis = solver.eigenvectors();
  scale = solver.eigenvalues().cwiseMax(1e-14).cwiseSqrt();
}

}  // namespace

void CmaesConfig::check() const {
  if (dimension < 1) throw std::invalid_argument("cmaes: dimension must be >= 1");
  if (lambda < 4) throw std::invalid_argument("cmaes: lambda must be >= 4");
  if (sigma0 <= 0.0) throw std::invalid_argument("cmaes: sigma0 must be positive");
  if (initial_mean.size() != dimension)
    throw std::invalid_argument("cmaes: initial_mean size must equal dimension");
  if (lower.has_value() != upper.has_value())
    throw std::invalid_argument("cmaes: bounds must be given as a pair");
  if (lower) {
    if (lower->size() != dimension || upper->size() != dimension)
      throw std::invalid_argument("cmaes: bound size must equal dimension");
    if (((*upper - *lower).array() <= 0.0).any())
      throw std::invalid_argument("cmaes: bounds must satisfy lower < upper");
  }
}

CmaesState CmaesState::init(const CmaesConfig& config) {
  config.check();
  CmaesState s;
  s.mean = config.initial_mean;
  s.covariance = MatrixXd::Identity(config.dimension, config.dimension);
  s.sigma = config.sigma0;
  s.path_sigma = VectorXd::Zero(config.dimension);
  s.path_c = VectorXd::Zero(config.dimension);
  s.best_point = config.initial_mean;
  s.rng = Rng(config.seed);
  return s;
}

std::vector<VectorXd> ask(CmaesState& state, const CmaesConfig& config) {
  const int n = config.dimension;
  MatrixXd basis;
  VectorXd scale;
  decompose(state.covariance, basis, scale);

  state.gen_steps.assign(config.lambda, VectorXd(n));
  state.gen_candidates.assign(config.lambda, VectorXd(n));
  std::vector<VectorXd> out(config.lambda);
  for (int k = 0; k < config.lambda; ++k) {
    VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = state.rng.normal();
    const VectorXd y = basis * (scale.asDiagonal() * z);
    VectorXd x = state.mean + state.sigma * y;
    if (config.lower) x = x.cwiseMax(*config.lower).cwiseMin(*config.upper);
    state.gen_steps[k] = y;
    state.gen_candidates[k] = x;
    out[k] = x;
  }
  return out;
}

void tell(CmaesState& state, const std::vector<double>& fitnesses, const CmaesConfig& config) {
  const Constants c(config);
  if (static_cast<int>(fitnesses.size()) != config.lambda)
    throw std::invalid_argument("tell: expected lambda fitness values");
  for (double f : fitnesses)
    if (!std::isfinite(f)) throw std::invalid_argument("tell: non-finite fitness");
  if (static_cast<int>(state.gen_steps.size()) != config.lambda)
    throw std::logic_error("tell: call ask first");

  std::vector<int> order(config.lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return fitnesses[a] < fitnesses[b]; });

  if (fitnesses[order[0]] < state.best_fitness) {
    state.best_fitness = fitnesses[order[0]];
    state.best_point = state.gen_candidates[order[0]];
  }

  VectorXd y_w = VectorXd::Zero(config.dimension);
  for (int i = 0; i < c.mu; ++i) y_w += c.weights[i] * state.gen_steps[order[i]];
  state.mean += state.sigma * y_w;

  MatrixXd basis;
  VectorXd scale;
  decompose(state.covariance, basis, scale);
  const VectorXd c_inv_sqrt_yw =
      basis * scale.cwiseInverse().asDiagonal() * (basis.transpose() * y_w);

  state.path_sigma = (1.0 - c.c_sigma) * state.path_sigma +
                     std::sqrt(c.c_sigma * (2.0 - c.c_sigma) * c.mu_eff) * c_inv_sqrt_yw;
  const double ps_norm = state.path_sigma.norm();
  const double expected = std::sqrt(1.0 - std::pow(1.0 - c.c_sigma, 2.0 * (state.iteration + 1)));
  const bool h_sigma = ps_norm / expected < (1.4 + 2.0 / (config.dimension + 1.0)) * c.chi_n;

  state.path_c = (1.0 - c.c_c) * state.path_c;
  if (h_sigma) state.path_c += std::sqrt(c.c_c * (2.0 - c.c_c) * c.mu_eff) * y_w;

  MatrixXd rank_mu = MatrixXd::Zero(config.dimension, config.dimension);
  for (int i = 0; i < c.mu; ++i) {
    const VectorXd& y = state.gen_steps[order[i]];
    rank_mu += c.weights[i] * y * y.transpose();
  }
  const double delta_h = h_sigma ? 0.0 : c.c_c * (2.0 - c.c_c);
  state.covariance = (1.0 - c.c_1 - c.c_mu) * state.covariance +
                     c.c_1 * (state.path_c * state.path_c.transpose() + delta_h * state.covariance) +
                     c.c_mu * rank_mu;
  state.covariance = 0.5 * (state.covariance + state.covariance.transpose());

  state.sigma *= std::exp((c.c_sigma / c.d_sigma) * (ps_norm / c.chi_n - 1.0));
  state.iteration += 1;
  state.evaluations += config.lambda;
  state.gen_steps.clear();
  state.gen_candidates.clear();
}

CmaesResult minimize(const std::function<double(const VectorXd&)>& objective,
                     const CmaesConfig& config) {
  CmaesState state = CmaesState::init(config);
  CmaesResult result;
  for (int it = 0; it < config.max_iterations; ++it) {
    const std::vector<VectorXd> candidates = ask(state, config);
    std::vector<double> fitnesses(candidates.size(), 0.0);
    parallel_for(
        candidates.size(),
        [&](std::size_t k) {
          try {
            fitnesses[k] = objective(candidates[k]);
          } catch (...) {
            if (!config.penalize_failures) throw;
            fitnesses[k] = config.failure_fitness;
          }
        },
        config.eval_threads);
    for (double& f : fitnesses)
      if (!std::isfinite(f)) f = config.failure_fitness;
    const double gen_mean =
        std::accumulate(fitnesses.begin(), fitnesses.end(), 0.0) / fitnesses.size();
    tell(state, fitnesses, config);
    result.history.push_back({state.iteration, state.best_fitness, gen_mean, state.sigma});
    if (config.target_fitness && state.best_fitness <= *config.target_fitness) break;
  }
  result.best_point = state.best_point;
  result.best_fitness = state.best_fitness;
  result.evaluations = state.evaluations;
  return result;
}

void export_history_csv(const std::vector<CmaesHistoryRow>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_history_csv: cannot open " + path);
  out << "iteration,best,mean_fitness,sigma\n";
  char buf[128];
  for (const auto& row : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%.12g,%.12g\n", row.iteration, row.best,
                  row.mean_fitness, row.sigma);
    out << buf;
  }
}

}  // namespace ropeid
