#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "corrpost/parallel.hpp"
#include "corrpost/posterior.hpp"

namespace corrpost {

/// Reproducible random source: std::mt19937_64, 53-bit uniforms on (0, 1),
/// Box-Muller normals. Every step is spelled out here so a seed produces the
/// same stream on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * 3.14159265358979323846 * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independence-chain Metropolis-Hastings on a generic state space.
///
/// log_weight(x) must return ln target(x) - ln proposal(x), both densities
/// taken with respect to the same base measure. Calls visit(state, accepted)
/// after every step and returns the number of accepted proposals.
template <class State, class Propose, class LogWeight, class Visit>
std::size_t independence_metropolis(State& state, double& state_log_weight, std::size_t steps,
                                    Rng& rng, Propose&& propose, LogWeight&& log_weight,
                                    Visit&& visit) {
  std::size_t accepted = 0;
  for (std::size_t i = 0; i < steps; ++i) {
    State candidate = propose(rng);
    const double candidate_log_weight = log_weight(candidate);
    const double log_ratio = candidate_log_weight - state_log_weight;
    bool accept = log_ratio >= 0.0;
    if (!accept) accept = std::log(rng.uniform()) < log_ratio;
    if (accept) {
      state = candidate;
      state_log_weight = candidate_log_weight;
      ++accepted;
    }
    visit(state, accept);
  }
  return accepted;
}

struct ChainConfig {
  std::size_t n_draws = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  double proposal_mean = 0.0;  // Fisher-z units
  double proposal_sd = 1.0;    // Fisher-z units

  /// Proposal N(atanh(r), (scale / sqrt(n))^2) for the given model.
  static ChainConfig for_model(const PosteriorModel& model, std::size_t n_draws,
                               std::size_t burn_in, std::uint64_t seed, double sd_scale = 1.0);

  void validate() const;
};

struct ChainResult {
  std::vector<double> draws;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;  // accepted / n_draws, burn-in excluded
  ChainConfig config;
};

/// ln target - ln proposal at rho = tanh(z), both on the rho scale: the
/// proposal density in rho carries the Jacobian 1 / (1 - rho²).
double imh_log_weight(const PosteriorModel& model, const ChainConfig& cfg, double z);

/// Runs one chain started at rho = tanh(proposal_mean).
ChainResult run_chain(const PosteriorModel& model, const ChainConfig& cfg);

/// Independent chains, one per config; results are in input order and do
/// not depend on exec.
std::vector<ChainResult> run_chains(const PosteriorModel& model,
                                    const std::vector<ChainConfig>& configs,
                                    Exec exec = Exec::Serial);

/// Mean and batch-means standard error of a sequence of draws.
struct DrawSummary {
  double mean = 0.0;
  double standard_error = 0.0;
};
DrawSummary summarize_draws(const std::vector<double>& x, std::size_t batches = 50);

}  // namespace corrpost
