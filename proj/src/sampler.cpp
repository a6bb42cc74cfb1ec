#include "corrpost/sampler.hpp"

#include <numbers>
#include <sstream>

#include "corrpost/errors.hpp"

namespace corrpost {

namespace {

double log_sech2(double z) {
  const double az = std::fabs(z);
  return -2.0 * (az + std::log1p(std::exp(-2.0 * az)) - std::numbers::ln2);
}

}  // namespace

ChainConfig ChainConfig::for_model(const PosteriorModel& model, std::size_t n_draws,
                                   std::size_t burn_in, std::uint64_t seed, double sd_scale) {
  ChainConfig cfg;
  cfg.n_draws = n_draws;
  cfg.burn_in = burn_in;
  cfg.seed = seed;
  cfg.proposal_mean = model.z_center();
  cfg.proposal_sd = sd_scale * model.z_scale();
  cfg.validate();
  return cfg;
}

void ChainConfig::validate() const {
  if (n_draws < 1) throw DomainError("chain: n_draws must be >= 1");
  if (!(proposal_sd > 0.0) || !std::isfinite(proposal_sd)) {
    throw DomainError("chain: proposal_sd must be > 0");
  }
  if (!std::isfinite(proposal_mean)) throw DomainError("chain: proposal_mean must be finite");
}

double imh_log_weight(const PosteriorModel& model, const ChainConfig& cfg, double z) {
  const double rho = std::tanh(z);
  const double log1m = log_sech2(z);
  const double std_z = (z - cfg.proposal_mean) / cfg.proposal_sd;
  // ln q_rho(rho) = ln phi(std_z) - ln sd - ln(1 - rho²); constants dropped.
  const double log_proposal = -0.5 * std_z * std_z - log1m;
  return model.log_kernel(rho, log1m) - log_proposal;
}

ChainResult run_chain(const PosteriorModel& model, const ChainConfig& cfg) {
  cfg.validate();
  ChainResult result;
  result.config = cfg;
  result.draws.reserve(cfg.n_draws);

  Rng rng(cfg.seed);
  double z = cfg.proposal_mean;
  double log_w = imh_log_weight(model, cfg, z);
  std::size_t step = 0;
  std::size_t accepted_after_burn_in = 0;

  auto propose = [&cfg](Rng& g) { return cfg.proposal_mean + cfg.proposal_sd * g.normal(); };
  auto weight = [&model, &cfg](double cand) { return imh_log_weight(model, cfg, cand); };
  auto visit = [&](double state, bool accepted) {
    if (step >= cfg.burn_in) {
      result.draws.push_back(std::tanh(state));
      if (accepted) ++accepted_after_burn_in;
    }
    ++step;
  };

  try {
    independence_metropolis(z, log_w, cfg.burn_in + cfg.n_draws, rng, propose, weight, visit);
  } catch (const NonConvergence& e) {
    std::ostringstream os;
    os << "chain aborted after " << step << " steps (" << result.draws.size()
       << " draws kept): " << e.what();
    throw NonConvergence(os.str(), e.terms_used());
  }

  result.accepted = accepted_after_burn_in;
  result.acceptance_rate =
      static_cast<double>(accepted_after_burn_in) / static_cast<double>(cfg.n_draws);
  return result;
}

std::vector<ChainResult> run_chains(const PosteriorModel& model,
                                    const std::vector<ChainConfig>& configs, Exec exec) {
  std::vector<ChainResult> out(configs.size());
  auto one = [&](int i) { out[i] = run_chain(model, configs[i]); };
  const int count = static_cast<int>(configs.size());
  if (exec == Exec::Parallel) {
    parallel_for(count, one);
  } else {
    for (int i = 0; i < count; ++i) one(i);
  }
  return out;
}

DrawSummary summarize_draws(const std::vector<double>& x, std::size_t batches) {
  DrawSummary s;
  if (x.empty()) return s;
  double total = 0.0;
  for (double v : x) total += v;
  s.mean = total / static_cast<double>(x.size());
  const std::size_t size = x.size() / batches;
  if (batches < 2 || size < 1) return s;
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double bm = 0.0;
    for (std::size_t i = 0; i < size; ++i) bm += x[b * size + i];
    bm /= static_cast<double>(size);
    ss += (bm - s.mean) * (bm - s.mean);
  }
  const double var_batch = ss / static_cast<double>(batches - 1);
  s.standard_error = std::sqrt(var_batch / static_cast<double>(batches));
  return s;
}

}  // namespace corrpost
