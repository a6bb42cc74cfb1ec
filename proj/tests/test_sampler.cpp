#include <doctest.h>

#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "corrpost/errors.hpp"
#include "corrpost/posterior.hpp"
#include "corrpost/sampler.hpp"

using namespace corrpost;

namespace {

Hyperparameters make_eta(double alpha, double beta = 0.0) {
  return alpha == 0.0 ? Hyperparameters::alpha_limit(beta, 0, 0)
                      : Hyperparameters(alpha, beta, 0, 0);
}

PosteriorModel make_model(long n, double r, double alpha, double beta = 0.0) {
  return PosteriorModel(SufficientStats::from_summary(n, r), make_eta(alpha, beta));
}

double log_sech2(double z) { return std::log(1.0 - std::tanh(z) * std::tanh(z)); }

}  // namespace

TEST_CASE("Rng is the pinned mt19937_64 stream") {
  // The C++ standard fixes the 10000th output of a default-seeded engine.
  std::mt19937_64 ref(5489u);
  ref.discard(9999);
  CHECK(ref() == 9981545732273789042ull);

  Rng a(42), b(42);
  std::mt19937_64 raw(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u == (static_cast<double>(raw() >> 11) + 0.5) * 0x1.0p-53);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("Rng normals have unit variance") {
  Rng g(7);
  const int n = 200000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::fabs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::fabs(ss / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("independence Metropolis matches the exact 3-state transition matrix") {
  // Target p and proposal q on {0, 1, 2}.
  const std::array<double, 3> p{0.2, 0.5, 0.3};
  const std::array<double, 3> q{0.5, 0.25, 0.25};
  // Exact IMH kernel: P(i→j) = q_j min(1, w_j / w_i), w = p / q.
  std::array<std::array<double, 3>, 3> exact{};
  for (int i = 0; i < 3; ++i) {
    double stay = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j == i) continue;
      exact[i][j] = q[j] * std::min(1.0, (p[j] / q[j]) / (p[i] / q[i]));
      stay -= exact[i][j];
    }
    exact[i][i] = stay;
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(p[i] * exact[i][j] == doctest::Approx(p[j] * exact[j][i]).epsilon(1e-14));
    }
  }

  Rng rng(2718);
  int state = 0;
  double lw = std::log(p[0] / q[0]);
  std::array<std::array<double, 3>, 3> counts{};
  std::array<double, 3> visits{};
  int prev = state;
  auto propose = [&](Rng& g) {
    const double u = g.uniform();
    return u < q[0] ? 0 : (u < q[0] + q[1] ? 1 : 2);
  };
  auto weight = [&](int s) { return std::log(p[s] / q[s]); };
  auto visit = [&](int s, bool) {
    counts[prev][s] += 1.0;
    visits[prev] += 1.0;
    prev = s;
  };
  const std::size_t steps = 400000;
  independence_metropolis(state, lw, steps, rng, propose, weight, visit);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double est = counts[i][j] / visits[i];
      const double se = std::sqrt(exact[i][j] * (1 - exact[i][j]) / visits[i]);
      CHECK(std::fabs(est - exact[i][j]) <= 5.0 * se + 1e-12);
    }
  }
}

TEST_CASE("IMH weight uses the rho-scale proposal density with its Jacobian") {
  const PosteriorModel m = make_model(10, 0.6, 1.0);
  const ChainConfig cfg = ChainConfig::for_model(m, 10, 0, 1);
  CHECK(cfg.proposal_mean == doctest::Approx(std::atanh(0.6)).epsilon(1e-15));
  CHECK(cfg.proposal_sd == doctest::Approx(1.0 / std::sqrt(10.0)).epsilon(1e-15));
  for (double z : {-0.5, 0.2, 0.7, 1.4}) {
    const double rho = std::tanh(z);
    const double std_z = (z - cfg.proposal_mean) / cfg.proposal_sd;
    const double log_q_rho = -0.5 * std_z * std_z - log_sech2(z);
    const double expected = m.log_kernel(rho, log_sech2(z)) - log_q_rho;
    CHECK(imh_log_weight(m, cfg, z) == doctest::Approx(expected).epsilon(1e-10));
    // The forbidden z-scale variant drops -ln(1 - ρ²) from ln q.
    const double no_jacobian = m.log_kernel(rho, log_sech2(z)) + 0.5 * std_z * std_z;
    CHECK(std::fabs(imh_log_weight(m, cfg, z) - no_jacobian) > 1e-3);
  }
}

TEST_CASE("chains are reproducible and well-formed") {
  const PosteriorModel m = make_model(10, 0.6, 1.0);
  const ChainConfig cfg = ChainConfig::for_model(m, 5000, 200, 99);
  const ChainResult a = run_chain(m, cfg);
  const ChainResult b = run_chain(m, cfg);
  REQUIRE(a.draws.size() == 5000);
  CHECK(std::memcmp(a.draws.data(), b.draws.data(), a.draws.size() * sizeof(double)) == 0);
  CHECK(a.accepted <= 5000);
  CHECK(a.acceptance_rate == static_cast<double>(a.accepted) / 5000.0);
  for (double d : a.draws) {
    CHECK(d > -1.0);
    CHECK(d < 1.0);
  }
  const ChainResult c = run_chain(m, ChainConfig::for_model(m, 5000, 200, 100));
  CHECK(std::memcmp(a.draws.data(), c.draws.data(), a.draws.size() * sizeof(double)) != 0);
}

TEST_CASE("chain config validation") {
  ChainConfig cfg;
  cfg.n_draws = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.n_draws = 10;
  cfg.proposal_sd = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("symmetric target: mean draw within 3 SE of zero") {
  const PosteriorModel m = make_model(10, 0.0, 1.0);
  const ChainResult res = run_chain(m, ChainConfig::for_model(m, 40000, 1000, 4));
  const DrawSummary s = summarize_draws(res.draws);
  CHECK(std::fabs(s.mean) <= 3.0 * s.standard_error);
}

TEST_CASE("draw moments match analytic moments (reduced grid)") {
  std::uint64_t seed = 1000;
  for (long n : {10L, 50L}) {
    for (double r : {0.0, 0.6}) {
      for (double alpha : {0.0, 1.0}) {
        const PosteriorModel m = make_model(n, r, alpha);
        const ChainResult res = run_chain(m, ChainConfig::for_model(m, 40000, 1000, ++seed));
        std::vector<double> sq(res.draws.size());
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = res.draws[i] * res.draws[i];
        const DrawSummary s1 = summarize_draws(res.draws);
        const DrawSummary s2 = summarize_draws(sq);
        INFO("n=" << n << " r=" << r << " alpha=" << alpha);
        CHECK(std::fabs(s1.mean - moments_beta0(m, 1).value) <= 4.0 * s1.standard_error);
        CHECK(std::fabs(s2.mean - moments_beta0(m, 2).value) <= 4.0 * s2.standard_error);
      }
    }
  }
}

TEST_CASE("general-beta target is sampled too") {
  const PosteriorModel m = make_model(10, 0.6, 0.0, 1.0);
  const ChainResult res = run_chain(m, ChainConfig::for_model(m, 40000, 1000, 77));
  const DrawSummary s = summarize_draws(res.draws);
  CHECK(std::fabs(s.mean - moment_general(m, 1).value) <= 4.0 * s.standard_error);
}

TEST_CASE("batch-means summary of a known sequence") {
  std::vector<double> x(100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i % 2);
  const DrawSummary s = summarize_draws(x, 10);
  CHECK(s.mean == 0.5);
  CHECK(s.standard_error == 0.0);
  CHECK(summarize_draws({}).mean == 0.0);
}
