// Serial reference vs OpenMP kernels: wall time and bit-identity.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "corrpost/oracle.hpp"
#include "corrpost/parallel.hpp"
#include "corrpost/posterior.hpp"
#include "corrpost/sampler.hpp"

using namespace corrpost;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

template <class T>
bool same_bits(const std::vector<T>& a, const std::vector<T>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(T)) == 0;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  identical %s\n", name,
              serial, parallel, serial / parallel, identical ? "yes" : "NO");
}

}  // namespace

int main() {
  std::printf("OpenMP threads: %d\n", max_threads());
  const int reps = 3;

  {
    const PosteriorModel model(SufficientStats::from_summary(50, 0.6),
                               Hyperparameters(0.5, 1.0, 0.0, 0.0));
    const auto rhos = uniform_rho_grid(20001);
    std::vector<double> s, p;
    const double ts = best_of(reps, [&] { s = density_grid(model, rhos, Exec::Serial); });
    const double tp = best_of(reps, [&] { p = density_grid(model, rhos, Exec::Parallel); });
    report("density grid (20001, beta=1)", ts, tp, same_bits(s, p));
  }

  {
    const SufficientStats y = SufficientStats::from_summary(5, 0.6);
    oracle::TheoremOptions so{1e-10, Exec::Serial};
    oracle::TheoremOptions po{1e-10, Exec::Parallel};
    double vs = 0.0, vp = 0.0;
    const double ts = best_of(reps, [&] { vs = oracle::integrate_theorem(y, -1, 1, 0.4, so).value; });
    const double tp = best_of(reps, [&] { vp = oracle::integrate_theorem(y, -1, 1, 0.4, po).value; });
    report("4D oracle (rel 1e-10)", ts, tp, std::memcmp(&vs, &vp, sizeof vs) == 0);
  }

  {
    const PosteriorModel model(SufficientStats::from_summary(10, 0.6),
                               Hyperparameters(1.0, 0.0, 0.0, 0.0));
    std::vector<ChainConfig> configs;
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      configs.push_back(ChainConfig::for_model(model, 20000, 1000, seed));
    }
    std::vector<ChainResult> s, p;
    const double ts = best_of(reps, [&] { s = run_chains(model, configs, Exec::Serial); });
    const double tp = best_of(reps, [&] { p = run_chains(model, configs, Exec::Parallel); });
    bool identical = s.size() == p.size();
    for (std::size_t i = 0; identical && i < s.size(); ++i) {
      identical = same_bits(s[i].draws, p[i].draws);
    }
    report("8 IMH chains x 21000 steps", ts, tp, identical);
  }
  return 0;
}
