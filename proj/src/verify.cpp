#include "corrpost/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "corrpost/model.hpp"
#include "corrpost/oracle.hpp"
#include "corrpost/posterior.hpp"

namespace corrpost::verify {

namespace {

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string alpha_label(const Hyperparameters& eta) {
  return eta.alpha_is_limit() ? std::string("limit") : format("%g", eta.alpha());
}

Hyperparameters make_eta(double alpha, double beta, double gamma, double delta) {
  return alpha == 0.0 ? Hyperparameters::alpha_limit(beta, gamma, delta)
                      : Hyperparameters(alpha, beta, gamma, delta);
}

constexpr std::pair<double, double> kGammaDelta[] = {{0.0, 0.0}, {-1.0, 1.0}};

}  // namespace

double relative_error(double value, double ref, double rel_tol, double abs_floor) {
  return std::fabs(value - ref) / std::max(std::fabs(ref), abs_floor / rel_tol);
}

Check make_check(std::string suite, std::string inputs, double value, double ref,
                 double rel_tol, double abs_floor) {
  Check c;
  c.suite = std::move(suite);
  c.inputs = std::move(inputs);
  c.achieved = relative_error(value, ref, rel_tol, abs_floor);
  c.tolerance = rel_tol;
  c.passed = c.achieved <= rel_tol;
  return c;
}

std::vector<Check> lemma_suite(double rel_tol) {
  std::vector<Check> out;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double b : {-1.0, 0.0, 1.0}) {
      for (double c : {1.0, 2.0, 3.5}) {
        const double closed = oracle::lemma_integral(a, b, c);
        const double quad = oracle::lemma_quadrature(a, b, c).value;
        out.push_back(make_check("lemma", format("a=%g b=%g c=%g", a, b, c), closed, quad,
                                 rel_tol));
      }
    }
  }
  return out;
}

std::vector<Check> theorem_suite(long n, double r, double rel_tol, Exec exec) {
  const SufficientStats y = SufficientStats::from_summary(n, r, 1.0, 1.0);
  std::vector<Check> out;
  oracle::TheoremOptions opt;
  opt.exec = exec;
  for (const auto& [gamma, delta] : kGammaDelta) {
    const double p0 = marginal_likelihood_rho0(y, gamma, delta);
    for (double rho : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
      const double four_d = oracle::integrate_theorem(y, gamma, delta, rho, opt).value;
      const double ratio = four_d / reduced_likelihood(n, r, rho, gamma, delta);
      out.push_back(make_check(
          "theorem", format("n=%ld r=%g gamma=%g delta=%g rho=%g", n, r, gamma, delta, rho),
          ratio, p0, rel_tol));
    }
  }
  return out;
}

std::vector<Check> beta0_suite(double rel_tol) {
  std::vector<Check> out;
  for (long n : {5L, 10L, 50L}) {
    for (double r : {-0.9, 0.0, 0.6}) {
      for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
        for (const auto& [gamma, delta] : kGammaDelta) {
          const Hyperparameters eta = make_eta(alpha, 0.0, gamma, delta);
          const PosteriorModel model(SufficientStats::from_summary(n, r), eta);
          const std::string where = format("n=%ld r=%g alpha=%s gamma=%g delta=%g", n, r,
                                           alpha_label(eta).c_str(), gamma, delta);
          const double norm_q =
              oracle::integrate_posterior_functional(model, oracle::PosteriorFunctional::norm())
                  .value;
          out.push_back(make_check("norm", where, model.norm_constant(), norm_q, rel_tol));
          for (unsigned k = 1; k <= 4; ++k) {
            const double mq = oracle::integrate_posterior_functional(
                                  model, oracle::PosteriorFunctional::moment(k))
                                  .value;
            out.push_back(make_check(format("moment k=%u", k), where,
                                     moments_beta0(model, k).value, mq, rel_tol));
          }
        }
      }
    }
  }
  return out;
}

std::vector<Check> general_beta_suite(double rel_tol, double beta0_tol) {
  std::vector<Check> out;
  for (long n : {5L, 10L}) {
    for (double r : {0.0, 0.6}) {
      for (double alpha : {0.5, 1.0}) {
        for (double beta : {1.0, 2.0}) {
          const PosteriorModel model(SufficientStats::from_summary(n, r),
                                     Hyperparameters(alpha, beta, 0.0, 0.0));
          const auto series = moments_general(model, 3);
          const std::string where = format("n=%ld r=%g alpha=%g beta=%g", n, r, alpha, beta);
          for (unsigned k = 0; k <= 3; ++k) {
            const double mq = oracle::integrate_posterior_functional(
                                  model, oracle::PosteriorFunctional::moment(k))
                                  .value;
            out.push_back(make_check(format("general-beta k=%u", k), where, series[k].value, mq,
                                     rel_tol));
          }
        }
        const PosteriorModel model0(SufficientStats::from_summary(n, r),
                                    Hyperparameters(alpha, 0.0, 0.0, 0.0));
        const auto series = moments_general(model0, 4);
        const std::string where = format("n=%ld r=%g alpha=%g beta=0", n, r, alpha);
        for (unsigned k = 1; k <= 4; ++k) {
          out.push_back(make_check(format("series vs closed form k=%u", k), where,
                                   series[k].value, moments_beta0(model0, k).value, beta0_tol));
        }
      }
    }
  }
  return out;
}

}  // namespace corrpost::verify
