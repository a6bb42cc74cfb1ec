#include "corrpost/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "corrpost/errors.hpp"
#include "corrpost/specfun.hpp"

namespace corrpost::oracle {

namespace {

using quad::Estimate;
using quad::QuadOptions;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr long kMaxTheoremN = 20;
constexpr double kMaxLogScale = 300.0;

double log_sech2(double t) {
  const double at = std::fabs(t);
  return -2.0 * (at + std::log1p(std::exp(-2.0 * at)) - std::numbers::ln2);
}

double log_sec2(double t) { return -2.0 * std::log(std::cos(t)); }

Estimate as_estimate(const QuadResult& r) { return Estimate{r.value, r.est_error}; }

}  // namespace

void FullParams::validate() const {
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0)) throw DomainError("FullParams: sigmas must be > 0");
  if (!(std::fabs(rho) < 1.0)) throw DomainError("FullParams: need |rho| < 1");
}

double log_full_likelihood(const SufficientStats& y, const FullParams& theta) {
  theta.validate();
  const double n = static_cast<double>(y.n);
  const double q = 1.0 - theta.rho * theta.rho;
  const double d1 = (y.xbar1 - theta.mu1) / theta.sigma1;
  const double d2 = (y.xbar2 - theta.mu2) / theta.sigma2;
  const double mean_form = d1 * d1 - 2.0 * theta.rho * d1 * d2 + d2 * d2;
  const double u1 = y.s1 / theta.sigma1;
  const double u2 = y.s2 / theta.sigma2;
  const double scale_form = u1 * u1 - 2.0 * theta.rho * y.r * u1 * u2 + u2 * u2;
  return -n * std::log(2.0 * std::numbers::pi * theta.sigma1 * theta.sigma2 * std::sqrt(q)) -
         n / (2.0 * q) * mean_form - n / (2.0 * q) * scale_form;
}

double full_likelihood(const SufficientStats& y, const FullParams& theta) {
  return std::exp(log_full_likelihood(y, theta));
}

QuadResult integrate_theorem(const SufficientStats& y, double gamma, double delta, double rho,
                             const TheoremOptions& opt) {
  y.validate();
  if (y.n > kMaxTheoremN) throw DomainError("4D oracle: desk-scale n <= 20 only");
  const double n = static_cast<double>(y.n);
  if (!(n > gamma + 1.0) || !(n > delta + 1.0)) {
    throw DomainError("4D oracle: need n > gamma+1 and n > delta+1");
  }
  if (!(std::fabs(rho) < 1.0)) throw DomainError("4D oracle: need |rho| < 1");

  // Integrand is computed relative to the likelihood at (x̄, s, ρ = 0).
  const double log_ref = log_full_likelihood(y, FullParams{y.xbar1, y.xbar2, y.s1, y.s2, 0.0});
  const double q = 1.0 - rho * rho;
  const double kq = n / (2.0 * q);
  const double log_norm = -n * std::log(2.0 * std::numbers::pi * std::sqrt(q));
  const double log_s1 = std::log(y.s1);
  const double log_s2 = std::log(y.s2);

  // With μ_i = x̄_i + (σ_i / √n) tan t_i, dμ_i = (σ_i / √n) sec² t_i dt_i and
  // √n (x̄_i - μ_i) / σ_i = -tan t_i, so the integrand splits into a (u1, u2)
  // factor times a (t1, t2) factor and the 4D integral is their product.
  QuadOptions inner;
  inner.rel_tol = opt.rel_tol / 100.0;
  inner.throw_on_failure = false;
  QuadOptions outer;
  outer.rel_tol = opt.rel_tol / 2.0;
  outer.exec = opt.exec;

  const std::vector<double> mean_breaks{-kHalfPi, -kHalfPi / 2.0, 0.0, kHalfPi / 2.0, kHalfPi};
  auto over_t1 = [&](double t1) {
    const double v1 = std::tan(t1);
    const double log_t1 = log_sec2(t1);
    auto integrand = [&](double t2) {
      const double v2 = std::tan(t2);
      const double form = v1 * v1 - 2.0 * rho * v1 * v2 + v2 * v2;
      return std::exp(log_t1 + log_sec2(t2) - form / (2.0 * q));
    };
    return as_estimate(quad::integrate_breakpoints(integrand, mean_breaks, inner));
  };
  const QuadResult mean_part = quad::integrate_breakpoints(over_t1, mean_breaks, outer);

  const std::vector<double> scale_breaks{-kInf, -1.0, 0.0, 1.0, kInf};
  auto over_u1 = [&](double u2) {
    auto integrand = [&](double u1) {
      // exp(-2|u|) overflow would otherwise produce inf - inf.
      if (std::fabs(u1) > kMaxLogScale || std::fabs(u2) > kMaxLogScale) return 0.0;
      const double a1 = std::exp(-u1);
      const double a2 = std::exp(-u2);
      const double scale_form = a1 * a1 - 2.0 * rho * y.r * a1 * a2 + a2 * a2;
      // Likelihood normalizer and scale factor, priors σ^(γ-1) and σ^(δ-1),
      // Jacobians σ du and σ / √n.
      return std::exp(log_norm - kq * scale_form + (gamma + 1.0 - n) * (log_s1 + u1) +
                      (delta + 1.0 - n) * (log_s2 + u2) - std::log(n) - log_ref);
    };
    return as_estimate(quad::integrate_breakpoints(integrand, scale_breaks, inner));
  };
  const QuadResult scale_part = quad::integrate_breakpoints(over_u1, scale_breaks, outer);

  QuadResult res;
  const double factor = std::exp(log_ref);
  res.value = factor * scale_part.value * mean_part.value;
  res.est_error = std::fabs(res.value) * (scale_part.est_error / std::fabs(scale_part.value) +
                                          mean_part.est_error / std::fabs(mean_part.value));
  res.evaluations = scale_part.evaluations + mean_part.evaluations;
  return res;
}

double lemma_integral(double a, double b, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw DomainError("lemma: need a > 0 and c > 0");
  const double z = b * b / (4.0 * a);
  const double even = std::exp(specfun::log_gamma(c / 2.0)) * specfun::hyp1f1(c / 2.0, 0.5, z);
  const double odd = -(b / std::sqrt(a)) * std::exp(specfun::log_gamma((c + 1.0) / 2.0)) *
                     specfun::hyp1f1((c + 1.0) / 2.0, 1.5, z);
  return 0.5 * std::pow(a, -c / 2.0) * (even + odd);
}

QuadResult lemma_quadrature(double a, double b, double c, double rel_tol) {
  if (!(a > 0.0) || !(c > 0.0)) throw DomainError("lemma: need a > 0 and c > 0");
  // u = e^t: ∫ exp(c t - a e^{2t} - b e^t) dt over the real line.
  const double peak = 0.5 * std::log(c / (2.0 * a));
  auto integrand = [a, b, c](double t) {
    const double u = std::exp(t);
    return std::exp(c * t - a * u * u - b * u);
  };
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  return quad::integrate_breakpoints(integrand, {-kInf, peak - 2.0, peak, peak + 2.0, kInf}, opt);
}

QuadResult integrate_posterior_functional(const PosteriorModel& model, PosteriorFunctional f,
                                          double rel_tol) {
  const Hyperparameters& eta = model.eta();
  const long n = model.n();
  const double dn = static_cast<double>(n);
  const double r = model.r();
  const double a = (dn - eta.gamma() - 1.0) / 2.0;
  const double d = (dn - eta.delta() - 1.0) / 2.0;
  const double e = (dn - eta.gamma() - eta.delta() - 1.0) / 2.0;
  const double w = w_ratio(n, eta.gamma(), eta.delta());

  // h = A + B literally, on t = atanh(ρ), times the prior kernel and sech²t.
  auto kernel_t = [&](double t) {
    const double rho = std::tanh(t);
    const double l1m = log_sech2(t);
    const double x = r * rho;
    const double even = std::exp(e * l1m + specfun::log_hyp2f1(a, d, 0.5, x * x).log_abs);
    double odd = 0.0;
    if (x != 0.0) {
      odd = 2.0 * x * w *
            std::exp(e * l1m + specfun::log_hyp2f1(a + 0.5, d + 0.5, 1.5, x * x).log_abs);
    }
    double prior = (eta.alpha() - 1.0) * l1m;
    if (eta.beta() != 0.0) prior += 0.5 * eta.beta() * std::log1p(rho * rho);
    return (even + odd) * std::exp(prior + l1m);
  };

  const double center = std::atanh(r);
  const double scale = 1.0 / std::sqrt(dn);
  std::vector<double> breaks{-kInf};
  for (double k : {-27.0, -9.0, -3.0, -1.0, 0.0, 1.0, 3.0, 9.0, 27.0}) {
    const double t = center + k * scale;
    if (std::fabs(t) < 18.0) breaks.push_back(t);
  }
  breaks.push_back(kInf);

  QuadOptions opt;
  opt.rel_tol = rel_tol;
  const QuadResult z = quad::integrate_breakpoints(kernel_t, breaks, opt);

  switch (f.kind) {
    case Functional::Norm: {
      if (eta.alpha_is_limit()) return z;
      auto prior_t = [&](double t) {
        const double rho = std::tanh(t);
        const double l1m = log_sech2(t);
        double lp = eta.alpha() * l1m;
        if (eta.beta() != 0.0) lp += 0.5 * eta.beta() * std::log1p(rho * rho);
        return std::exp(lp);
      };
      const QuadResult c = quad::integrate_breakpoints(prior_t, {-kInf, 0.0, kInf}, opt);
      QuadResult out;
      out.value = z.value / c.value;
      out.est_error = (z.est_error + out.value * c.est_error) / c.value;
      out.evaluations = z.evaluations + c.evaluations;
      return out;
    }
    case Functional::Moment: {
      if (f.k == 0) return QuadResult{1.0, z.est_error / z.value, z.evaluations};
      QuadOptions mopt = opt;
      mopt.abs_tol = 0.1 * rel_tol * z.value;
      auto moment_t = [&](double t) { return std::pow(std::tanh(t), f.k) * kernel_t(t); };
      const QuadResult m = quad::integrate_breakpoints(moment_t, breaks, mopt);
      QuadResult out;
      out.value = m.value / z.value;
      out.est_error = (m.est_error + std::fabs(out.value) * z.est_error) / z.value;
      out.evaluations = z.evaluations + m.evaluations;
      return out;
    }
    case Functional::Cdf: {
      if (f.x <= -1.0) return QuadResult{0.0, 0.0, z.evaluations};
      if (f.x >= 1.0) return QuadResult{1.0, z.est_error / z.value, z.evaluations};
      const double tx = std::atanh(f.x);
      std::vector<double> lower{-kInf};
      for (std::size_t i = 1; i + 1 < breaks.size(); ++i) {
        if (breaks[i] < tx) lower.push_back(breaks[i]);
      }
      lower.push_back(tx);
      QuadOptions copt = opt;
      copt.abs_tol = 0.1 * rel_tol * z.value;
      const QuadResult m = quad::integrate_breakpoints(kernel_t, lower, copt);
      QuadResult out;
      out.value = m.value / z.value;
      out.est_error = (m.est_error + out.value * z.est_error) / z.value;
      out.evaluations = z.evaluations + m.evaluations;
      return out;
    }
  }
  throw DomainError("unknown posterior functional");
}

}  // namespace corrpost::oracle
