#include "corrpost/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "corrpost/errors.hpp"
#include "corrpost/quadrature.hpp"

namespace corrpost {

using specfun::log_beta;
using specfun::log_gamma;
using specfun::log_hyp2f1;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// |t| beyond this maps to |rho| = 1 in double precision.
constexpr double kMaxAbsT = 19.0;

void require_theorem_domain(long n, double r, double rho, double gamma, double delta) {
  if (!(std::fabs(r) < 1.0)) throw DomainError("reduced likelihood: need |r| < 1");
  if (!(std::fabs(rho) < 1.0)) throw DomainError("reduced likelihood: need |rho| < 1");
  const double dn = static_cast<double>(n);
  if (!(dn > gamma + 1.0)) throw DomainError("reduced likelihood: need n > gamma+1");
  if (!(dn > delta + 1.0)) throw DomainError("reduced likelihood: need n > delta+1");
}

// ln Γ(a+½)Γ(d+½) / (Γ(½)Γ(a+d+½)), the weight of the quadratic transformation.
double log_transform_weight(double a, double d) {
  return log_gamma(a + 0.5) + log_gamma(d + 0.5) - 0.5 * std::log(std::numbers::pi) -
         log_gamma(a + d + 0.5);
}

// ln of F_e(x²) + 2xW F_o(x²), with F_e = 2F1(a,d;1/2;·), F_o = 2F1(a+½,d+½;3/2;·).
double log_even_odd_sum(double x, double a, double d, double log_w, double log_k,
                        const SeriesControl& ctrl) {
  if (x < 0.0) {
    return log_k + log_hyp2f1(2.0 * a, 2.0 * d, a + d + 0.5, 0.5 * (1.0 + x), ctrl).log_abs;
  }
  const double x2 = x * x;
  const double le = log_hyp2f1(a, d, 0.5, x2, ctrl).log_abs;
  if (x == 0.0) return le;
  const double lo = log_hyp2f1(a + 0.5, d + 0.5, 1.5, x2, ctrl).log_abs;
  return le + std::log1p(2.0 * x * std::exp(log_w + lo - le));
}

// log(sech²t) = ln(1 - tanh²t), accurate for large |t|.
double log_sech2(double t) {
  const double at = std::fabs(t);
  return -2.0 * (at + std::log1p(std::exp(-2.0 * at)) - std::numbers::ln2);
}

// Sum of terms given as (ln|t|, sign), rescaled to the largest magnitude
// seen so far.
class LogSum {
 public:
  // Returns |term| / |sum| after the addition.
  double add(double log_abs, int sign) {
    if (sign == 0 || log_abs == kNegInf) return 0.0;
    if (sum_ == 0.0 && log_scale_ == kNegInf) {
      log_scale_ = log_abs;
      sum_ = sign;
      return 1.0;
    }
    if (log_abs > log_scale_) {
      sum_ *= std::exp(log_scale_ - log_abs);
      log_scale_ = log_abs;
    }
    const double t = sign * std::exp(log_abs - log_scale_);
    sum_ += t;
    return sum_ == 0.0 ? std::numeric_limits<double>::infinity() : std::fabs(t / sum_);
  }

  int sign() const { return sum_ > 0.0 ? 1 : (sum_ < 0.0 ? -1 : 0); }
  double log_abs() const { return sum_ == 0.0 ? kNegInf : std::log(std::fabs(sum_)) + log_scale_; }

 private:
  double sum_ = 0.0;
  double log_scale_ = kNegInf;
};

struct SeriesSum {
  double log_abs = kNegInf;
  int sign = 0;
  std::size_t terms = 0;
};

// Unnormalized k-th moment series: ∫ ρ^k h(ρ) (1-ρ²)^(α-1) (1+ρ²)^(β/2) dρ,
// summed term-wise. log_coef(j) = ln[B((j+1)/2, μ) 2F1(-β/2, (j+1)/2; (j+1)/2+μ; -1)].
class MomentSeries {
 public:
  explicit MomentSeries(const PosteriorModel& model)
      : model_(model), mu_(model.eta().alpha() + model.exponent_e()) {}

  SeriesSum sum(unsigned k) {
    const SeriesControl& ctrl = model_.control();
    const double r = model_.r();
    const bool odd = (k % 2) == 1;
    SeriesSum out;
    if (odd && r == 0.0) {
      out.sign = 0;
      out.terms = 1;
      return out;
    }
    const double a = model_.even_a() + (odd ? 0.5 : 0.0);
    const double d = model_.even_d() + (odd ? 0.5 : 0.0);
    const double c = odd ? 1.5 : 0.5;
    const double log_r2 = r == 0.0 ? kNegInf : 2.0 * std::log(std::fabs(r));
    // Odd series carry the factor 2 W r.
    double log_term_coef = odd ? std::log(2.0) + model_.log_w_ratio() + std::log(std::fabs(r)) : 0.0;
    const int sign = odd && r < 0.0 ? -1 : 1;

    LogSum acc;
    std::size_t small_run = 0;
    std::size_t m = 0;
    for (;; ++m) {
      if (m >= ctrl.max_terms) {
        std::ostringstream os;
        os << "moment series (k = " << k << ") did not converge within " << ctrl.max_terms
           << " terms";
        throw NonConvergence(os.str(), m);
      }
      const unsigned long j = k + 2 * m + (odd ? 1 : 0);
      const double rel = acc.add(log_term_coef + log_coef(j), sign);
      if (r == 0.0) {
        ++m;
        break;
      }
      small_run = rel <= ctrl.rel_tol ? small_run + 1 : 0;
      if (small_run >= ctrl.consecutive_small) {
        ++m;
        break;
      }
      const double dm = static_cast<double>(m);
      log_term_coef += std::log(a + dm) + std::log(d + dm) + log_r2 - std::log(c + dm) -
                       std::log(dm + 1.0);
    }
    out.log_abs = acc.log_abs();
    out.sign = acc.sign();
    out.terms = m;
    return out;
  }

 private:
  double log_coef(unsigned long j) {
    if (j < cache_.size() && !std::isnan(cache_[j])) return cache_[j];
    if (j >= cache_.size()) cache_.resize(j + 1, std::numeric_limits<double>::quiet_NaN());
    const double half = 0.5 * static_cast<double>(j + 1);
    double v = log_beta(half, mu_);
    const double beta = model_.eta().beta();
    if (beta != 0.0) {
      v += specfun::log_hyp2f1_at_minus_one(-0.5 * beta, half, half + mu_, model_.control())
               .log_abs;
    }
    cache_[j] = v;
    return v;
  }

  const PosteriorModel& model_;
  double mu_;
  std::vector<double> cache_;
};

}  // namespace

double log_w_ratio(long n, double gamma, double delta) {
  const double dn = static_cast<double>(n);
  if (!(dn > gamma + 1.0) || !(dn > delta + 1.0)) {
    throw DomainError("W ratio: need n > gamma+1 and n > delta+1");
  }
  return log_gamma((dn - gamma) / 2.0) + log_gamma((dn - delta) / 2.0) -
         log_gamma((dn - gamma - 1.0) / 2.0) - log_gamma((dn - delta - 1.0) / 2.0);
}

double w_ratio(long n, double gamma, double delta) {
  return std::exp(log_w_ratio(n, gamma, delta));
}

double reduced_likelihood_even(long n, double r, double rho, double gamma, double delta,
                               const SeriesControl& ctrl) {
  require_theorem_domain(n, r, rho, gamma, delta);
  const double dn = static_cast<double>(n);
  const double e = (dn - gamma - delta - 1.0) / 2.0;
  const double x = r * rho;
  const double lf = log_hyp2f1((dn - gamma - 1.0) / 2.0, (dn - delta - 1.0) / 2.0, 0.5, x * x, ctrl)
                        .log_abs;
  return std::exp(e * log1m_square(rho) + lf);
}

double reduced_likelihood_odd(long n, double r, double rho, double gamma, double delta,
                              const SeriesControl& ctrl) {
  require_theorem_domain(n, r, rho, gamma, delta);
  const double x = r * rho;
  if (x == 0.0) return 0.0;
  const double dn = static_cast<double>(n);
  const double e = (dn - gamma - delta - 1.0) / 2.0;
  const double lf =
      log_hyp2f1((dn - gamma) / 2.0, (dn - delta) / 2.0, 1.5, x * x, ctrl).log_abs;
  const double mag = std::exp(std::log(2.0 * std::fabs(x)) + e * log1m_square(rho) +
                              log_w_ratio(n, gamma, delta) + lf);
  return x > 0.0 ? mag : -mag;
}

double log_reduced_likelihood(long n, double r, double rho, double gamma, double delta,
                              const SeriesControl& ctrl) {
  require_theorem_domain(n, r, rho, gamma, delta);
  const double dn = static_cast<double>(n);
  const double a = (dn - gamma - 1.0) / 2.0;
  const double d = (dn - delta - 1.0) / 2.0;
  const double e = (dn - gamma - delta - 1.0) / 2.0;
  return e * log1m_square(rho) +
         log_even_odd_sum(r * rho, a, d, log_w_ratio(n, gamma, delta), log_transform_weight(a, d),
                          ctrl);
}

double reduced_likelihood(long n, double r, double rho, double gamma, double delta,
                          const SeriesControl& ctrl) {
  return std::exp(log_reduced_likelihood(n, r, rho, gamma, delta, ctrl));
}

double log_marginal_likelihood_rho0(const SufficientStats& y, double gamma, double delta) {
  y.validate();
  const double dn = static_cast<double>(y.n);
  if (!(dn > gamma + 1.0) || !(dn > delta + 1.0)) {
    throw DomainError("marginal likelihood: need n > gamma+1 and n > delta+1");
  }
  return (-gamma - delta - 4.0) / 2.0 * std::numbers::ln2 +
         (1.0 - dn) * std::log(std::numbers::pi) - std::log(dn) +
         (1.0 + gamma - dn) / 2.0 * std::log(dn * y.s1 * y.s1) +
         (1.0 + delta - dn) / 2.0 * std::log(dn * y.s2 * y.s2) +
         log_gamma((dn - gamma - 1.0) / 2.0) + log_gamma((dn - delta - 1.0) / 2.0);
}

double marginal_likelihood_rho0(const SufficientStats& y, double gamma, double delta) {
  return std::exp(log_marginal_likelihood_rho0(y, gamma, delta));
}

double log_jeffreys_approximation(long n, double r, double rho) {
  if (n < 2) throw DomainError("Jeffreys approximation: need n >= 2");
  if (!(std::fabs(r) < 1.0) || !(std::fabs(rho) < 1.0)) {
    throw DomainError("Jeffreys approximation: need |r| < 1 and |rho| < 1");
  }
  const double dn = static_cast<double>(n);
  return (dn - 1.0) / 2.0 * log1m_square(rho) + (3.0 - 2.0 * dn) / 2.0 * std::log1p(-rho * r);
}

double jeffreys_approximation(long n, double r, double rho) {
  return std::exp(log_jeffreys_approximation(n, r, rho));
}

double log_norm_constant_beta0(const SufficientStats& y, const Hyperparameters& eta,
                               const SeriesControl& ctrl) {
  if (eta.beta() != 0.0) throw DomainError("closed-form normalizer requires beta = 0");
  if (auto v = eta.violation(y.n)) throw DomainError(*v);
  y.validate();
  const double dn = static_cast<double>(y.n);
  const double a = (dn - eta.gamma() - 1.0) / 2.0;
  const double d = (dn - eta.delta() - 1.0) / 2.0;
  const double mu = eta.alpha() + (dn - eta.gamma() - eta.delta() - 1.0) / 2.0;
  double out = log_beta(0.5, mu) + log_hyp2f1(a, d, mu + 0.5, y.r * y.r, ctrl).log_abs;
  if (!eta.alpha_is_limit()) out -= log_beta(0.5, eta.alpha());
  return out;
}

double norm_constant_beta0(const SufficientStats& y, const Hyperparameters& eta,
                           const SeriesControl& ctrl) {
  return std::exp(log_norm_constant_beta0(y, eta, ctrl));
}

PosteriorModel::PosteriorModel(SufficientStats y, Hyperparameters eta, SeriesControl ctrl)
    : stats_(y), eta_(eta), ctrl_(ctrl) {
  stats_.validate();
  ctrl_.validate();
  if (auto v = eta_.violation(stats_.n)) throw DomainError(*v);
  const double dn = static_cast<double>(stats_.n);
  even_a_ = (dn - eta_.gamma() - 1.0) / 2.0;
  even_d_ = (dn - eta_.delta() - 1.0) / 2.0;
  e_ = (dn - eta_.gamma() - eta_.delta() - 1.0) / 2.0;
  log_w_ = corrpost::log_w_ratio(stats_.n, eta_.gamma(), eta_.delta());
  log_k_ = log_transform_weight(even_a_, even_d_);

  if (eta_.beta() == 0.0) {
    const double mu = eta_.alpha() + e_;
    const auto f = log_hyp2f1(even_a_, even_d_, mu + 0.5, stats_.r * stats_.r, ctrl_);
    log_z_ = log_beta(0.5, mu) + f.log_abs;
    norm_terms_ = f.terms_used;
  } else {
    MomentSeries series(*this);
    const SeriesSum s0 = series.sum(0);
    log_z_ = s0.log_abs;
    norm_terms_ = s0.terms;
  }
  log_norm_ = eta_.alpha_is_limit() ? log_z_ : log_z_ - log_prior_norm_constant(eta_);
}

double PosteriorModel::norm_constant() const { return std::exp(log_norm_); }
double PosteriorModel::w_ratio() const { return std::exp(log_w_); }

double PosteriorModel::log_sum_term(double x) const {
  return log_even_odd_sum(x, even_a_, even_d_, log_w_, log_k_, ctrl_);
}

double PosteriorModel::log_h(double rho, double log1m_rho2) const {
  return e_ * log1m_rho2 + log_sum_term(stats_.r * rho);
}

double PosteriorModel::log_kernel(double rho, double log1m_rho2) const {
  return log_h(rho, log1m_rho2) + log_prior_kernel(rho, log1m_rho2, eta_);
}

double PosteriorModel::log_density(double rho) const {
  if (!(std::fabs(rho) < 1.0)) throw DomainError("posterior density: need |rho| < 1");
  return log_kernel(rho, log1m_square(rho)) - log_z_;
}

double PosteriorModel::density(double rho) const {
  if (eta_.beta() == 0.0) return density_beta0(*this, rho);
  return std::exp(log_density(rho));
}

double PosteriorModel::z_center() const { return std::atanh(stats_.r); }
double PosteriorModel::z_scale() const { return 1.0 / std::sqrt(static_cast<double>(stats_.n)); }

std::vector<double> PosteriorModel::z_breakpoints() const {
  const double c = std::clamp(z_center(), -kMaxAbsT + 1.0, kMaxAbsT - 1.0);
  const double s = z_scale();
  std::vector<double> out;
  for (double k : {-32.0, -16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double t = c + k * s;
    if (std::fabs(t) < kMaxAbsT) out.push_back(t);
  }
  return out;
}

double density_beta0(const PosteriorModel& model, double rho) {
  const Hyperparameters& eta = model.eta();
  if (eta.beta() != 0.0) throw DomainError("closed-form density requires beta = 0");
  if (!(std::fabs(rho) < 1.0)) throw DomainError("posterior density: need |rho| < 1");
  const double dn = static_cast<double>(model.n());
  const double power = (2.0 * eta.alpha() + dn - eta.gamma() - eta.delta() - 3.0) / 2.0;
  // p B(1/2, α); in the limit the B(1/2, α) factor is already cancelled.
  double log_denominator = model.log_norm_constant();
  if (!eta.alpha_is_limit()) log_denominator += log_beta(0.5, eta.alpha());
  const double bracket = log_even_odd_sum(model.r() * rho, model.even_a(), model.even_d(),
                                          model.log_w_ratio(),
                                          log_transform_weight(model.even_a(), model.even_d()),
                                          model.control());
  return std::exp(power * log1m_square(rho) + bracket - log_denominator);
}

std::vector<MomentResult> moments_general(const PosteriorModel& model, unsigned k_max) {
  MomentSeries series(model);
  const SeriesSum s0 = series.sum(0);
  std::vector<MomentResult> out;
  out.reserve(k_max + 1);
  out.push_back(MomentResult{0, 1.0, s0.terms, true});
  for (unsigned k = 1; k <= k_max; ++k) {
    const SeriesSum sk = series.sum(k);
    MomentResult m{k, 0.0, sk.terms, true};
    if (sk.sign != 0) m.value = sk.sign * std::exp(sk.log_abs - s0.log_abs);
    out.push_back(m);
  }
  return out;
}

MomentResult moment_general(const PosteriorModel& model, unsigned k) {
  return moments_general(model, k).back();
}

MomentResult moments_beta0(const PosteriorModel& model, unsigned k) {
  const Hyperparameters& eta = model.eta();
  if (eta.beta() != 0.0) throw DomainError("closed-form moments require beta = 0");
  if (k == 0) return MomentResult{0, 1.0, model.norm_terms_used(), true};
  const double r = model.r();
  const double mu = eta.alpha() + model.exponent_e();
  const double dk = static_cast<double>(k);
  const SeriesControl& ctrl = model.control();
  const double log_denominator =
      log_beta(0.5, mu) +
      log_hyp2f1(model.even_a(), model.even_d(), mu + 0.5, r * r, ctrl).log_abs;

  if (k % 2 == 0) {
    const auto f = specfun::log_hyp3f2((dk + 1.0) / 2.0, model.even_a(), model.even_d(), 0.5,
                                       dk / 2.0 + mu + 0.5, r * r, ctrl);
    const double v = std::exp(log_beta(0.5 + dk / 2.0, mu) + f.log_abs - log_denominator);
    return MomentResult{k, v, f.terms_used, true};
  }
  if (r == 0.0) return MomentResult{k, 0.0, 1, true};
  const auto f = specfun::log_hyp3f2((dk + 2.0) / 2.0, model.even_a() + 0.5, model.even_d() + 0.5,
                                     1.5, (dk + 1.0) / 2.0 + mu + 0.5, r * r, ctrl);
  const double mag = std::exp(std::log(2.0 * std::fabs(r)) + model.log_w_ratio() +
                              log_beta(0.5 + (dk + 1.0) / 2.0, mu) + f.log_abs - log_denominator);
  return MomentResult{k, r > 0.0 ? mag : -mag, f.terms_used, true};
}

namespace {

// Posterior density on the t = atanh(ρ) axis.
double density_t(const PosteriorModel& model, double t) {
  const double l1m = log_sech2(t);
  return std::exp(model.log_kernel(std::tanh(t), l1m) + l1m - model.log_evidence_kernel());
}

double cdf_t(const PosteriorModel& model, double t) {
  std::vector<double> breaks{-std::numeric_limits<double>::infinity()};
  for (double b : model.z_breakpoints()) {
    if (b < t) breaks.push_back(b);
  }
  breaks.push_back(t);
  quad::QuadOptions opt;
  opt.abs_tol = 1e-11;
  opt.rel_tol = 0.0;
  const auto res =
      quad::integrate_breakpoints([&model](double u) { return density_t(model, u); }, breaks, opt);
  return std::clamp(res.value, 0.0, 1.0);
}

}  // namespace

double cdf(const PosteriorModel& model, double rho) {
  if (rho <= -1.0) return 0.0;
  if (rho >= 1.0) return 1.0;
  return cdf_t(model, std::atanh(rho));
}

double quantile(const PosteriorModel& model, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile: need 0 < p < 1");
  double lo = -kMaxAbsT;
  double hi = kMaxAbsT;
  double t = std::clamp(model.z_center(), lo + 1.0, hi - 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = cdf_t(model, t) - p;
    if (f == 0.0) break;
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double dens = density_t(model, t);
    double next = dens > 0.0 ? t - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::fabs(next - t);
    t = next;
    if (step <= 1e-14 * std::max(1.0, std::fabs(t)) || hi - lo <= 1e-15) break;
  }
  return std::tanh(t);
}

std::vector<double> density_grid(const PosteriorModel& model, std::span<const double> rhos,
                                 Exec exec) {
  std::vector<double> out(rhos.size());
  auto fill = [&](int i) { out[i] = model.density(rhos[i]); };
  const int count = static_cast<int>(rhos.size());
  if (exec == Exec::Parallel) {
    parallel_for(count, fill);
  } else {
    for (int i = 0; i < count; ++i) fill(i);
  }
  return out;
}

std::vector<double> uniform_rho_grid(std::size_t points) {
  if (points < 2) throw DomainError("rho grid needs at least 2 points");
  const double edge = 1.0 - 1e-9;
  std::vector<double> out(points);
  const double step = 2.0 * edge / static_cast<double>(points - 1);
  const std::size_t mid = points / 2;
  for (std::size_t i = 0; i < points; ++i) {
    // Symmetric construction: out[i] = -out[points-1-i] exactly.
    if (points % 2 == 1 && i == mid) {
      out[i] = 0.0;
    } else if (i < mid) {
      out[i] = -edge + step * static_cast<double>(i);
    } else {
      out[i] = -out[points - 1 - i];
    }
  }
  return out;
}

}  // namespace corrpost
