#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "corrpost/model.hpp"
#include "corrpost/parallel.hpp"
#include "corrpost/specfun.hpp"

namespace corrpost {

using specfun::SeriesControl;

// Reduced likelihood h_{gamma,delta}(n, r | rho) = A + B, where A is even and
// B is odd in rho. All functions require |r| < 1, |rho| < 1, n > gamma + 1
// and n > delta + 1.

/// W_{gamma,delta}(n) = Γ((n-γ)/2) Γ((n-δ)/2) / [Γ((n-γ-1)/2) Γ((n-δ-1)/2)].
double log_w_ratio(long n, double gamma, double delta);
double w_ratio(long n, double gamma, double delta);

/// A = (1-ρ²)^((n-γ-δ-1)/2) 2F1((n-γ-1)/2, (n-δ-1)/2; 1/2; r²ρ²).
double reduced_likelihood_even(long n, double r, double rho, double gamma, double delta,
                               const SeriesControl& ctrl = {});

/// B = 2rρ (1-ρ²)^((n-γ-δ-1)/2) W 2F1((n-γ)/2, (n-δ)/2; 3/2; r²ρ²).
double reduced_likelihood_odd(long n, double r, double rho, double gamma, double delta,
                              const SeriesControl& ctrl = {});

/// ln h. When rρ < 0, A and B nearly cancel, so the sum is evaluated through
/// the quadratic transformation
///   2F1(a,d;1/2;x²) + 2xW 2F1(a+½,d+½;3/2;x²) = K 2F1(2a,2d;a+d+½;(1+x)/2)
/// with K = Γ(a+½)Γ(d+½) / (Γ(½)Γ(a+d+½)), whose series has positive terms.
double log_reduced_likelihood(long n, double r, double rho, double gamma, double delta,
                              const SeriesControl& ctrl = {});
double reduced_likelihood(long n, double r, double rho, double gamma, double delta,
                          const SeriesControl& ctrl = {});

/// ln p_{γ,δ}(y0), the marginal likelihood with rho fixed at zero.
double log_marginal_likelihood_rho0(const SufficientStats& y, double gamma, double delta);
double marginal_likelihood_rho0(const SufficientStats& y, double gamma, double delta);

/// Jeffreys' approximation h_a = (1-ρ²)^((n-1)/2) (1-ρr)^((3-2n)/2).
double log_jeffreys_approximation(long n, double r, double rho);
double jeffreys_approximation(long n, double r, double rho);

/// ln p^{γ,δ}_α(n, r) for beta = 0. In the alpha -> 0+ limit the
/// 1/B(1/2, alpha) factor is cancelled against the prior kernel and the
/// returned object is B(1/2, e) 2F1(a, d; e + 1/2; r²), e = (n-γ-δ-1)/2.
double log_norm_constant_beta0(const SufficientStats& y, const Hyperparameters& eta,
                               const SeriesControl& ctrl = {});
double norm_constant_beta0(const SufficientStats& y, const Hyperparameters& eta,
                           const SeriesControl& ctrl = {});

struct MomentResult {
  unsigned order = 0;
  double value = 0.0;
  std::size_t terms_used = 0;
  bool converged = false;
};

/// Marginal posterior of rho for fixed data summary and prior.
///
/// Immutable after construction. The unnormalized posterior kernel is
/// h(rho) (1-ρ²)^(α-1) (1+ρ²)^(β/2); its integral Z is cached in log form.
/// For proper priors norm_constant() = Z / C_{α,β}; in the alpha -> 0+ limit
/// it is Z itself.
class PosteriorModel {
 public:
  /// Throws DomainError naming the violated bound unless
  /// eta.posterior_valid(y.n).
  PosteriorModel(SufficientStats y, Hyperparameters eta, SeriesControl ctrl = {});

  const SufficientStats& stats() const { return stats_; }
  const Hyperparameters& eta() const { return eta_; }
  const SeriesControl& control() const { return ctrl_; }
  long n() const { return stats_.n; }
  double r() const { return stats_.r; }

  double log_norm_constant() const { return log_norm_; }
  double norm_constant() const;
  double log_w_ratio() const { return log_w_; }
  double w_ratio() const;
  /// ln Z = ln ∫ h(ρ) (1-ρ²)^(α-1) (1+ρ²)^(β/2) dρ.
  double log_evidence_kernel() const { return log_z_; }
  std::size_t norm_terms_used() const { return norm_terms_; }

  /// ln of the unnormalized posterior kernel; log1m_rho2 = ln(1 - ρ²).
  double log_kernel(double rho, double log1m_rho2) const;
  double log_density(double rho) const;
  /// β = 0 uses the closed form, otherwise h π / Z.
  double density(double rho) const;

  /// ln of h(rho) with the model's (n, r, γ, δ) and cached gamma ratios.
  double log_h(double rho, double log1m_rho2) const;

  /// Fisher-z location atanh(r) and scale 1/sqrt(n).
  double z_center() const;
  double z_scale() const;
  /// Sorted panel breakpoints on the t = atanh(ρ) axis.
  std::vector<double> z_breakpoints() const;

  // Shape parameters shared by the formulas.
  double even_a() const { return even_a_; }  // (n-γ-1)/2
  double even_d() const { return even_d_; }  // (n-δ-1)/2
  double exponent_e() const { return e_; }   // (n-γ-δ-1)/2

 private:
  double log_sum_term(double x) const;

  SufficientStats stats_;
  Hyperparameters eta_;
  SeriesControl ctrl_;
  double even_a_ = 0.0, even_d_ = 0.0, e_ = 0.0;
  double log_w_ = 0.0;
  double log_k_ = 0.0;
  double log_z_ = 0.0;
  double log_norm_ = 0.0;
  std::size_t norm_terms_ = 0;
};

/// Posterior density for beta = 0 by the closed form
/// (1-ρ²)^((2α+n-γ-δ-3)/2) [2F1(..;1/2;r²ρ²) + 2rρW 2F1(..;3/2;r²ρ²)] / (p B(1/2, α)).
double density_beta0(const PosteriorModel& model, double rho);

/// E[ρ^k] from the general-beta series with a_{k,m}, b_{k,m} coefficients.
/// The prior normalizer C_{α,β} cancels in the ratio to the k = 0 series, so
/// the alpha -> 0+ limit is finite.
MomentResult moment_general(const PosteriorModel& model, unsigned k);
/// Moments 0..k_max sharing one coefficient cache.
std::vector<MomentResult> moments_general(const PosteriorModel& model, unsigned k_max);

/// E[ρ^k] for beta = 0 by the 3F2 closed forms.
MomentResult moments_beta0(const PosteriorModel& model, unsigned k);

/// Posterior CDF by adaptive quadrature of the analytic density on the
/// t = atanh(ρ) axis (absolute tolerance 1e-11).
double cdf(const PosteriorModel& model, double rho);
/// Inverse CDF by safeguarded Newton iteration on the t axis.
double quantile(const PosteriorModel& model, double p);

/// Density on a grid of rho values; parallel and serial fills are
/// bit-identical.
std::vector<double> density_grid(const PosteriorModel& model, std::span<const double> rhos,
                                 Exec exec = Exec::Serial);

/// n points uniform on [-1 + 1e-9, 1 - 1e-9]; n odd puts 0 exactly in the middle.
std::vector<double> uniform_rho_grid(std::size_t points);

}  // namespace corrpost
