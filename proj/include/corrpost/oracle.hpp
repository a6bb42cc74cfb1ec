#pragma once

#include "corrpost/model.hpp"
#include "corrpost/parallel.hpp"
#include "corrpost/posterior.hpp"
#include "corrpost/quadrature.hpp"

/// Numerical-integration checks of the analytic results. Nothing here calls
/// the series formulas it is meant to verify.
namespace corrpost::oracle {

using quad::QuadResult;

/// theta = (mu1, mu2, sigma1, sigma2, rho).
struct FullParams {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;

  void validate() const;
};

/// Bivariate-normal likelihood of the sufficient statistics:
/// (2π σ1 σ2 √(1-ρ²))^(-n) times the mean and scale exponential factors.
double log_full_likelihood(const SufficientStats& y, const FullParams& theta);
double full_likelihood(const SufficientStats& y, const FullParams& theta);

struct TheoremOptions {
  double rel_tol = 1e-6;
  /// Outer panels of each 2D integral evaluate their nodes concurrently.
  Exec exec = Exec::Serial;
};

/// ∫∫∫∫ f(y | θ) σ1^(γ-1) σ2^(δ-1) dμ1 dμ2 dσ1 dσ2 at fixed rho, by nested
/// adaptive Gauss-Kronrod with μ = x̄ + (σ/√n) tan(t) and σ = s e^u. After
/// that substitution the integrand is a product of a (u1, u2) part and a
/// (t1, t2) part, each integrated in 2D. Requires n <= 20; throws
/// ToleranceNotMet when the target is missed.
QuadResult integrate_theorem(const SufficientStats& y, double gamma, double delta, double rho,
                             const TheoremOptions& opt = {});

/// Closed form of ∫_0^∞ u^(c-1) exp(-a u² - b u) du via two 1F1 terms.
double lemma_integral(double a, double b, double c);
/// Same integral by quadrature with u = e^t.
QuadResult lemma_quadrature(double a, double b, double c, double rel_tol = 1e-12);

enum class Functional { Norm, Moment, Cdf };

struct PosteriorFunctional {
  Functional kind = Functional::Norm;
  unsigned k = 0;   // moment order
  double x = 0.0;   // cdf point

  static PosteriorFunctional norm() { return {Functional::Norm, 0, 0.0}; }
  static PosteriorFunctional moment(unsigned k) { return {Functional::Moment, k, 0.0}; }
  static PosteriorFunctional cdf_at(double x) { return {Functional::Cdf, 0, x}; }
};

/// 1D quadrature of ρ^k h(n, r | ρ) (1-ρ²)^(α-1) (1+ρ²)^(β/2) with h = A + B
/// taken literally from the even and odd parts, on the tanh axis.
///   Norm:    ∫ h π_{α,β}, i.e. p^{γ,δ}_{α,β}(n, r); in the alpha -> 0+ limit
///            the unnormalized kernel integral.
///   Moment:  E[ρ^k].
///   Cdf:     P(ρ <= x).
/// The prior normalizer is itself integrated numerically.
QuadResult integrate_posterior_functional(const PosteriorModel& model, PosteriorFunctional f,
                                          double rel_tol = 1e-9);

}  // namespace corrpost::oracle
