#pragma once

#include <cstddef>
#include <vector>

namespace corrpost::specfun {

/// Stopping rule shared by every power series in the library.
///
/// A series stops once `consecutive_small` consecutive terms each satisfy
/// |term| <= rel_tol * |partial sum|. Requiring a run of small terms keeps an
/// alternating series from stopping at a single near-zero term.
struct SeriesControl {
  double rel_tol = 1e-14;
  std::size_t max_terms = 500000;
  std::size_t consecutive_small = 3;

  /// Throws DomainError when a field violates its bound.
  void validate() const;
};

/// Parameters of a generalized hypergeometric series pFq(a; b; z).
struct HypParams {
  std::vector<double> numerator;    // a_1..a_p
  std::vector<double> denominator;  // b_1..b_q
  double argument = 0.0;            // z
};

/// Series value held as sign * exp(log_abs) so that results far outside the
/// double range stay usable. sign is 0 for an exact zero.
struct SeriesValue {
  double log_abs = 0.0;
  int sign = 1;
  std::size_t terms_used = 0;

  double value() const;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// ln B(u, v) = ln Γ(u) + ln Γ(v) − ln Γ(u + v).
double log_beta(double u, double v);
double beta(double u, double v);

/// Rising factorial (x)_m = x (x+1) ... (x+m-1); (x)_0 = 1.
double pochhammer(double x, unsigned m);

/// ln |(x)_m| and its sign; the sign is 0 when the product vanishes.
SeriesValue log_pochhammer(double x, unsigned m);

/// Sums Σ_m [Π(a_i)_m / Π(b_j)_m] z^m / m! using the term recurrence.
///
/// Partial sums are rescaled internally, so the log form never overflows.
/// Throws DomainError for poles in the denominator or a divergent
/// configuration, and NonConvergence when max_terms is exhausted.
SeriesValue log_hyp_series(const HypParams& p, const SeriesControl& ctrl = {});
double hyp_series(const HypParams& p, const SeriesControl& ctrl = {});

double hyp1f1(double a, double b, double z, const SeriesControl& ctrl = {});
double hyp2f1(double a, double b, double c, double z,
              const SeriesControl& ctrl = {});
SeriesValue log_hyp2f1(double a, double b, double c, double z,
                       const SeriesControl& ctrl = {});
/// 2F1(a, b; c; -1) through the Pfaff transformation
/// 2F1(a, b; c; -1) = 2^(-a) 2F1(a, c - b; c; 1/2), which converges
/// geometrically where direct summation at z = -1 decays only algebraically.
SeriesValue log_hyp2f1_at_minus_one(double a, double b, double c,
                                    const SeriesControl& ctrl = {});

SeriesValue log_hyp3f2(double a1, double a2, double a3, double b1, double b2,
                       double z, const SeriesControl& ctrl = {});

}  // namespace corrpost::specfun
