#include "corrpost/specfun.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "corrpost/errors.hpp"

namespace corrpost::specfun {

namespace {

constexpr double kRescaleAbove = 1e250;
const double kLogRescale = std::log(kRescaleAbove);

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// Index of the first term that is exactly zero when a numerator parameter is
// a non-positive integer, or -1 when the series does not terminate.
long terminating_order(const std::vector<double>& numerator) {
  long order = -1;
  for (double a : numerator) {
    if (is_nonpositive_integer(a)) {
      long k = static_cast<long>(-a) + 1;
      if (order < 0 || k < order) order = k;
    }
  }
  return order;
}

void check_convergence_region(const HypParams& p) {
  for (double b : p.denominator) {
    if (is_nonpositive_integer(b)) {
      std::ostringstream os;
      os << "hypergeometric series: denominator parameter " << b
         << " is a pole (zero or negative integer)";
      throw DomainError(os.str());
    }
  }
  if (!std::isfinite(p.argument)) {
    throw DomainError("hypergeometric series: argument must be finite");
  }
  if (terminating_order(p.numerator) >= 0) return;

  const std::size_t np = p.numerator.size();
  const std::size_t nq = p.denominator.size();
  if (np <= nq || p.argument == 0.0) return;
  if (np > nq + 1) {
    throw DomainError("hypergeometric series: p > q + 1 diverges for z != 0");
  }
  const double az = std::fabs(p.argument);
  if (az < 1.0) return;
  if (az > 1.0) {
    throw DomainError("hypergeometric series: |z| > 1 is outside the disc of convergence");
  }
  // |z| = 1: convergence depends on the parameter excess s = Σb − Σa.
  const double s = std::accumulate(p.denominator.begin(), p.denominator.end(), 0.0) -
                   std::accumulate(p.numerator.begin(), p.numerator.end(), 0.0);
  const bool ok = p.argument > 0.0 ? s > 0.0 : s > -1.0;
  if (!ok) {
    std::ostringstream os;
    os << "hypergeometric series: diverges at z = " << p.argument
       << " (parameter excess " << s << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

void SeriesControl::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("SeriesControl: rel_tol must be > 0");
  if (max_terms < 1) throw DomainError("SeriesControl: max_terms must be >= 1");
  if (consecutive_small < 1) {
    throw DomainError("SeriesControl: consecutive_small must be >= 1");
  }
}

double SeriesValue::value() const {
  if (sign == 0) return 0.0;
  return sign * std::exp(log_abs);
}

double log_gamma(double x) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "log_gamma: argument must be > 0, got " << x;
    throw DomainError(os.str());
  }
  if (std::isinf(x)) return x;
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_beta(double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) {
    std::ostringstream os;
    os << "beta: arguments must be > 0, got (" << u << ", " << v << ")";
    throw DomainError(os.str());
  }
  // Sum the two single-argument terms in a fixed order so B(u,v) == B(v,u).
  const double lu = log_gamma(u);
  const double lv = log_gamma(v);
  const double lo = lu < lv ? lu : lv;
  const double hi = lu < lv ? lv : lu;
  return (lo + hi) - log_gamma(u + v);
}

double beta(double u, double v) { return std::exp(log_beta(u, v)); }

SeriesValue log_pochhammer(double x, unsigned m) {
  SeriesValue out{0.0, 1, m};
  for (unsigned k = 0; k < m; ++k) {
    const double f = x + k;
    if (f == 0.0) return SeriesValue{-std::numeric_limits<double>::infinity(), 0, m};
    if (f < 0.0) out.sign = -out.sign;
    out.log_abs += std::log(std::fabs(f));
  }
  return out;
}

double pochhammer(double x, unsigned m) {
  double prod = 1.0;
  for (unsigned k = 0; k < m; ++k) {
    prod *= x + k;
    if (std::fabs(prod) > kRescaleAbove) return log_pochhammer(x, m).value();
  }
  return prod;
}

SeriesValue log_hyp_series(const HypParams& p, const SeriesControl& ctrl) {
  ctrl.validate();
  check_convergence_region(p);

  // term and sum share the scale factor exp(log_scale).
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  std::size_t small_run = 0;
  std::size_t m = 0;

  while (true) {
    if (small_run >= ctrl.consecutive_small) break;
    if (m + 1 >= ctrl.max_terms) {
      std::ostringstream os;
      os << "hypergeometric series did not converge within " << ctrl.max_terms
         << " terms (z = " << p.argument << ")";
      throw NonConvergence(os.str(), m + 1);
    }
    const double dm = static_cast<double>(m);
    // Parameter product before z: swapping two numerator parameters is then
    // bit-identical.
    double num = 1.0;
    for (double a : p.numerator) num *= a + dm;
    num *= p.argument;
    double den = dm + 1.0;
    for (double b : p.denominator) den *= b + dm;
    term = term * (num / den);
    sum += term;
    ++m;

    if (term == 0.0 || std::fabs(term) <= ctrl.rel_tol * std::fabs(sum)) {
      ++small_run;
    } else {
      small_run = 0;
    }
    if (std::fabs(term) > kRescaleAbove || std::fabs(sum) > kRescaleAbove) {
      term /= kRescaleAbove;
      sum /= kRescaleAbove;
      log_scale += kLogRescale;
    }
  }

  SeriesValue out;
  out.terms_used = m + 1;
  if (sum == 0.0) {
    out.sign = 0;
    out.log_abs = -std::numeric_limits<double>::infinity();
  } else {
    out.sign = sum > 0.0 ? 1 : -1;
    out.log_abs = std::log(std::fabs(sum)) + log_scale;
  }
  return out;
}

double hyp_series(const HypParams& p, const SeriesControl& ctrl) {
  return log_hyp_series(p, ctrl).value();
}

double hyp1f1(double a, double b, double z, const SeriesControl& ctrl) {
  return hyp_series(HypParams{{a}, {b}, z}, ctrl);
}

double hyp2f1(double a, double b, double c, double z, const SeriesControl& ctrl) {
  return hyp_series(HypParams{{a, b}, {c}, z}, ctrl);
}

SeriesValue log_hyp2f1(double a, double b, double c, double z,
                       const SeriesControl& ctrl) {
  return log_hyp_series(HypParams{{a, b}, {c}, z}, ctrl);
}

SeriesValue log_hyp2f1_at_minus_one(double a, double b, double c,
                                    const SeriesControl& ctrl) {
  SeriesValue v = log_hyp_series(HypParams{{a, c - b}, {c}, 0.5}, ctrl);
  v.log_abs -= a * std::log(2.0);
  return v;
}

SeriesValue log_hyp3f2(double a1, double a2, double a3, double b1, double b2,
                       double z, const SeriesControl& ctrl) {
  return log_hyp_series(HypParams{{a1, a2, a3}, {b1, b2}, z}, ctrl);
}

}  // namespace corrpost::specfun
