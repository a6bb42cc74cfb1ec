#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include "corrpost/errors.hpp"
#include "corrpost/parallel.hpp"

namespace corrpost::quad {

struct QuadResult {
  double value = 0.0;
  double est_error = 0.0;
  std::size_t evaluations = 0;
};

/// An integrand value together with its own error, for nested integrals.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct QuadOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-9;
  std::size_t max_intervals = 4000;
  /// Evaluate the 15 nodes of each panel concurrently. Sums are always
  /// formed serially, so the result does not depend on this flag.
  Exec exec = Exec::Serial;
  bool throw_on_failure = true;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// Maps the reference panel onto the real line. Finite panels are affine;
// half-infinite ones use x = origin ± u / (1 - u) on u in [0, 1).
struct Mapping {
  enum Kind { Finite, Upper, Lower } kind = Finite;
  double origin = 0.0;

  double point(double u, double* jac) const {
    if (kind == Finite) {
      *jac = 1.0;
      return u;
    }
    const double w = 1.0 - u;
    *jac = 1.0 / (w * w);
    return kind == Upper ? origin + u / w : origin - u / w;
  }
};

struct Panel {
  double lo, hi;
  Mapping map;
  double value, error;
};

template <class F>
Estimate call(F& f, double x) {
  using R = std::invoke_result_t<F&, double>;
  if constexpr (std::is_same_v<std::decay_t<R>, Estimate>) {
    return f(x);
  } else {
    return Estimate{static_cast<double>(f(x)), 0.0};
  }
}

template <class F>
void gk15(F& f, Panel& p, Exec exec, std::size_t* evaluations) {
  const double center = 0.5 * (p.lo + p.hi);
  const double half = 0.5 * (p.hi - p.lo);
  std::array<double, 15> fv{};
  std::array<double, 15> ev{};
  std::array<double, 15> uv{};
  uv[0] = center;
  for (int j = 0; j < 7; ++j) {
    uv[1 + 2 * j] = center - half * kXgk[j];
    uv[2 + 2 * j] = center + half * kXgk[j];
  }
  auto node = [&](int i) {
    double jac = 1.0;
    const double x = p.map.point(uv[i], &jac);
    const Estimate e = call(f, x);
    fv[i] = e.value * jac;
    ev[i] = e.error * jac;
  };
  if (exec == Exec::Parallel) {
    parallel_for(15, node);
  } else {
    for (int i = 0; i < 15; ++i) node(i);
  }
  *evaluations += 15;

  double kron = fv[0] * kWgk[7];
  double gauss = fv[0] * kWg[3];
  double inner_err = ev[0] * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[1 + 2 * j] + fv[2 + 2 * j];
    kron += kWgk[j] * pair;
    inner_err += kWgk[j] * (ev[1 + 2 * j] + ev[2 + 2 * j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  p.value = kron * half;
  double err = std::fabs((kron - gauss) * half);
  if (!std::isfinite(p.value) || !std::isfinite(err)) {
    std::ostringstream os;
    os << "quadrature: non-finite integrand on panel [" << p.lo << ", " << p.hi << "]";
    throw ToleranceNotMet(os.str(), p.value, std::numeric_limits<double>::infinity());
  }
  // Raw |Kronrod - Gauss| plus the propagated error of nested integrands; no
  // QUADPACK (200 err / |I|)^1.5 rescaling.
  p.error = err + std::fabs(inner_err * half);
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the union of
/// [breaks[i], breaks[i+1]]. The first/last break may be -inf/+inf.
///
/// Subdivision always bisects the panel with the largest error estimate
/// (lowest index on ties), so results are reproducible.
template <class F>
QuadResult integrate_breakpoints(F&& f, const std::vector<double>& breaks,
                                 const QuadOptions& opt = {}) {
  using detail::Mapping;
  using detail::Panel;
  if (breaks.size() < 2) throw DomainError("quadrature: need at least two breakpoints");
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i] < breaks[i + 1])) {
      throw DomainError("quadrature: breakpoints must be strictly increasing");
    }
  }

  QuadResult res;
  std::vector<Panel> panels;
  panels.reserve(breaks.size() + 64);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    Panel p{};
    if (std::isinf(a) && std::isinf(b)) {
      throw DomainError("quadrature: split (-inf, inf) at a finite breakpoint");
    } else if (std::isinf(b)) {
      p = Panel{0.0, 1.0, Mapping{Mapping::Upper, a}, 0.0, 0.0};
    } else if (std::isinf(a)) {
      p = Panel{0.0, 1.0, Mapping{Mapping::Lower, b}, 0.0, 0.0};
    } else {
      p = Panel{a, b, Mapping{}, 0.0, 0.0};
    }
    detail::gk15(f, p, opt.exec, &res.evaluations);
    panels.push_back(p);
  }

  auto totals = [&panels](double* value, double* error) {
    *value = 0.0;
    *error = 0.0;
    for (const Panel& p : panels) {
      *value += p.value;
      *error += p.error;
    }
  };

  double value = 0.0, error = 0.0;
  totals(&value, &error);
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::fabs(value)) &&
         panels.size() < opt.max_intervals) {
    auto worst = std::max_element(panels.begin(), panels.end(),
                                  [](const Panel& x, const Panel& y) { return x.error < y.error; });
    Panel left = *worst;
    Panel right = *worst;
    const double mid = 0.5 * (worst->lo + worst->hi);
    if (!(mid > worst->lo && mid < worst->hi)) break;  // panel at machine resolution
    left.hi = mid;
    right.lo = mid;
    detail::gk15(f, left, opt.exec, &res.evaluations);
    detail::gk15(f, right, opt.exec, &res.evaluations);
    *worst = left;
    panels.push_back(right);
    totals(&value, &error);
  }

  res.value = value;
  res.est_error = error;
  if (opt.throw_on_failure && error > std::max(opt.abs_tol, opt.rel_tol * std::fabs(value))) {
    std::ostringstream os;
    os << "quadrature: error estimate " << error << " above target (value " << value << ")";
    throw ToleranceNotMet(os.str(), value, error);
  }
  return res;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  if (std::isinf(a) && std::isinf(b)) {
    return integrate_breakpoints(std::forward<F>(f), {a, 0.0, b}, opt);
  }
  return integrate_breakpoints(std::forward<F>(f), {a, b}, opt);
}

}  // namespace corrpost::quad
