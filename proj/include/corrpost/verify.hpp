#pragma once

#include <string>
#include <vector>

#include "corrpost/parallel.hpp"

/// Oracle suites behind `corrpost verify`: each check compares an analytic
/// value against an independent quadrature.
namespace corrpost::verify {

struct Check {
  std::string suite;
  std::string inputs;      // e.g. "a=0.5 b=-1 c=1"
  double achieved = 0.0;   // scaled error, see relative_error
  double tolerance = 0.0;
  bool passed = false;
};

/// |value - ref| / max(|ref|, abs_floor / rel_tol): a relative error that
/// falls back to an absolute floor when the reference is (near) zero.
double relative_error(double value, double ref, double rel_tol, double abs_floor = 1e-12);

Check make_check(std::string suite, std::string inputs, double value, double ref,
                 double rel_tol, double abs_floor = 1e-12);

/// Closed form vs quadrature on a ∈ {0.5,1,2} × b ∈ {-1,0,1} × c ∈ {1,2,3.5}.
std::vector<Check> lemma_suite(double rel_tol = 1e-8);

/// 4D integral / h(ρ) over ρ ∈ {-0.8,-0.4,0,0.4,0.8} against the marginal
/// likelihood at ρ = 0, for (γ,δ) ∈ {(0,0), (-1,1)}; unit scales.
std::vector<Check> theorem_suite(long n, double r, double rel_tol = 1e-4,
                                 Exec exec = Exec::Serial);

/// β = 0 normalizer and E[ρ^k], k = 1..4, vs quadrature over
/// n ∈ {5,10,50}, r ∈ {-0.9,0,0.6}, α ∈ {limit,0.5,1,2}, (γ,δ) ∈ {(0,0),(-1,1)}.
std::vector<Check> beta0_suite(double rel_tol = 1e-8);

/// General-β series for β ∈ {1,2}, k = 0..3, vs quadrature on n ∈ {5,10},
/// r ∈ {0,0.6}, α ∈ {0.5,1}, and the β = 0 series vs the closed forms.
std::vector<Check> general_beta_suite(double rel_tol = 1e-7, double beta0_tol = 1e-10);

}  // namespace corrpost::verify
