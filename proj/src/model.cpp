#include "corrpost/model.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string_view>

#include "corrpost/errors.hpp"
#include "corrpost/specfun.hpp"

namespace corrpost {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

SufficientStats SufficientStats::from_summary(long n, double r, double s1, double s2) {
  SufficientStats y;
  y.n = n;
  y.s1 = s1;
  y.s2 = s2;
  if (!(std::fabs(r) <= 1.0)) {
    throw DegenerateData("sample correlation must lie in [-1, 1], got " + fmt(r));
  }
  y.r = clamp_correlation(r, &y.r_clamped);
  y.validate();
  return y;
}

void SufficientStats::validate() const {
  if (n < 2) throw DegenerateData("need n >= 2, got " + std::to_string(n));
  if (!(s1 > 0.0) || !(s2 > 0.0) || !std::isfinite(s1) || !std::isfinite(s2)) {
    throw DegenerateData("scales s1, s2 must be positive and finite");
  }
  if (!(std::fabs(r) < 1.0)) throw DegenerateData("need |r| < 1, got " + fmt(r));
}

double clamp_correlation(double r, bool* clamped) {
  double out = r;
  if (r > kMaxAbsCorrelation) out = kMaxAbsCorrelation;
  if (r < -kMaxAbsCorrelation) out = -kMaxAbsCorrelation;
  if (clamped != nullptr) *clamped = out != r;
  return out;
}

SufficientStats ingest(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2) {
    throw DegenerateData("need at least 2 rows, got " + std::to_string(pairs.size()));
  }
  // Welford updates for both means and the co-moment.
  double m1 = 0.0, m2 = 0.0, c11 = 0.0, c22 = 0.0, c12 = 0.0;
  double k = 0.0;
  for (const auto& [x1, x2] : pairs) {
    k += 1.0;
    const double d1 = x1 - m1;
    const double d2 = x2 - m2;
    m1 += d1 / k;
    m2 += d2 / k;
    const double e1 = x1 - m1;
    const double e2 = x2 - m2;
    c11 += d1 * e1;
    c22 += d2 * e2;
    c12 += 0.5 * (d1 * e2 + d2 * e1);
  }
  if (!(c11 > 0.0)) throw DegenerateData("column 1 is constant");
  if (!(c22 > 0.0)) throw DegenerateData("column 2 is constant");

  SufficientStats y;
  y.n = static_cast<long>(pairs.size());
  y.xbar1 = m1;
  y.xbar2 = m2;
  y.s1 = std::sqrt(c11 / k);
  y.s2 = std::sqrt(c22 / k);
  y.r = clamp_correlation(c12 / std::sqrt(c11 * c22), &y.r_clamped);
  return y;
}

std::vector<std::pair<double, double>> read_csv_pairs(std::istream& in) {
  std::vector<std::pair<double, double>> rows;
  std::string line;
  long row = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    std::optional<double> a, b;
    bool two_fields = comma != std::string_view::npos &&
                      view.find(',', comma + 1) == std::string_view::npos;
    if (two_fields) {
      a = parse_number(view.substr(0, comma));
      b = parse_number(view.substr(comma + 1));
    }
    if (first_content) {
      first_content = false;
      if (two_fields && (!a || !b)) continue;  // header row
    }
    if (!two_fields) {
      throw DegenerateData("row " + std::to_string(row) + ": expected exactly 2 columns");
    }
    if (!a || !b) {
      throw DegenerateData("row " + std::to_string(row) + ": non-numeric field");
    }
    rows.emplace_back(*a, *b);
  }
  return rows;
}

std::vector<std::pair<double, double>> read_csv_pairs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DegenerateData("cannot open CSV file '" + path + "'");
  return read_csv_pairs(in);
}

Hyperparameters::Hyperparameters(double alpha, double beta, double gamma, double delta)
    : alpha_(alpha), beta_(beta), gamma_(gamma), delta_(delta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw DomainError("alpha must be > 0 (use the alpha -> 0+ limit for Lindley-type priors), got " +
                      fmt(alpha));
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw DomainError("beta must be >= 0, got " + fmt(beta));
  }
  if (!std::isfinite(gamma) || !std::isfinite(delta)) {
    throw DomainError("gamma and delta must be finite");
  }
}

Hyperparameters Hyperparameters::alpha_limit(double beta, double gamma, double delta) {
  Hyperparameters eta(1.0, beta, gamma, delta);
  eta.alpha_ = 0.0;
  eta.limit_ = true;
  return eta;
}

bool Hyperparameters::theorem_valid(long n) const {
  const double dn = static_cast<double>(n);
  return dn > gamma_ + 1.0 && dn > delta_ + 1.0;
}

bool Hyperparameters::posterior_valid(long n) const { return !violation(n).has_value(); }

std::optional<std::string> Hyperparameters::violation(long n) const {
  const double dn = static_cast<double>(n);
  if (!(dn > gamma_ + 1.0)) {
    return "need n > gamma+1 (n = " + std::to_string(n) + ", gamma = " + fmt(gamma_) + ")";
  }
  if (!(dn > delta_ + 1.0)) {
    return "need n > delta+1 (n = " + std::to_string(n) + ", delta = " + fmt(delta_) + ")";
  }
  if (!(dn > gamma_ + delta_ - 2.0 * alpha() + 1.0)) {
    return "need n > gamma+delta-2*alpha+1 (n = " + std::to_string(n) + ")";
  }
  return std::nullopt;
}

Hyperparameters PriorPreset::resolve() const {
  switch (kind) {
    case PresetKind::Jeffreys:
      return Hyperparameters(1.0, 0.0, 0.0, 0.0);
    case PresetKind::Lindley:
      return Hyperparameters::alpha_limit(0.0, 0.0, 0.0);
    case PresetKind::RightHaar:
      return Hyperparameters::alpha_limit(0.0, -1.0, 1.0);
    case PresetKind::OneAtATimeReference:
      return Hyperparameters::alpha_limit(1.0, 0.0, 0.0);
    case PresetKind::GeneralizedWishart: {
      const double alpha = wishart_b / 2.0 - 1.0;
      if (alpha == 0.0) return Hyperparameters::alpha_limit(0.0, wishart_a - 2.0, wishart_b - 1.0);
      return Hyperparameters(alpha, 0.0, wishart_a - 2.0, wishart_b - 1.0);
    }
  }
  throw DomainError("unknown prior preset");
}

std::string PriorPreset::name() const {
  switch (kind) {
    case PresetKind::Jeffreys: return "jeffreys";
    case PresetKind::Lindley: return "lindley";
    case PresetKind::RightHaar: return "right-haar";
    case PresetKind::OneAtATimeReference: return "one-at-a-time";
    case PresetKind::GeneralizedWishart:
      return "wishart:" + fmt(wishart_a) + "," + fmt(wishart_b);
  }
  return "unknown";
}

double log1m_square(double rho) { return std::log1p(-rho) + std::log1p(rho); }

double log_prior_norm_constant(const Hyperparameters& eta) {
  if (eta.alpha_is_limit()) {
    throw DomainError("prior on rho is improper in the alpha -> 0+ limit; no normalizer");
  }
  double log_c = specfun::log_beta(0.5, eta.alpha());
  if (eta.beta() != 0.0) {
    log_c += specfun::log_hyp2f1_at_minus_one(-eta.beta() / 2.0, 0.5, eta.alpha() + 0.5).log_abs;
  }
  return log_c;
}

double prior_norm_constant(const Hyperparameters& eta) {
  return std::exp(log_prior_norm_constant(eta));
}

double log_prior_kernel(double rho, double log1m_rho2, const Hyperparameters& eta) {
  double out = (eta.alpha() - 1.0) * log1m_rho2;
  if (eta.beta() != 0.0) out += 0.5 * eta.beta() * std::log1p(rho * rho);
  return out;
}

double prior_density(double rho, const Hyperparameters& eta) {
  if (!(std::fabs(rho) < 1.0)) throw DomainError("prior_density: need |rho| < 1");
  const double log_c = log_prior_norm_constant(eta);
  return std::exp(log_prior_kernel(rho, log1m_square(rho), eta) - log_c);
}

}  // namespace corrpost
