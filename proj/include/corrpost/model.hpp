#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace corrpost {

/// Largest |r| the posterior formulas accept; exactly collinear data is
/// clamped to this bound.
inline constexpr double kMaxAbsCorrelation = 1.0 - 1e-9;

/// Everything the posterior of rho needs from bivariate data.
///
/// s1 and s2 are root average sums of squares (divisor n, not n - 1).
struct SufficientStats {
  long n = 0;
  double xbar1 = 0.0;
  double xbar2 = 0.0;
  double s1 = 1.0;
  double s2 = 1.0;
  double r = 0.0;
  bool r_clamped = false;

  /// Summary-only statistics: means 0, unit scales.
  static SufficientStats from_summary(long n, double r, double s1 = 1.0, double s2 = 1.0);

  /// Throws DegenerateData unless n >= 2, s1, s2 > 0 and |r| < 1.
  void validate() const;
};

/// Clamps r into [-kMaxAbsCorrelation, kMaxAbsCorrelation].
double clamp_correlation(double r, bool* clamped = nullptr);

/// Means, scales and correlation of paired observations (single pass).
SufficientStats ingest(std::span<const std::pair<double, double>> pairs);

/// Reads two numeric comma-separated columns. A first row that is not
/// numeric is treated as a header. Throws DegenerateData naming the row.
std::vector<std::pair<double, double>> read_csv_pairs(std::istream& in);
std::vector<std::pair<double, double>> read_csv_pairs_file(const std::string& path);

/// Exponents of the prior class
///   (1 - rho^2)^(alpha-1) (1 + rho^2)^(beta/2) sigma1^(gamma-1) sigma2^(delta-1).
///
/// alpha is either strictly positive or the alpha -> 0+ limit flag, in which
/// case no normalized prior on rho exists and every operation switches to
/// formulas where 1/B(1/2, alpha) has been cancelled.
class Hyperparameters {
 public:
  /// Proper prior on rho; requires alpha > 0 and beta >= 0.
  Hyperparameters(double alpha, double beta, double gamma, double delta);

  /// The improper alpha -> 0+ limit.
  static Hyperparameters alpha_limit(double beta, double gamma, double delta);

  bool alpha_is_limit() const { return limit_; }
  /// 0 for the limit flag.
  double alpha() const { return limit_ ? 0.0 : alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double delta() const { return delta_; }

  /// n > gamma + 1 and n > delta + 1.
  bool theorem_valid(long n) const;
  /// theorem_valid and n > gamma + delta - 2 alpha + 1.
  bool posterior_valid(long n) const;
  /// Names the first violated bound, or nullopt when posterior_valid.
  std::optional<std::string> violation(long n) const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;

 private:
  Hyperparameters() = default;

  double alpha_ = 1.0;
  double beta_ = 0.0;
  double gamma_ = 0.0;
  double delta_ = 0.0;
  bool limit_ = false;
};

enum class PresetKind { Jeffreys, Lindley, RightHaar, OneAtATimeReference, GeneralizedWishart };

struct PriorPreset {
  PresetKind kind = PresetKind::Jeffreys;
  double wishart_a = 0.0;  // only for GeneralizedWishart
  double wishart_b = 0.0;

  static PriorPreset generalized_wishart(double a, double b) {
    return {PresetKind::GeneralizedWishart, a, b};
  }

  Hyperparameters resolve() const;
  std::string name() const;
};

/// ln C_{alpha,beta}, the normalizer of the prior on rho:
/// C = B(1/2, alpha) 2F1(-beta/2, 1/2; alpha + 1/2; -1).
double log_prior_norm_constant(const Hyperparameters& eta);
double prior_norm_constant(const Hyperparameters& eta);

/// ln of the unnormalized prior kernel (1-rho^2)^(alpha-1) (1+rho^2)^(beta/2),
/// with alpha = 0 under the limit flag. log1m_rho2 is ln(1 - rho^2).
double log_prior_kernel(double rho, double log1m_rho2, const Hyperparameters& eta);

/// Normalized prior density on (-1, 1).
double prior_density(double rho, const Hyperparameters& eta);

/// ln(1 - rho^2) without cancellation near |rho| = 1.
double log1m_square(double rho);

}  // namespace corrpost
