#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "corrpost/model.hpp"

namespace corrpost::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kInvalid = 2, kNonConvergence = 3 };

/// A parsed --prior value: the preset or "custom" name and its exponents.
struct PriorSpec {
  std::string name;
  Hyperparameters eta;
};

/// jeffreys | lindley | right-haar | one-at-a-time | wishart:a,b |
/// custom:alpha,beta,gamma,delta (alpha = 0 or "limit" selects the
/// alpha -> 0+ limit). Throws DomainError on anything else.
PriorSpec parse_prior(const std::string& text);

struct AnalysisRequest {
  std::optional<std::string> csv;
  std::optional<long> n;
  std::optional<double> r;
  std::optional<double> s1;
  std::optional<double> s2;
  std::string prior = "jeffreys";
  long grid = 2001;
  double mass = 0.95;
};

/// Sufficient statistics from the request, and whether the scales are known.
SufficientStats request_stats(const AnalysisRequest& req, bool* scales_known);

/// The analyze report. When density_csv is given the density grid is also
/// written there as "rho,density" rows.
nlohmann::ordered_json analyze(const AnalysisRequest& req, std::ostream* density_csv = nullptr);

/// JSON text with every floating-point number printed with 17 significant
/// digits; non-finite numbers become null.
std::string to_json_text(const nlohmann::ordered_json& j, int indent = 2);

/// Entry point of the corrpost executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corrpost::cli
