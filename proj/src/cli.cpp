#include "corrpost/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "corrpost/errors.hpp"
#include "corrpost/posterior.hpp"
#include "corrpost/sampler.hpp"
#include "corrpost/verify.hpp"

namespace corrpost::cli {

using nlohmann::ordered_json;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw DomainError("--prior: " + what + " is not a number: '" + s + "'");
}

std::vector<double> parse_numbers(const std::string& list, std::size_t count,
                                  const std::string& what) {
  const auto parts = split(list, ',');
  if (parts.size() != count) {
    throw DomainError("--prior " + what + " expects " + std::to_string(count) +
                      " comma-separated values");
  }
  std::vector<double> v;
  for (const auto& p : parts) v.push_back(parse_number(p, what));
  return v;
}

void write_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_value(std::string& out, const ordered_json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad =
      indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += ordered_json(key).dump();
        out += colon;
        write_value(out, value, indent, depth + 1);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& value : j) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_value(out, value, indent, depth + 1);
      }
      out += nl;
      out += close_pad;
      out += "]";
      return;
    }
    case ordered_json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

ordered_json prior_json(const PriorSpec& prior) {
  ordered_json j;
  j["name"] = prior.name;
  j["alpha"] = prior.eta.alpha();
  j["alpha_limit"] = prior.eta.alpha_is_limit();
  j["beta"] = prior.eta.beta();
  j["gamma"] = prior.eta.gamma();
  j["delta"] = prior.eta.delta();
  return j;
}

ordered_json stats_json(const SufficientStats& y, bool scales_known) {
  ordered_json j;
  j["n"] = y.n;
  j["r"] = y.r;
  if (scales_known) {
    j["s1"] = y.s1;
    j["s2"] = y.s2;
  }
  j["r_clamped"] = y.r_clamped;
  return j;
}

PosteriorModel build_model(const SufficientStats& y, const PriorSpec& prior) {
  if (auto why = prior.eta.violation(y.n)) throw DomainError(*why);
  return PosteriorModel(y, prior.eta);
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void require_input(const AnalysisRequest& req) {
  if (req.csv && (req.n || req.r)) throw DomainError("give either --csv or --n/--r, not both");
  if (!req.csv && !(req.n && req.r)) throw DomainError("need --csv or both --n and --r");
  if (req.csv && (req.s1 || req.s2)) throw DomainError("--s1/--s2 apply to summary input only");
  if (req.s1.has_value() != req.s2.has_value()) throw DomainError("give both --s1 and --s2");
}

int print_checks(const std::vector<verify::Check>& checks, std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& c : checks) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "err=%.3e tol=%.1e", c.achieved, c.tolerance);
    out << (c.passed ? "PASS " : "FAIL ") << c.suite << " [" << c.inputs << "] " << buf << "\n";
    if (!c.passed) ++failed;
  }
  out << (failed == 0 ? "all " : "") << checks.size() - failed << "/" << checks.size()
      << " checks passed\n";
  return failed == 0 ? kOk : kVerifyFailed;
}

}  // namespace

PriorSpec parse_prior(const std::string& text) {
  if (text == "jeffreys") return {text, PriorPreset{PresetKind::Jeffreys}.resolve()};
  if (text == "lindley") return {text, PriorPreset{PresetKind::Lindley}.resolve()};
  if (text == "right-haar") return {text, PriorPreset{PresetKind::RightHaar}.resolve()};
  if (text == "one-at-a-time") {
    return {text, PriorPreset{PresetKind::OneAtATimeReference}.resolve()};
  }
  if (text.rfind("wishart:", 0) == 0) {
    const auto v = parse_numbers(text.substr(8), 2, "wishart:a,b");
    const PriorPreset preset = PriorPreset::generalized_wishart(v[0], v[1]);
    return {preset.name(), preset.resolve()};
  }
  if (text.rfind("custom:", 0) == 0) {
    auto parts = split(text.substr(7), ',');
    if (parts.size() != 4) throw DomainError("--prior custom expects alpha,beta,gamma,delta");
    const bool limit = parts[0] == "limit";
    const double alpha = limit ? 0.0 : parse_number(parts[0], "alpha");
    const double beta = parse_number(parts[1], "beta");
    const double gamma = parse_number(parts[2], "gamma");
    const double delta = parse_number(parts[3], "delta");
    if (limit || alpha == 0.0) {
      if (!(beta >= 0.0)) throw DomainError("beta must be >= 0");
      return {"custom", Hyperparameters::alpha_limit(beta, gamma, delta)};
    }
    return {"custom", Hyperparameters(alpha, beta, gamma, delta)};
  }
  throw DomainError("unknown prior '" + text +
                    "' (jeffreys|lindley|right-haar|one-at-a-time|wishart:a,b|custom:a,b,g,d)");
}

SufficientStats request_stats(const AnalysisRequest& req, bool* scales_known) {
  require_input(req);
  if (req.csv) {
    *scales_known = true;
    const auto pairs = read_csv_pairs_file(*req.csv);
    return ingest(pairs);
  }
  *scales_known = req.s1.has_value();
  if (*req.n < 2) throw DomainError("need n >= 2");
  SufficientStats y = SufficientStats::from_summary(*req.n, *req.r, req.s1.value_or(1.0),
                                                    req.s2.value_or(1.0));
  y.validate();
  return y;
}

ordered_json analyze(const AnalysisRequest& req, std::ostream* density_csv) {
  if (req.grid < 3 || req.grid % 2 == 0) throw DomainError("--grid must be odd and >= 3");
  if (!(req.mass > 0.0 && req.mass < 1.0)) throw DomainError("--mass must be in (0, 1)");
  bool scales_known = false;
  const SufficientStats y = request_stats(req, &scales_known);
  const PriorSpec prior = parse_prior(req.prior);
  const PosteriorModel model = build_model(y, prior);
  const bool beta0 = prior.eta.beta() == 0.0;

  std::vector<MomentResult> moments;
  if (beta0) {
    for (unsigned k = 1; k <= 4; ++k) moments.push_back(moments_beta0(model, k));
  } else {
    const auto all = moments_general(model, 4);
    moments.assign(all.begin() + 1, all.end());
  }
  for (const auto& m : moments) {
    if (!m.converged) {
      throw NonConvergence("moment series k=" + std::to_string(m.order) + " did not converge",
                           m.terms_used);
    }
  }
  const double mean = moments[0].value;
  const double variance = moments[1].value - mean * mean;

  const double tail = 0.5 * (1.0 - req.mass);
  const double lower = quantile(model, tail);
  const double upper = quantile(model, 1.0 - tail);

  const auto rhos = uniform_rho_grid(static_cast<std::size_t>(req.grid));
  const auto dens = density_grid(model, rhos, Exec::Parallel);
  if (density_csv) {
    *density_csv << "rho,density\n";
    char buf[64];
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", rhos[i], dens[i]);
      *density_csv << buf;
    }
  }

  ordered_json post;
  post["mean"] = mean;
  post["variance"] = variance;
  ordered_json mom = ordered_json::array();
  for (const auto& m : moments) mom.push_back(m.value);
  post["moments"] = mom;
  post["interval"] = {{"lower", lower}, {"upper", upper}, {"mass", req.mass}};
  post["norm_constant"] = model.norm_constant();
  post["log_norm_constant"] = model.log_norm_constant();
  if (scales_known) {
    const double log_m0 = log_marginal_likelihood_rho0(y, prior.eta.gamma(), prior.eta.delta());
    post["log_marginal_likelihood_rho0"] = log_m0;
    post["log_marginal_likelihood"] = log_m0 + model.log_norm_constant();
  }
  post["density"] = {{"rho", rhos}, {"density", dens}};

  ordered_json diag;
  diag["density_method"] = beta0 ? "closed-form" : "general-beta-series";
  diag["norm_constant_scale"] =
      prior.eta.alpha_is_limit() ? "alpha-limit (1/B(1/2,alpha) cancelled)" : "normalized";
  diag["norm_series_terms"] = model.norm_terms_used();
  ordered_json terms = ordered_json::array();
  for (const auto& m : moments) terms.push_back(m.terms_used);
  diag["moment_series_terms"] = terms;
  diag["converged"] = true;
  diag["grid_points"] = req.grid;
  ordered_json warnings = ordered_json::array();
  if (y.r_clamped) warnings.push_back("|r| clamped to 1-1e-9");
  diag["warnings"] = warnings;

  ordered_json report;
  report["stats"] = stats_json(y, scales_known);
  report["prior"] = prior_json(prior);
  report["posterior"] = post;
  report["diagnostics"] = diag;
  return report;
}

std::string to_json_text(const ordered_json& j, int indent) {
  std::string out;
  write_value(out, j, indent, 0);
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian inference for the bivariate-normal correlation coefficient"};
  app.require_subcommand(1);

  AnalysisRequest req;
  auto add_input = [&req](CLI::App* cmd) {
    cmd->add_option("--n", req.n, "sample size");
    cmd->add_option("--r", req.r, "sample correlation");
    cmd->add_option("--s1", req.s1, "scale of the first variable (root mean square)");
    cmd->add_option("--s2", req.s2, "scale of the second variable");
    cmd->add_option("--csv", req.csv, "two-column CSV file of paired observations");
    cmd->add_option("--prior", req.prior,
                    "jeffreys|lindley|right-haar|one-at-a-time|wishart:a,b|custom:a,b,g,d")
        ->capture_default_str();
  };

  std::optional<std::string> out_path;

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "posterior summary as JSON");
  add_input(analyze_cmd);
  analyze_cmd->add_option("--grid", req.grid, "density grid points (odd, >= 3)")
      ->capture_default_str();
  analyze_cmd->add_option("--mass", req.mass, "equal-tail interval mass")->capture_default_str();
  analyze_cmd->add_option("--out", out_path, "write the density grid as CSV");

  std::size_t draws = 10000;
  std::size_t burn_in = 1000;
  std::optional<std::uint64_t> seed;
  double proposal_scale = 1.0;
  bool summary_only = false;
  CLI::App* sample_cmd = app.add_subcommand("sample", "independence Metropolis draws of rho");
  add_input(sample_cmd);
  sample_cmd->add_option("--draws", draws, "draws kept after burn-in")->capture_default_str();
  sample_cmd->add_option("--burn-in", burn_in, "discarded initial steps")->capture_default_str();
  sample_cmd->add_option("--seed", seed, "RNG seed (synthesized and echoed if absent)");
  sample_cmd->add_option("--proposal-scale", proposal_scale, "multiplier on the 1/sqrt(n) sd")
      ->capture_default_str();
  sample_cmd->add_flag("--summary-only", summary_only, "print a JSON summary instead of draws");
  sample_cmd->add_option("--out", out_path, "write draws to this file instead of stdout");

  std::string scope = "all";
  long verify_n = 5;
  double verify_r = 0.6;
  CLI::App* verify_cmd = app.add_subcommand("verify", "compare analytic results to quadrature");
  verify_cmd->add_option("scope", scope, "lemma|theorem|moments|all")
      ->check(CLI::IsMember({"lemma", "theorem", "moments", "all"}))
      ->capture_default_str();
  verify_cmd->add_option("--n", verify_n, "sample size for the theorem check")
      ->capture_default_str();
  verify_cmd->add_option("--r", verify_r, "correlation for the theorem check")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*analyze_cmd) {
      std::ofstream csv_file;
      if (out_path) {
        csv_file.open(*out_path);
        if (!csv_file) throw DomainError("cannot write " + *out_path);
      }
      const ordered_json report = analyze(req, out_path ? &csv_file : nullptr);
      out << to_json_text(report) << "\n";
      return kOk;
    }

    if (*sample_cmd) {
      bool scales_known = false;
      const SufficientStats y = request_stats(req, &scales_known);
      const PriorSpec prior = parse_prior(req.prior);
      const PosteriorModel model = build_model(y, prior);
      if (!(proposal_scale > 0.0)) throw DomainError("--proposal-scale must be > 0");
      const bool synthesized = !seed.has_value();
      const std::uint64_t used_seed = seed.value_or(fresh_seed());
      if (synthesized) err << "seed: " << used_seed << "\n";
      const ChainConfig cfg =
          ChainConfig::for_model(model, draws, burn_in, used_seed, proposal_scale);
      const ChainResult chain = run_chain(model, cfg);

      if (summary_only) {
        const DrawSummary s = summarize_draws(chain.draws);
        ordered_json j;
        j["stats"] = stats_json(y, scales_known);
        j["prior"] = prior_json(prior);
        j["sampler"] = {{"seed", used_seed},
                        {"seed_synthesized", synthesized},
                        {"draws", draws},
                        {"burn_in", burn_in},
                        {"proposal_mean", cfg.proposal_mean},
                        {"proposal_sd", cfg.proposal_sd},
                        {"acceptance_rate", chain.acceptance_rate},
                        {"mean", s.mean},
                        {"standard_error", s.standard_error}};
        out << to_json_text(j) << "\n";
        return kOk;
      }
      std::ofstream file;
      if (out_path) {
        file.open(*out_path);
        if (!file) throw DomainError("cannot write " + *out_path);
      }
      std::ostream& sink = out_path ? static_cast<std::ostream&>(file) : out;
      char buf[40];
      for (double d : chain.draws) {
        std::snprintf(buf, sizeof buf, "%.17f\n", d);
        sink << buf;
      }
      return kOk;
    }

    if (*verify_cmd) {
      std::vector<verify::Check> checks;
      auto append = [&checks](std::vector<verify::Check> more) {
        checks.insert(checks.end(), more.begin(), more.end());
      };
      if (scope == "lemma" || scope == "all") append(verify::lemma_suite());
      if (scope == "theorem" || scope == "all") {
        append(verify::theorem_suite(verify_n, verify_r, 1e-4, Exec::Parallel));
      }
      if (scope == "moments" || scope == "all") {
        append(verify::beta0_suite());
        append(verify::general_beta_suite());
      }
      return print_checks(checks, out);
    }
  } catch (const NonConvergence& e) {
    err << "error: numerical non-convergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const ToleranceNotMet& e) {
    err << "error: quadrature tolerance not met: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const DegenerateData& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kOk;
}

}  // namespace corrpost::cli
