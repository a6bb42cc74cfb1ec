#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "corrpost/cli.hpp"
#include "corrpost/posterior.hpp"
#include "corrpost/sampler.hpp"

using namespace corrpost;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "corrpost");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("corrpost_test_" + name)).string();
}

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = temp_path(name);
  std::ofstream(path) << content;
  return path;
}

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* kFiveRows = "x,y\n1.5,2.0\n2.5,2.9\n0.5,1.7\n3.0,4.4\n1.0,0.6\n";

}  // namespace

TEST_CASE("prior parsing") {
  CHECK(cli::parse_prior("jeffreys").eta == Hyperparameters(1, 0, 0, 0));
  CHECK(cli::parse_prior("lindley").eta == Hyperparameters::alpha_limit(0, 0, 0));
  CHECK(cli::parse_prior("right-haar").eta == Hyperparameters::alpha_limit(0, -1, 1));
  CHECK(cli::parse_prior("one-at-a-time").eta == Hyperparameters::alpha_limit(1, 0, 0));
  CHECK(cli::parse_prior("wishart:3,5").eta == Hyperparameters(1.5, 0, 1, 4));
  CHECK(cli::parse_prior("custom:0.5,1,-1,1").eta == Hyperparameters(0.5, 1, -1, 1));
  CHECK(cli::parse_prior("custom:limit,0,0,0").eta == Hyperparameters::alpha_limit(0, 0, 0));
  CHECK(cli::parse_prior("custom:0,2,0,0").eta == Hyperparameters::alpha_limit(2, 0, 0));
  CHECK_THROWS(cli::parse_prior("uniform"));
  CHECK_THROWS(cli::parse_prior("custom:1,2,3"));
  CHECK_THROWS(cli::parse_prior("wishart:a,b"));
  CHECK_THROWS(cli::parse_prior("custom:1,-1,0,0"));
}

TEST_CASE("analyze: mean equals the closed-form first moment") {
  const Outcome o = run({"analyze", "--n", "10", "--r", "0.6", "--prior", "jeffreys"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  const PosteriorModel m(SufficientStats::from_summary(10, 0.6), Hyperparameters(1, 0, 0, 0));
  CHECK(j["posterior"]["mean"].get<double>() == moments_beta0(m, 1).value);
  CHECK(j["posterior"]["moments"].size() == 4);
  CHECK(j["posterior"]["density"]["rho"].size() == 2001);
  CHECK_FALSE(j["posterior"].contains("log_marginal_likelihood"));
  const double lo = j["posterior"]["interval"]["lower"].get<double>();
  const double hi = j["posterior"]["interval"]["upper"].get<double>();
  CHECK(lo > -1.0);
  CHECK(lo < hi);
  CHECK(hi < 1.0);
  for (const auto& d : j["posterior"]["density"]["density"]) CHECK(d.get<double>() >= 0.0);
}

TEST_CASE("analyze: r = 0 gives mean 0 and a symmetric interval") {
  const Outcome o = run({"analyze", "--n", "10", "--r", "0", "--prior", "jeffreys", "--grid", "11"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["posterior"]["mean"].get<double>() == 0.0);
  const double lo = j["posterior"]["interval"]["lower"].get<double>();
  const double hi = j["posterior"]["interval"]["upper"].get<double>();
  CHECK(std::fabs(lo + hi) < 1e-9);
}

TEST_CASE("analyze --csv echoes the two-pass statistics") {
  const std::string path = write_file("five.csv", kFiveRows);
  const Outcome o = run({"analyze", "--csv", path, "--prior", "lindley", "--grid", "5"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  const double x[] = {1.5, 2.5, 0.5, 3.0, 1.0};
  const double y[] = {2.0, 2.9, 1.7, 4.4, 0.6};
  double mx = 0, my = 0;
  for (int i = 0; i < 5; ++i) {
    mx += x[i] / 5;
    my += y[i] / 5;
  }
  double sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < 5; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  CHECK(j["stats"]["n"].get<long>() == 5);
  CHECK(j["stats"]["r"].get<double>() == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-13));
  CHECK(j["stats"]["s1"].get<double>() == doctest::Approx(std::sqrt(sxx / 5)).epsilon(1e-13));
  CHECK(j["stats"]["s2"].get<double>() == doctest::Approx(std::sqrt(syy / 5)).epsilon(1e-13));
  CHECK(j["posterior"].contains("log_marginal_likelihood"));
  CHECK(j["prior"]["alpha_limit"].get<bool>());
}

TEST_CASE("analyze: CSV and summary input give identical reports") {
  const std::string path = write_file("equiv.csv", kFiveRows);
  const Outcome a = run({"analyze", "--csv", path, "--prior", "jeffreys", "--grid", "7"});
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  const Outcome b = run({"analyze", "--n", "5", "--r", g17(j["stats"]["r"].get<double>()), "--s1",
                         g17(j["stats"]["s1"].get<double>()), "--s2",
                         g17(j["stats"]["s2"].get<double>()), "--prior", "jeffreys", "--grid",
                         "7"});
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("JSON report round-trips") {
  const Outcome o = run({"analyze", "--n", "12", "--r", "-0.35", "--s1", "2", "--s2", "0.5",
                         "--prior", "custom:0.5,2,-1,1", "--grid", "9"});
  REQUIRE(o.code == 0);
  const nlohmann::ordered_json j = nlohmann::ordered_json::parse(o.out);
  CHECK(cli::to_json_text(j) + "\n" == o.out);
  const nlohmann::ordered_json again = nlohmann::ordered_json::parse(cli::to_json_text(j));
  CHECK(again == j);
}

TEST_CASE("17 significant digits") {
  nlohmann::ordered_json j;
  j["x"] = 0.1;
  j["big"] = 1e300;
  j["nan"] = std::nan("");
  j["list"] = {1, 2.5};
  CHECK(cli::to_json_text(j, 0) ==
        R"({"x":0.10000000000000001,"big":1.0000000000000001e+300,"nan":null,"list":[1,2.5]})");
}

TEST_CASE("density grid CSV output") {
  const std::string path = temp_path("grid.csv");
  const Outcome o = run({"analyze", "--n", "8", "--r", "0.2", "--grid", "5", "--out", path});
  REQUIRE(o.code == 0);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "rho,density");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
}

TEST_CASE("validation errors exit with code 2 and name the bound") {
  Outcome o = run({"analyze", "--n", "3", "--r", "0.5", "--prior", "custom:1,0,2,0"});
  CHECK(o.code == 2);
  CHECK(o.err.find("need n > gamma+1") != std::string::npos);
  CHECK(run({"analyze", "--r", "0.5"}).code == 2);
  CHECK(run({"analyze", "--n", "10", "--r", "0.5", "--grid", "10"}).code == 2);
  CHECK(run({"analyze", "--n", "10", "--r", "0.5", "--mass", "1.5"}).code == 2);
  CHECK(run({"analyze", "--n", "10", "--r", "1.5"}).code == 2);
  CHECK(run({"analyze", "--n", "10", "--r", "0.5", "--s1", "2"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  const std::string bad = write_file("bad.csv", "x,y\n1,2\n3,oops\n");
  o = run({"analyze", "--csv", bad});
  CHECK(o.code == 2);
  CHECK(o.err.find("row 3") != std::string::npos);
}

TEST_CASE("series exhaustion exits with code 3") {
  const Outcome o = run({"analyze", "--n", "100000000", "--r", "0.999", "--grid", "3"});
  CHECK(o.code == 3);
  CHECK(o.err.find("non-convergence") != std::string::npos);
}

TEST_CASE("sample: fixed seed gives identical bytes") {
  const Outcome a = run({"sample", "--n", "10", "--r", "0.6", "--seed", "123", "--draws", "500"});
  const Outcome b = run({"sample", "--n", "10", "--r", "0.6", "--seed", "123", "--draws", "500"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 500);
  CHECK(a.out.find('e') == std::string::npos);
}

TEST_CASE("sample: a missing seed is synthesized and echoed") {
  const Outcome o = run({"sample", "--n", "10", "--r", "0.6", "--draws", "50", "--summary-only"});
  REQUIRE(o.code == 0);
  CHECK(o.err.rfind("seed: ", 0) == 0);
  const json j = json::parse(o.out);
  CHECK(j["sampler"]["seed_synthesized"].get<bool>());
  CHECK(std::to_string(j["sampler"]["seed"].get<std::uint64_t>()) + "\n" == o.err.substr(6));
}

TEST_CASE("sample: draw mean agrees with the analytic mean") {
  const Outcome s = run({"sample", "--n", "10", "--r", "0.6", "--prior", "jeffreys", "--seed", "9",
                         "--draws", "20000"});
  REQUIRE(s.code == 0);
  std::vector<double> draws;
  std::istringstream in(s.out);
  for (double d; in >> d;) draws.push_back(d);
  REQUIRE(draws.size() == 20000);
  const DrawSummary sum = summarize_draws(draws);
  const json a = json::parse(run({"analyze", "--n", "10", "--r", "0.6", "--grid", "3"}).out);
  CHECK(std::fabs(sum.mean - a["posterior"]["mean"].get<double>()) <= 4.0 * sum.standard_error);
}

TEST_CASE("verify lemma passes all 27 cases") {
  const Outcome o = run({"verify", "lemma"});
  CHECK(o.code == 0);
  CHECK(o.out.find("all 27/27 checks passed") != std::string::npos);
  CHECK(run({"verify", "theorem", "--n", "5", "--r", "0.6"}).code == 0);
  CHECK(run({"verify", "nonsense"}).code == 2);
}
