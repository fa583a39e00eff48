#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "experiments.hpp"

using namespace coarsening;

namespace {
// Small budgets for every stochastic experiment.
json small_config(const std::string& name) {
  if (name == "coupling") return {{"t", 1.0}, {"replicas", 300}};
  if (name == "current-lln") return {{"t_grid", {5.0, 10.0}}, {"replicas", 50}};
  if (name == "ld-tail") return {{"t_grid", {8.0, 16.0}}, {"replicas", 200}};
  if (name == "erosion-scaling") return {{"L_grid", {4.0, 8.0}}, {"replicas", 20}};
  if (name == "q1-box-fixation") return {{"n_grid", {4.0, 8.0}}, {"replicas", 40}};
  if (name == "fixation-probe") return {{"L", 16}, {"t_grid", {2.0, 4.0}}, {"horizon", 8.0}, {"replicas", 20}};
  if (name == "mbp-spanning") return {{"n_grid", {4.0, 8.0}}, {"replicas", 200}};
  if (name == "fredholm")
    return {{"N_zeta", 32}, {"N_eta", 16}, {"N_mu", 16}, {"n_max", 2}, {"refine", false}, {"mc_replicas", 200}};
  return json::object();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("git blob hash") {
  CHECK(git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("csv field quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("every experiment has defaults with a seed") {
  CHECK(experiment_names().size() == 10);
  for (const auto& name : experiment_names()) {
    const json d = default_config(name);
    CHECK(d.contains("seed"));
    CHECK(d.contains("threads"));
  }
  CHECK_THROWS_AS(default_config("nope"), InputError);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(resolve_config("coupling", {{"bogus", 1}}, {}), InputError);
  CHECK_THROWS_AS(resolve_config("coupling", {{"q", "high"}}, {}), InputError);
  CHECK_THROWS_AS(resolve_config("coupling", {{"seed", -1}}, {}), InputError);
  CHECK_THROWS_AS(resolve_config("coupling", {{"experiment", "rate"}}, {}), InputError);
  CHECK_THROWS_AS(resolve_config("coupling", json::array(), {}), InputError);
  CHECK_NOTHROW(resolve_config("coupling", {{"experiment", "coupling"}, {"_comment", "x"}}, {}));

  RunOptions o;
  o.seed = 7;
  o.replicas = 11;
  o.threads = 2;
  const json c = resolve_config("coupling", json::object(), o);
  CHECK(c.at("seed") == 7);
  CHECK(c.at("replicas") == 11);
  CHECK(c.at("threads") == 2);
  CHECK_FALSE(c.contains("_notes"));
  CHECK_THROWS_AS(run_experiment("coupling", {{"q", 1.5}}, {}), InputError);
}

TEST_CASE("coupling at t = 0 is certain on both sides") {
  const auto r = run_experiment("coupling", {{"t", 0.0}, {"replicas", 100}});
  CHECK(r.summary.at("coarsening_minus_probability").get<double>() == 1.0);
  CHECK(r.summary.at("asep_probability").get<double>() == 1.0);
  CHECK(r.summary.at("z_score").get<double>() == 0.0);
}

TEST_CASE("sidecar contents") {
  const auto r = run_experiment("rate", json::object());
  const json s = r.sidecar();
  CHECK(s.at("experiment") == "rate");
  CHECK(s.at("spec") == r.spec);
  CHECK(s.at("input_sha1") == git_blob_sha1(r.spec.dump()));
  CHECK(s.contains("seed_rule"));
  CHECK(s.contains("wall_clock_seconds"));
  const std::string csv = r.csv();
  CHECK(csv.rfind("eps,", 0) == 0);
  CHECK(csv.find("\r\n") != std::string::npos);
}

TEST_CASE("reruns from the echoed spec are bit-identical at any thread count") {
  for (const auto& name : experiment_names()) {
    INFO(name);
    const json cfg = small_config(name);
    RunOptions one;
    one.threads = 1;
    const auto a = run_experiment(name, cfg, one);
    json echoed = a.spec;
    echoed.erase("threads");
    RunOptions many;
    many.threads = 4;
    const auto b = run_experiment(name, echoed, many);
    CHECK(a.csv() == b.csv());
    const auto c = run_experiment(name, a.spec, one);
    CHECK(a.csv() == c.csv());
  }
}

TEST_CASE("different seeds give different samples") {
  const auto a = run_experiment("mbp-spanning", {{"replicas", 300}, {"seed", 1}});
  const auto b = run_experiment("mbp-spanning", {{"replicas", 300}, {"seed", 2}});
  CHECK(a.csv() != b.csv());
}

TEST_CASE("write_result writes the csv and the sidecar") {
  const auto dir = std::filesystem::temp_directory_path() / "coarsening_test_out";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "rate.csv").string();
  const auto r = run_experiment("rate", json::object());
  write_result(r, path);
  CHECK(slurp(path) == r.csv());
  const json side = json::parse(slurp(path + ".json"));
  CHECK(side.at("experiment") == "rate");
  std::filesystem::remove_all(dir);
}
