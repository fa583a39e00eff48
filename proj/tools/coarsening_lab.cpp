#include <coarsening/coarsening.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

namespace {

int fail(cl_status status) {
  std::cerr << "coarsening-lab: " << cl_last_error() << '\n';
  return status == CL_ERR_WORKLOAD ? 3 : status == CL_ERR_INVALID ? 2 : 1;
}

std::string experiment_list() {
  std::string out;
  for (size_t i = 0; i < cl_experiment_count(); ++i) {
    if (i > 0) out += ", ";
    out += cl_experiment_name(i);
  }
  return out;
}

bool known(const std::string& name) {
  for (size_t i = 0; i < cl_experiment_count(); ++i) {
    if (name == cl_experiment_name(i)) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and numerical experiments for zero-temperature Ising coarsening"};
  app.footer("Experiments: " + experiment_list());

  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
  std::string out_path;
  unsigned threads = 0;
  bool dump_defaults = false;
  bool list = false;

  app.add_option("experiment", experiment, "Experiment name");
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--replicas", replicas, "Replica count");
  app.add_option("--out", out_path, "CSV output path; the sidecar goes to PATH.json");
  app.add_option("--threads", threads, "Worker threads (0 = configured value)");
  app.add_flag("--dump-defaults", dump_defaults, "Print the annotated default configuration");
  app.add_flag("--list", list, "List experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list) {
    for (size_t i = 0; i < cl_experiment_count(); ++i) std::cout << cl_experiment_name(i) << '\n';
    return 0;
  }
  if (experiment.empty()) {
    std::cerr << "coarsening-lab: an experiment name is required (" << experiment_list() << ")\n";
    return 2;
  }
  if (!known(experiment)) {
    std::cerr << "coarsening-lab: unknown experiment '" << experiment << "' (" << experiment_list() << ")\n";
    return 2;
  }

  if (dump_defaults) {
    char* text = nullptr;
    const cl_status st = cl_default_config(experiment.c_str(), &text);
    if (st != CL_OK) return fail(st);
    std::cout << text;
    cl_string_free(text);
    return 0;
  }

  std::string config_text;
  if (!config_path.empty()) {
    std::ifstream in(config_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    config_text = buf.str();
  }

  cl_run_options opts{};
  opts.threads = threads;
  if (seed) {
    opts.has_seed = 1;
    opts.seed = *seed;
  }
  if (replicas) {
    opts.has_replicas = 1;
    opts.replicas = *replicas;
  }

  cl_result* result = nullptr;
  const cl_status st = cl_run_experiment(experiment.c_str(), config_path.empty() ? nullptr : config_text.c_str(),
                                         &opts, &result);
  if (st != CL_OK) return fail(st);

  if (out_path.empty()) {
    std::cout << cl_result_csv(result);
    std::cerr << cl_result_sidecar(result);
  } else {
    const cl_status wst = cl_result_write(result, out_path.c_str());
    if (wst != CL_OK) {
      cl_result_free(result);
      return fail(wst);
    }
    std::cerr << "wrote " << out_path << " and " << out_path << ".json\n";
  }
  cl_result_free(result);
  return 0;
}
