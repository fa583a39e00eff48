#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace coarsening {

using json = nlohmann::json;

struct RunOptions {
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> replicas;
};

struct ExperimentResult {
  std::string experiment;
  json spec;  // fully resolved configuration
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  json summary;
  double wall_clock_seconds = 0.0;

  /// UTF-8 CSV with a header row and RFC 4180 quoting.
  std::string csv() const;
  /// Spec echo, seeds, seed rule, input hash, summary and timing.
  json sidecar() const;
};

const std::vector<std::string>& experiment_names();

/// Default configuration. Keys starting with '_' are annotations.
json default_config(const std::string& experiment);

/// Merges `user` over the defaults and applies the overrides. Unknown keys
/// and mistyped values raise InputError.
json resolve_config(const std::string& experiment, const json& user, const RunOptions& options);

ExperimentResult run_experiment(const std::string& experiment, const json& user_config,
                                const RunOptions& options = {});

/// Writes the CSV to `csv_path` and the sidecar to `csv_path + ".json"`.
void write_result(const ExperimentResult& result, const std::string& csv_path);

/// SHA-1 of "blob <size>\0" + content, lowercase hex.
std::string git_blob_sha1(const std::string& content);

std::string csv_field(const std::string& field);

/// Shortest text that round-trips to the same double.
std::string format_double(double v);

}  // namespace coarsening
