#pragma once

#include "introlab/anred.hpp"

namespace introlab {

struct ExperimentResult {
  json report;
  bool pass = false;
};

using ExperimentFn = std::function<ExperimentResult(const json& params, uint64_t seed)>;

const std::map<std::string, ExperimentFn>& experiment_registry();
ExperimentResult run_experiment(const std::string& name, const json& params, uint64_t seed);

// Runs every acceptance experiment; the report is deterministic given the
// seed (timings go to stderr, never into the report).
json run_suite(uint64_t seed);

// Bundled toy instances (parsed from the data directory next to the binary
// or from the path in INTROLAB_DATA).
std::string data_path(const std::string& filename);
SuccinctSatInstance load_instance(const std::string& filename);

}  // namespace introlab
