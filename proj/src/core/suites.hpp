#pragma once

#include <optional>
#include <string>

#include "json_io.hpp"

namespace torkos {

// One batch verification run: a fan, an optional sheaf or line-bundle
// input, the suite to run, and the degree set to sweep. An empty window
// asks for the default box around the job's own degrees (padded by two),
// or for chamber representatives when `chambers` is set.
struct SuiteJob {
  const Fan* fan = nullptr;
  std::string suite;
  std::optional<Sheaf> sheaf;
  std::optional<EquivariantLineBundle> bundle;
  std::vector<LVec> window;
  bool chambers = false;
  int jobs = 1;
};

struct SuiteResult {
  nlohmann::json report;
  bool passed = true;
};

const std::vector<std::string>& suite_names();

// Routes a sheaf-or-bundle description into the matching job slot.
void attach_sheaf_json(SuiteJob& job, const nlohmann::json& desc);

// Runs the named suite and aggregates a deterministic report: repeated runs
// (at any parallelism) serialize to identical bytes. Check failures land in
// the report; malformed inputs and inapplicable suites throw.
SuiteResult run_suite(const SuiteJob& job);

}  // namespace torkos
