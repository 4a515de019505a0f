#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gadgets.hpp"
#include "subpower.hpp"

namespace cf {

struct SuiteOptions {
  uint64_t seed = 0xC10E;
  size_t budget_tuples = 2'000'000;
  int workers = 1;
  long long fuel = 1'000'000;
};

struct CheckRecord {
  std::string id;
  std::string anchor;
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string witness; // failure data, or skip reason, or informative note
  double millis = 0.0;
};

struct ClosureLine {
  int arity = 0;
  size_t tuples = 0;
  int rounds = 0;
  size_t peak_frontier = 0;
};

struct SuiteReport {
  std::string suite;
  int num_states = 0;
  bool was_normalized = false; // the runner normalized the input machine
  SuiteOptions opts;
  std::vector<CheckRecord> checks;
  std::vector<ClosureLine> closures; // stats of the shared sequential relations
  int passed = 0, failed = 0, skipped = 0;
  bool all_pass() const { return failed == 0; }
};

std::vector<std::string> suite_names();
bool is_suite_name(const std::string& name);

// Runs one suite against the machine. Machines without one instruction per
// state are normalized first (reported in the header).
SuiteReport run_suite(const MinskyMachine& machine, const std::string& suite,
                      const SuiteOptions& opts = {});

std::string report_text(const SuiteReport& report, bool timings = false);
std::string report_structured(const SuiteReport& report, bool timings = false);

// The worked four-instruction example machine used by fixtures and tests.
MinskyMachine example_machine();

} // namespace cf
