#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "records.hpp"

namespace qlab::tools {

struct BatteryConfig {
  std::uint64_t seed = 7;
  bool inject_fault = false;  // perturbs one frozen constant to prove the harness bites
};

struct CheckOutcome {
  std::string id;
  std::string claim;  // one-line statement of what the check certifies
  bool pass = false;
};

CheckOutcome check_noisy_or(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_walk(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_slice_ratio(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_or_slice_facts(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_parity_identities(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_three_slice(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_extraction(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_solvers(const BatteryConfig& cfg, RecordSink& sink);
CheckOutcome check_which(const BatteryConfig& cfg, RecordSink& sink);

// Runs every check in order, streaming records to sink and the summary table
// to human. Returns 0 when all checks pass, 1 otherwise.
int reproduce_all(const BatteryConfig& cfg, RecordSink& sink, std::ostream& human);

}  // namespace qlab::tools
