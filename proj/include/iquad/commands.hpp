#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "iquad/config.hpp"
#include "iquad/reconstruct.hpp"

namespace iquad {

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitUsage = 2, kExitIo = 3 };

struct Setup {
  Grid grid;
  SensorSpec spec;
};
Setup make_setup(const RunConfig& cfg);
ScalarField load_phase(const RunConfig& cfg, const Setup& setup);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool upper_bound = true;  // pass when value <= threshold, else value >= threshold
  bool pass() const { return upper_bound ? value <= threshold : value >= threshold; }
};
std::vector<VerifyCheck> run_verify_suite(const RunConfig& cfg);

int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_reconstruct(const RunConfig& cfg, std::ostream& log);
int cmd_compare(const RunConfig& cfg, std::ostream& log);
int cmd_scan(const RunConfig& cfg, std::ostream& log);

// dispatches on cfg.command and maps exceptions to exit codes
int run_command(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace iquad
