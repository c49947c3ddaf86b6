#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "pcore/core.hpp"
#include "pcore/swcu.hpp"

namespace pcore {

// Line-oriented key-value configuration. Globals first, then one section per
// partition:
//
//   switch_window = 10
//   clock_hz = 50000000
//   horizon = 2400040
//   trace = run.csv
//   inject = samples.csv
//   verbose = 0
//
//   [partition 0]
//   period_cycles = 800020
//   exec_cycles = 200000
//   offset_cycles = 10
//   enabled = 1
//   code = p0.bin
//   data = p0.dat
//
// All times are cycles. Relative file paths resolve against the directory of
// the config file.
struct RunConfig {
  PartitionSchedule schedule;
  std::array<std::string, 3> code_paths{};
  std::array<std::string, 3> data_paths{};
  uint64_t horizon = 0;
  std::string trace_path;
  std::string inject_path;
  bool verbose = false;
};

RunConfig parse_config_text(std::string_view text, const std::string& base_dir = "");
RunConfig parse_config_file(const std::string& path);

// Sample-injection script: CSV lines `cycle,port,value`.
std::vector<Injection> parse_injection_csv(const std::string& path);

}  // namespace pcore
