#pragma once

#include <vector>

#include "pcore/core.hpp"
#include "pcore/image.hpp"
#include "pcore/isa.hpp"
#include "pcore/swcu.hpp"

namespace test_support {

inline pcore::CodeImage make_code(const std::vector<pcore::isa::Instruction>& prog) {
  pcore::CodeImage image;
  image.reserve(prog.size());
  for (const auto& in : prog) image.push_back(pcore::isa::encode(in));
  return image;
}

// One partition granted at cycle 0 and never interrupted within `cycles`.
inline pcore::PartitionSchedule always_on(uint64_t cycles, int partition = 0) {
  pcore::PartitionSchedule s;
  s.parts[partition].enabled = true;
  s.parts[partition].exec_cycles = cycles + 100;
  s.parts[partition].period_cycles = cycles + 200;
  s.parts[partition].offset_cycles = s.switch_window;
  return s;
}

// Single partition repeatedly re-granted in windows of `exec` cycles.
inline pcore::PartitionSchedule chopped(uint64_t exec, int partition = 0) {
  pcore::PartitionSchedule s;
  s.parts[partition].enabled = true;
  s.parts[partition].exec_cycles = exec;
  s.parts[partition].period_cycles = exec + s.switch_window;
  s.parts[partition].offset_cycles = s.switch_window;
  return s;
}

// Exactly tiling round-robin schedule over the first `execs.size()` partitions.
inline pcore::PartitionSchedule tiled(const std::vector<uint64_t>& execs) {
  pcore::PartitionSchedule s;
  uint64_t total = 0;
  for (uint64_t e : execs) total += e + s.switch_window;
  uint64_t start = 0;
  for (size_t i = 0; i < execs.size(); ++i) {
    s.parts[i].enabled = true;
    s.parts[i].exec_cycles = execs[i];
    s.parts[i].period_cycles = total;
    s.parts[i].offset_cycles = i == 0 ? s.switch_window : start;
    start += execs[i] + s.switch_window;
  }
  return s;
}

}  // namespace test_support
