#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pcore/trace.hpp"

namespace pcore::wcet {

// Effective worst-case execution time of a task inside a partition.
//
//   tau_a0  task WCET on an unpartitioned core, cycles
//   tau_p   partition execution time per grant, cycles
//   ep      partition periodicity, grant to grant including switch overhead
struct WcetQuery {
  uint64_t tau_a0 = 0;
  uint64_t tau_p = 0;
  uint64_t ep = 0;
};

// (ceil(tau_a0/tau_p) - 1) * ep + tau_a0 - (ceil(tau_a0/tau_p) - 1) * tau_p,
// exact in integer cycles. tau_p >= tau_a0 collapses to tau_a0.
uint64_t effective_wcet(const WcetQuery& q);

struct MeasureResult {
  std::vector<uint64_t> marker_cycles;
  std::vector<uint64_t> deltas;  // consecutive marker spacing
  uint64_t max_delta = 0;
  uint64_t min_delta = 0;
};

// Extracts UART progress markers a workload writes to `marker_addr` and
// measures the spacing between consecutive markers. Needs at least two.
MeasureResult measure_wcet(const Trace& trace, uint32_t marker_addr, int partition);

enum class Arch { Proposed, SingleCoreEquivalent, FineGrained };
enum class DependencyMode { Independent, Chained };

struct ArchComparisonInput {
  double tau_a = 0;
  double tau_b = 0;
  double tau_c = 0;
  double delta_p = 0;  // partition switch delay
  double delta_c = 0;  // inter-processor communication delay
  DependencyMode mode = DependencyMode::Independent;
};

// Total WCET of the three tasks on each architecture.
double total_wcet(Arch arch, const ArchComparisonInput& in);

// WCET of one task: the fine-grained architecture triples it, the others
// leave it unchanged.
double per_task_wcet(Arch arch, double tau_n);

}  // namespace pcore::wcet
