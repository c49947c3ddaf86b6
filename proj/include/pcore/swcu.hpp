#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pcore/fault.hpp"
#include "pcore/trace.hpp"

namespace pcore {

// Time-triggered partition schedule. All times are clock cycles. Each
// partition has a countdown period clock; a partition is granted execution
// when its clock completes, runs for exec_cycles, and is drained over
// switch_window cycles while the incoming partition's countdown finishes.
//
// offset_cycles is the initial period-clock value. A clock that reaches the
// switch_window preset starts the handover toward its partition:
//   - from a running partition: no-op injection for switch_window cycles,
//     then the grant (the outgoing partition stops fetching at the preset
//     hit, so consecutive grants are separated by exactly switch_window);
//   - from idle: the pipeline holds no instructions to drain, so the grant
//     lands on the preset hit itself.
// An offset equal to switch_window therefore grants at cycle 0.
struct PartitionSlot {
  uint64_t period_cycles = 0;
  uint64_t exec_cycles = 0;
  uint64_t offset_cycles = 0;
  bool enabled = false;
};

struct PartitionSchedule {
  std::array<PartitionSlot, 3> parts{};
  uint64_t switch_window = 10;
  uint64_t clock_hz = 50'000'000;

  double cycles_to_ms(uint64_t cycles) const {
    return static_cast<double>(cycles) * 1000.0 / static_cast<double>(clock_hz);
  }
  uint64_t ms_to_cycles(double ms) const;
};

enum class Phase : uint8_t { Idle, Running, DrainRun, DrainIdle };

struct SwcuSignals {
  bool inject_noops = true;  // ptr_c_flag1
  int granted = -1;          // partition granted on this cycle, if any
  bool drain_started = false;
  int drain_from = -1;
  bool idle_began = false;
};

// Per-cycle switching control unit: one countdown clock per partition, a
// shared execution clock, and the drain/grant procedure above.
class Swcu {
 public:
  explicit Swcu(const PartitionSchedule& sched);  // throws SimFault on bad parameters

  SwcuSignals tick(uint64_t cycle);

  Phase phase() const { return phase_; }
  int active() const { return phase_ == Phase::Idle ? -1 : active_; }
  int64_t period_clock(int p) const { return clocks_[p]; }
  uint64_t execution_clock() const { return exec_clock_; }
  bool expiry_flag() const { return expiry_flag_; }

 private:
  PartitionSchedule sched_;
  Phase phase_ = Phase::Idle;
  int active_ = -1;
  int target_ = -1;
  uint64_t idle_at_ = 0;
  bool started_ = false;
  std::array<int64_t, 3> clocks_{};
  uint64_t exec_clock_ = 0;
  bool expiry_flag_ = false;
};

// Checks parameters first, then walks the grant sequence looking for
// switch-request collisions. Stops at the first conflict.
struct ScheduleIssue {
  enum class Kind { BadParameter, Conflict };
  Kind kind;
  uint64_t cycle = 0;
  std::string message;
};

struct ValidationReport {
  bool ok() const { return issues.empty(); }
  bool parameters_ok = true;
  std::vector<ScheduleIssue> issues;
  uint64_t horizon_checked = 0;
  bool horizon_capped = false;  // hyperperiod exceeded the enumeration cap
};

// horizon == 0 selects one hyperperiod (lcm of enabled periods plus the
// largest offset), capped at kValidationCycleCap.
constexpr uint64_t kValidationCycleCap = 2'000'000'000;
ValidationReport validate_schedule(const PartitionSchedule& sched, uint64_t horizon = 0);

// Closed-form grant timeline over [0, horizon): no core involved, the grant
// sequence is enumerated event to event. Faults exactly where the per-cycle
// machine would.
std::vector<TimelineRow> grant_timeline(const PartitionSchedule& sched, uint64_t horizon);

void throw_on_bad_parameters(const PartitionSchedule& sched);

}  // namespace pcore
