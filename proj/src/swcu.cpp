#include "pcore/swcu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

namespace pcore {

namespace {

constexpr uint64_t kNoEvent = std::numeric_limits<uint64_t>::max();

std::string conflict_msg(const char* what, uint64_t cycle, int partition) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s (cycle %llu, partition %d)", what,
                static_cast<unsigned long long>(cycle), partition);
  return buf;
}

}  // namespace

uint64_t PartitionSchedule::ms_to_cycles(double ms) const {
  return static_cast<uint64_t>(std::llround(ms * static_cast<double>(clock_hz) / 1000.0));
}

void throw_on_bad_parameters(const PartitionSchedule& sched) {
  if (sched.switch_window < 4)
    throw SimFault(SimFault::Kind::BadConfig, 0, -1,
                   "switch_window must cover the pipeline depth (minimum 4 cycles)");
  if (sched.clock_hz == 0)
    throw SimFault(SimFault::Kind::BadConfig, 0, -1, "clock_hz must be positive");
  for (int p = 0; p < 3; ++p) {
    const auto& slot = sched.parts[p];
    if (!slot.enabled) continue;
    if (slot.period_cycles == 0)
      throw SimFault(SimFault::Kind::BadConfig, 0, p, "period_cycles must be positive");
    if (slot.exec_cycles == 0)
      throw SimFault(SimFault::Kind::BadConfig, 0, p, "exec_cycles must be positive");
    if (slot.exec_cycles + sched.switch_window > slot.period_cycles)
      throw SimFault(SimFault::Kind::BadConfig, 0, p,
                     "period_cycles must cover exec_cycles plus the switch window");
    if (slot.offset_cycles < sched.switch_window)
      throw SimFault(SimFault::Kind::BadConfig, 0, p,
                     "offset_cycles must be at least the switch window");
  }
}

Swcu::Swcu(const PartitionSchedule& sched) : sched_(sched) {
  throw_on_bad_parameters(sched_);
  for (int p = 0; p < 3; ++p)
    clocks_[p] = static_cast<int64_t>(sched_.parts[p].offset_cycles);
}

SwcuSignals Swcu::tick(uint64_t cycle) {
  SwcuSignals sig;
  const int64_t preset = static_cast<int64_t>(sched_.switch_window);

  if (phase_ == Phase::DrainIdle && cycle == idle_at_) {
    phase_ = Phase::Idle;
    sig.idle_began = true;
  }

  const bool expiring =
      phase_ == Phase::Running && exec_clock_ == sched_.parts[active_].exec_cycles;
  expiry_flag_ = expiring;

  int granted = -1;
  auto do_grant = [&](int q) {
    phase_ = Phase::Running;
    active_ = q;
    exec_clock_ = 0;
    granted = q;
    sig.granted = q;
  };

  // A completed countdown hands the pipeline to the drain target.
  if (phase_ == Phase::DrainRun && clocks_[target_] == 0) do_grant(target_);

  int hit = -1;
  for (int p = 0; p < 3; ++p) {
    if (!sched_.parts[p].enabled || clocks_[p] != preset) continue;
    if (hit >= 0)
      throw SimFault(SimFault::Kind::ScheduleConflict, cycle, p,
                     conflict_msg("two period clocks reached the switch preset together", cycle, p));
    hit = p;
  }
  if (hit >= 0) {
    switch (phase_) {
      case Phase::Running:
        sig.drain_started = true;
        sig.drain_from = active_;
        target_ = hit;
        phase_ = Phase::DrainRun;
        break;
      case Phase::DrainRun:
        throw SimFault(SimFault::Kind::ScheduleConflict, cycle, hit,
                       conflict_msg("switch request while a switch is in progress", cycle, hit));
      case Phase::DrainIdle:
        target_ = hit;
        phase_ = Phase::DrainRun;
        break;
      case Phase::Idle:
        do_grant(hit);
        break;
    }
  }

  if (expiring && phase_ == Phase::Running) {
    sig.drain_started = true;
    sig.drain_from = active_;
    phase_ = Phase::DrainIdle;
    idle_at_ = cycle + sched_.switch_window;
  }

  if (!started_) {
    started_ = true;
    if (granted < 0) sig.idle_began = true;
  }

  for (int p = 0; p < 3; ++p) {
    if (!sched_.parts[p].enabled) continue;
    if (p == granted) clocks_[p] = static_cast<int64_t>(sched_.parts[p].period_cycles);
    clocks_[p] -= 1;
  }
  exec_clock_ += 1;  // a grant reset it to 0, so the next cycle reads 1

  sig.inject_noops = phase_ != Phase::Running;
  return sig;
}

namespace {

// Event-to-event walk of the grant sequence. Shared by grant_timeline and
// validate_schedule; `record_conflicts` selects the validator behaviour
// (collect and stop) over the runtime behaviour (fault like the Swcu).
struct Walk {
  std::vector<TimelineRow> rows;
  std::vector<ScheduleIssue> issues;
  bool hit_conflict = false;
};

Walk walk_schedule(const PartitionSchedule& sched, uint64_t horizon, bool record_conflicts) {
  Walk out;
  const uint64_t sw = sched.switch_window;

  Phase phase = Phase::Idle;
  int active = -1;
  int target = -1;
  uint64_t grant_time = 0;
  uint64_t grant_due = kNoEvent;
  uint64_t idle_at = kNoEvent;
  std::array<uint64_t, 3> next_preset{kNoEvent, kNoEvent, kNoEvent};
  for (int p = 0; p < 3; ++p)
    if (sched.parts[p].enabled) next_preset[p] = sched.parts[p].offset_cycles - sw;

  bool row_open = true;  // idle from reset until the first grant
  TimelineRow row{-1, 0, 0};

  auto close_row = [&](uint64_t end) {
    if (!row_open) return;
    row.end = end;
    if (row.end > row.start) out.rows.push_back(row);
    row_open = false;
  };
  // The Swcu faults on these, so the runtime-mode walk does too.
  auto hard_conflict = [&](const char* what, uint64_t cycle, int p) {
    if (!record_conflicts)
      throw SimFault(SimFault::Kind::ScheduleConflict, cycle, p, conflict_msg(what, cycle, p));
    out.issues.push_back({ScheduleIssue::Kind::Conflict, cycle, conflict_msg(what, cycle, p)});
    out.hit_conflict = true;
  };
  // The Swcu lets these proceed (the countdown simply preempts); only the
  // validator treats them as schedule defects.
  auto soft_conflict = [&](const char* what, uint64_t cycle, int p) {
    if (!record_conflicts) return;
    out.issues.push_back({ScheduleIssue::Kind::Conflict, cycle, conflict_msg(what, cycle, p)});
    out.hit_conflict = true;
  };
  auto do_grant = [&](int q, uint64_t t) {
    close_row(t);
    row = TimelineRow{q, t, 0};
    row_open = true;
    phase = Phase::Running;
    active = q;
    grant_time = t;
    grant_due = kNoEvent;
    next_preset[q] = t + sched.parts[q].period_cycles - sw;
  };

  while (!out.hit_conflict) {
    uint64_t t = kNoEvent;
    if (phase == Phase::DrainIdle) t = std::min(t, idle_at);
    if (phase == Phase::DrainRun) t = std::min(t, grant_due);
    for (int p = 0; p < 3; ++p) t = std::min(t, next_preset[p]);
    if (phase == Phase::Running) t = std::min(t, grant_time + sched.parts[active].exec_cycles);
    if (t >= horizon || t == kNoEvent) break;

    if (phase == Phase::DrainIdle && idle_at == t) {
      phase = Phase::Idle;
      idle_at = kNoEvent;
      row = TimelineRow{-1, t, 0};
      row_open = true;
    }
    if (phase == Phase::DrainRun && grant_due == t) do_grant(target, t);

    int hit = -1;
    bool simultaneous = false;
    for (int p = 0; p < 3; ++p) {
      if (next_preset[p] != t) continue;
      if (hit >= 0) {
        hard_conflict("two period clocks reached the switch preset together", t, p);
        simultaneous = true;
        break;
      }
      hit = p;
    }
    if (simultaneous) break;
    if (hit >= 0) {
      next_preset[hit] = kNoEvent;  // reset at the grant
      switch (phase) {
        case Phase::Running: {
          uint64_t expiry = grant_time + sched.parts[active].exec_cycles;
          if (t < expiry) soft_conflict("switch request preempts a running partition", t, hit);
          close_row(t);
          target = hit;
          grant_due = t + sw;
          phase = Phase::DrainRun;
          break;
        }
        case Phase::DrainRun:
          hard_conflict("switch request while a switch is in progress", t, hit);
          break;
        case Phase::DrainIdle:
          target = hit;
          grant_due = t + sw;
          idle_at = kNoEvent;
          phase = Phase::DrainRun;
          break;
        case Phase::Idle:
          do_grant(hit, t);
          break;
      }
      continue;
    }

    if (phase == Phase::Running && grant_time + sched.parts[active].exec_cycles == t) {
      close_row(t);
      phase = Phase::DrainIdle;
      idle_at = t + sw;
    }
  }

  close_row(horizon);
  return out;
}

uint64_t default_validation_horizon(const PartitionSchedule& sched) {
  uint64_t lcm = 1;
  uint64_t max_offset = 0;
  bool any = false;
  for (const auto& slot : sched.parts) {
    if (!slot.enabled) continue;
    any = true;
    max_offset = std::max(max_offset, slot.offset_cycles);
    if (lcm > kValidationCycleCap / std::max<uint64_t>(slot.period_cycles, 1))
      return kValidationCycleCap;  // saturate
    lcm = std::lcm(lcm, slot.period_cycles);
    if (lcm > kValidationCycleCap) return kValidationCycleCap;
  }
  if (!any) return 1;
  uint64_t horizon = lcm + max_offset;
  return std::min(horizon, kValidationCycleCap);
}

}  // namespace

ValidationReport validate_schedule(const PartitionSchedule& sched, uint64_t horizon) {
  ValidationReport report;
  try {
    throw_on_bad_parameters(sched);
  } catch (const SimFault& fault) {
    report.parameters_ok = false;
    report.issues.push_back({ScheduleIssue::Kind::BadParameter, 0, fault.what()});
    return report;
  }
  if (horizon == 0) {
    horizon = default_validation_horizon(sched);
    report.horizon_capped = horizon == kValidationCycleCap;
  }
  report.horizon_checked = horizon;
  Walk walk = walk_schedule(sched, horizon, /*record_conflicts=*/true);
  for (auto& issue : walk.issues) report.issues.push_back(std::move(issue));
  return report;
}

std::vector<TimelineRow> grant_timeline(const PartitionSchedule& sched, uint64_t horizon) {
  throw_on_bad_parameters(sched);
  return walk_schedule(sched, horizon, /*record_conflicts=*/false).rows;
}

}  // namespace pcore
