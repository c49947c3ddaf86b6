#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pcore {

enum class EventKind : uint8_t {
  Grant,
  DrainStart,
  IdleBegin,
  UartTx,
  Inject,
  Retire,
  UnknownOp,
  StaleJump,
};

const char* event_name(EventKind kind);

struct TraceEvent {
  uint64_t cycle = 0;
  EventKind kind = EventKind::Grant;
  int partition = -1;   // -1 when not applicable
  uint32_t addr = 0;
  uint32_t value = 0;
};

// Time-ordered event record. Grants, drains and device I/O are always kept;
// per-instruction retire events only when the simulator runs verbose.
struct Trace {
  std::vector<TraceEvent> events;

  void add(uint64_t cycle, EventKind kind, int partition = -1, uint32_t addr = 0,
           uint32_t value = 0) {
    events.push_back({cycle, kind, partition, addr, value});
  }
};

// CSV columns: cycle,event,partition,addr,value. Partition prints empty when
// the event has none; addr prints as hex.
void write_csv(std::ostream& os, const Trace& trace);
std::string to_csv(const Trace& trace);

struct TimelineRow {
  int partition = -1;  // -1 marks an idle row
  uint64_t start = 0;
  uint64_t end = 0;

  bool operator==(const TimelineRow&) const = default;
};

// Rebuilds the grant timeline from a simulation trace. Running rows span
// grant to the following drain start; idle rows span idle begin to the next
// grant. Zero-length rows are dropped and the last row is clamped to the
// horizon.
std::vector<TimelineRow> timeline_from_trace(const Trace& trace, uint64_t horizon);

}  // namespace pcore
