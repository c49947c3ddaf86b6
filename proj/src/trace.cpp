#include "pcore/trace.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace pcore {

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::Grant: return "grant";
    case EventKind::DrainStart: return "drain_start";
    case EventKind::IdleBegin: return "idle_begin";
    case EventKind::UartTx: return "uart_tx";
    case EventKind::Inject: return "inject";
    case EventKind::Retire: return "retire";
    case EventKind::UnknownOp: return "unknown_op";
    case EventKind::StaleJump: return "stale_jump";
  }
  return "?";
}

void write_csv(std::ostream& os, const Trace& trace) {
  os << "cycle,event,partition,addr,value\n";
  char line[96];
  for (const auto& e : trace.events) {
    if (e.partition >= 0) {
      std::snprintf(line, sizeof line, "%llu,%s,%d,0x%x,%u\n",
                    static_cast<unsigned long long>(e.cycle), event_name(e.kind), e.partition,
                    e.addr, e.value);
    } else {
      std::snprintf(line, sizeof line, "%llu,%s,,0x%x,%u\n",
                    static_cast<unsigned long long>(e.cycle), event_name(e.kind), e.addr, e.value);
    }
    os << line;
  }
}

std::string to_csv(const Trace& trace) {
  std::ostringstream os;
  write_csv(os, trace);
  return os.str();
}

std::vector<TimelineRow> timeline_from_trace(const Trace& trace, uint64_t horizon) {
  std::vector<TimelineRow> rows;
  bool open = false;
  TimelineRow current;
  for (const auto& e : trace.events) {
    if (e.cycle > horizon) break;
    switch (e.kind) {
      case EventKind::Grant:
        if (open) {  // an idle row closes at the next grant
          current.end = e.cycle;
          if (current.end > current.start) rows.push_back(current);
        }
        current = TimelineRow{e.partition, e.cycle, 0};
        open = true;
        break;
      case EventKind::DrainStart:
        if (open && current.partition >= 0) {
          current.end = e.cycle;
          if (current.end > current.start) rows.push_back(current);
          open = false;
        }
        break;
      case EventKind::IdleBegin:
        current = TimelineRow{-1, e.cycle, 0};
        open = true;
        break;
      default:
        break;
    }
  }
  if (open) {
    current.end = horizon;
    if (current.end > current.start) rows.push_back(current);
  }
  return rows;
}

}  // namespace pcore
