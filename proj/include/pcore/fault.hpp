#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcore {

// Model-level faults. These mark situations the hardware leaves undefined or
// that a validated configuration rules out; the simulator stops with a
// diagnostic instead of guessing.
struct SimFault : std::runtime_error {
  enum class Kind {
    ReadOnlyDevice,
    IdleDataAccess,
    StackUnderflow,
    StackOverflow,
    ScheduleConflict,
    BadConfig,
  };

  SimFault(Kind kind, uint64_t cycle, int partition, const std::string& what)
      : std::runtime_error(what), kind(kind), cycle(cycle), partition(partition) {}

  Kind kind;
  uint64_t cycle;
  int partition;
};

}  // namespace pcore
