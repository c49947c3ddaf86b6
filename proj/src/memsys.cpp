#include "pcore/memsys.hpp"

#include <cstdio>
#include <stdexcept>

namespace pcore {

namespace {

bool in_device_window(uint16_t addr) { return addr >= kDeviceBase && addr < kDeviceEnd; }
bool in_shared_window(uint16_t addr) { return addr >= kSharedBase && addr < kSharedEnd; }

[[noreturn]] void fault_readonly(uint16_t addr, int active, uint64_t cycle) {
  char msg[96];
  std::snprintf(msg, sizeof msg, "write to read-only device address 0x%03x", addr);
  throw SimFault(SimFault::Kind::ReadOnlyDevice, cycle, active, msg);
}

}  // namespace

MemorySystem::MemorySystem() = default;

Translation MemorySystem::translate(uint16_t cpu_addr, int active, AddrKind kind) {
  Translation t;
  if (kind == AddrKind::Instruction) {
    if (active < 0 || active >= kMaxPartitions)
      throw SimFault(SimFault::Kind::IdleDataAccess, 0, active, "instruction fetch with no active partition");
    t.physical = (static_cast<uint32_t>(active) << 14) | (cpu_addr & 0x3FFF);
    return t;
  }
  if (in_device_window(cpu_addr)) {
    t.device = true;
    t.device_addr = cpu_addr;
    return t;
  }
  unsigned segment;
  if (in_shared_window(cpu_addr)) {
    segment = kSharedSegment;
  } else {
    if (active < 0 || active >= kMaxPartitions)
      throw SimFault(SimFault::Kind::IdleDataAccess, 0, active, "data access with no active partition");
    segment = static_cast<unsigned>(active);
  }
  t.physical = (segment << 9) | (cpu_addr & 0x1FF);
  return t;
}

void MemorySystem::load_partition(int partition, const CodeImage& code, const DataImage& data) {
  if (partition < 0 || partition >= kMaxPartitions)
    throw std::runtime_error("partition index out of range");
  if (code.size() > kCodeCpuWords)
    throw std::runtime_error("code image exceeds the 14-bit instruction space");
  uint32_t data_end = static_cast<uint32_t>(data.base) + static_cast<uint32_t>(data.words.size());
  if (data_end > kDataCpuWords)
    throw std::runtime_error("data image exceeds the 9-bit data space");
  for (uint32_t a = data.base; a < data_end; ++a) {
    if (in_device_window(static_cast<uint16_t>(a)))
      throw std::runtime_error("data image overlaps the device window");
    if (in_shared_window(static_cast<uint16_t>(a)))
      throw std::runtime_error("data image overlaps the shared window");
  }
  uint32_t code_base = static_cast<uint32_t>(partition) << 14;
  for (size_t i = 0; i < code.size(); ++i) code_[code_base + i] = code[i];
  uint32_t seg_base = static_cast<uint32_t>(partition) << 9;
  for (size_t i = 0; i < data.words.size(); ++i) data_[seg_base + data.base + i] = data.words[i];
}

uint16_t MemorySystem::fetch(uint16_t pc, int active) const {
  Translation t = translate(pc, active, AddrKind::Instruction);
  return code_[t.physical];
}

uint32_t MemorySystem::device_read(uint16_t cpu_addr, int active, uint64_t cycle) {
  if (cpu_addr >= kDevPort0 && cpu_addr < kDevPort0 + 8) return dev_.ports[cpu_addr - kDevPort0];
  switch (cpu_addr) {
    case kDevUartTx:
      return dev_.last_uart_tx;
    case kDevTimerLow:
      dev_.timer_high_latch = static_cast<uint32_t>(cycle >> 32);
      return static_cast<uint32_t>(cycle);
    case kDevPartitionId:
      return active < 0 ? 0u : static_cast<uint32_t>(active);
    case kDevTimerHigh:
      return dev_.timer_high_latch;
    default:
      return 0;  // reserved
  }
}

uint32_t MemorySystem::data_read(uint16_t cpu_addr, int active, uint64_t cycle) {
  Translation t = translate(cpu_addr, active, AddrKind::Data);
  if (t.device) return device_read(t.device_addr, active, cycle);
  if (active >= 0) access_counts_[active][t.physical >> 9]++;
  return data_[t.physical];
}

std::optional<DeviceWrite> MemorySystem::data_write(uint16_t cpu_addr, uint32_t value, int active,
                                                    uint64_t cycle) {
  Translation t = translate(cpu_addr, active, AddrKind::Data);
  if (t.device) {
    if (t.device_addr == kDevUartTx) {
      dev_.last_uart_tx = value;
      return DeviceWrite{t.device_addr, value};
    }
    fault_readonly(t.device_addr, active, cycle);
  }
  if (active >= 0) access_counts_[active][t.physical >> 9]++;
  data_[t.physical] = value;
  return std::nullopt;
}

void MemorySystem::inject_sample(unsigned port, uint32_t value) {
  if (port >= dev_.ports.size()) throw std::runtime_error("sampling port index out of range");
  dev_.ports[port] = value;
}

uint32_t MemorySystem::peek_data(uint16_t cpu_addr, int active) const {
  Translation t = translate(cpu_addr, active, AddrKind::Data);
  if (t.device) return 0;
  return data_[t.physical];
}

}  // namespace pcore
