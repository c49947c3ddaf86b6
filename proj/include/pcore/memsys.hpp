#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "pcore/fault.hpp"
#include "pcore/image.hpp"

namespace pcore {

// Address map, CPU view (9-bit data addresses, 14-bit instruction addresses).
//
// The memory control unit prepends a 2-bit segment to every CPU address:
// the active partition index for private accesses, segment 3 for the shared
// window. The device window is decoded before segmentation so every partition
// sees the same devices.
constexpr int kMaxPartitions = 3;
constexpr unsigned kSharedSegment = 3;

constexpr uint16_t kDataCpuWords = 512;    // 9-bit CPU-visible space
constexpr uint16_t kDataPhysWords = 2048;  // 11-bit physical space
constexpr uint16_t kCodeCpuWords = 16384;  // 14-bit CPU-visible space
constexpr uint32_t kCodePhysWords = 65536;

constexpr uint16_t kDeviceBase = 0x010;
constexpr uint16_t kDeviceEnd = 0x020;
constexpr uint16_t kSharedBase = 0x1C0;
constexpr uint16_t kSharedEnd = 0x200;

// Device register addresses inside the window.
constexpr uint16_t kDevPort0 = 0x010;  // eight sampling ports, 0x010..0x017
constexpr uint16_t kDevUartTx = 0x018;
constexpr uint16_t kDevTimerLow = 0x019;  // reading latches the high word
constexpr uint16_t kDevPartitionId = 0x01A;
constexpr uint16_t kDevTimerHigh = 0x01B;  // latched by the last timer-low read

enum class AddrKind { Data, Instruction };

struct Translation {
  bool device = false;
  uint16_t device_addr = 0;  // CPU address inside the window
  uint32_t physical = 0;     // segment bits prepended
};

// Cycle timer, partition id register, UART transmit port and eight
// latest-value sampling ports.
struct DeviceFile {
  std::array<uint32_t, 8> ports{};
  uint32_t timer_high_latch = 0;
  uint32_t last_uart_tx = 0;
};

struct DeviceWrite {
  uint16_t addr;
  uint32_t value;
};

class MemorySystem {
 public:
  MemorySystem();

  static Translation translate(uint16_t cpu_addr, int active, AddrKind kind);

  // Loads a partition's code and data into its segments. Throws on
  // overflow or on data that overlaps the device or shared windows.
  void load_partition(int partition, const CodeImage& code, const DataImage& data);

  uint16_t fetch(uint16_t pc, int active) const;

  // Single-cycle data access as seen at the write-back stage. `cycle` feeds
  // the timer; `active` selects the segment and the partition id value.
  uint32_t data_read(uint16_t cpu_addr, int active, uint64_t cycle);
  // Returns the device write when the address hits the UART transmit port.
  std::optional<DeviceWrite> data_write(uint16_t cpu_addr, uint32_t value, int active,
                                        uint64_t cycle);

  void inject_sample(unsigned port, uint32_t value);

  // Side-effect-free inspection (no timer latch, no access accounting).
  uint32_t peek_data(uint16_t cpu_addr, int active) const;
  uint32_t peek_physical(uint32_t phys) const { return data_[phys]; }
  uint16_t peek_code(uint16_t pc, int active) const { return fetch(pc, active); }
  const DeviceFile& devices() const { return dev_; }

  // Counts every data access partition i made to protected segment j.
  // Shared-window and device traffic is not charged to any segment.
  const std::array<std::array<uint64_t, 4>, 4>& segment_access_counts() const {
    return access_counts_;
  }

 private:
  uint32_t device_read(uint16_t cpu_addr, int active, uint64_t cycle);

  std::array<uint32_t, kDataPhysWords> data_{};
  std::array<uint16_t, kCodePhysWords> code_{};
  DeviceFile dev_;
  std::array<std::array<uint64_t, 4>, 4> access_counts_{};
};

}  // namespace pcore
