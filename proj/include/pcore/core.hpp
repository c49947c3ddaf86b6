#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pcore/isa.hpp"
#include "pcore/memsys.hpp"
#include "pcore/swcu.hpp"
#include "pcore/trace.hpp"

namespace pcore {

// Architectural state replicated per partition. The program counter lives
// here; the fetch stage reads and advances the active partition's copy, so
// suspending a partition preserves its resume point with no extra copying.
struct PartitionContext {
  std::array<uint32_t, 16> regs{};
  uint16_t pc = 0;        // 14-bit
  uint16_t jump_reg = 0;  // 14-bit, written by mem-address instructions at decode
  bool jump_valid = false;
  std::array<uint16_t, 256> stack{};
  int16_t stack_read = -1;   // top of stack, write pointer minus one
  uint16_t stack_write = 0;  // next free slot

  bool operator==(const PartitionContext&) const = default;
};

// Pipeline registers. A slot with valid == false is a bubble: either an
// injected no-op or an instruction killed by a flush.
struct FetchSlot {
  bool valid = false;
  uint16_t word = 0;
  uint16_t addr = 0;
  int owner = -1;
};

struct DecodeSlot {
  bool valid = false;
  isa::Instruction instr;
  uint16_t addr = 0;
  uint16_t word = 0;
  int owner = -1;
  bool unknown = false;
  uint32_t val_a = 0;  // operand values captured at decode
  uint32_t val_b = 0;
  uint32_t store_val = 0;
};

struct WbSlot {
  enum class Action : uint8_t { None, RegWrite, Load, Store };
  bool valid = false;
  Action action = Action::None;
  uint8_t reg = 0;
  uint32_t value = 0;  // ALU result or store data
  uint16_t data_addr = 0;
  uint16_t addr = 0;
  uint16_t word = 0;
  int owner = -1;
  bool unknown = false;
};

struct Injection {
  uint64_t cycle;
  unsigned port;
  uint32_t value;
};

// Four-stage pipeline (fetch, decode, execute, memory-access/write-back)
// with predict-not-taken branching. A taken branch, call or return resolves
// at execute and kills the two younger slots; nothing past decode is ever
// flushed. The register file is write-first: a value committed at write-back
// is visible to a decode-stage read in the same cycle.
class Simulator {
 public:
  explicit Simulator(const PartitionSchedule& sched, bool verbose_retire = false);

  void load_partition(int p, const CodeImage& code, const DataImage& data);
  void set_injections(std::vector<Injection> injections);  // sorted by cycle

  void step();
  void run(uint64_t horizon);

  uint64_t cycle() const { return cycle_; }
  const PartitionContext& context(int p) const { return contexts_[p]; }
  PartitionContext& context(int p) { return contexts_[p]; }
  const Trace& trace() const { return trace_; }
  MemorySystem& mem() { return mem_; }
  const MemorySystem& mem() const { return mem_; }
  const Swcu& swcu() const { return swcu_; }
  const std::array<uint64_t, 3>& retired() const { return retired_; }

  // Control/pipeline state inspection.
  bool ptr_c_flag1() const { return flag1_; }
  int ptr_c_flag2() const { return flag2_; }
  bool j_en() const { return j_en_; }
  bool call_en() const { return call_en_; }
  uint32_t alu_reg() const { return alu_reg_; }
  const FetchSlot& fetch_reg() const { return fetch_reg_; }
  const DecodeSlot& decode_reg() const { return decode_reg_; }
  const WbSlot& wb_reg() const { return wb_reg_; }

 private:
  PartitionSchedule sched_;
  Swcu swcu_;
  MemorySystem mem_;
  std::array<PartitionContext, 3> contexts_{};
  Trace trace_;
  std::array<uint64_t, 3> retired_{};
  std::vector<Injection> injections_;
  size_t next_injection_ = 0;

  FetchSlot fetch_reg_;
  DecodeSlot decode_reg_;
  WbSlot wb_reg_;

  uint64_t cycle_ = 0;
  bool flag1_ = true;
  int flag2_ = -1;
  bool j_en_ = false;
  bool call_en_ = false;
  uint32_t alu_reg_ = 0;
  bool verbose_ = false;
};

uint32_t alu_op(uint8_t opcode, uint32_t a, uint32_t b);
bool jump_condition(uint8_t opcode, uint32_t a, uint32_t b);

}  // namespace pcore
