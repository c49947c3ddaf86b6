#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pcore/image.hpp"
#include "pcore/isa.hpp"

namespace pcore {

// ISA-level interpreter: one instruction per step, immediate effects, no
// pipeline, no hazards, no timing. Used as the correctness oracle for the
// pipelined core and for quick program checks.
//
// Execution ends when the program enters the canonical spin (an
// unconditional jump whose target is its own mem-address instruction) or
// when the step budget runs out.
class ReferenceInterpreter {
 public:
  enum class Stop { Spin, Budget };

  ReferenceInterpreter() = default;
  ReferenceInterpreter(const CodeImage& code, const DataImage& data);

  Stop run(uint64_t max_steps);
  void step();

  const std::array<uint32_t, 16>& regs() const { return regs_; }
  std::array<uint32_t, 16>& regs() { return regs_; }
  uint32_t data(uint16_t cpu_addr) const { return data_[cpu_addr & 0x1FF]; }
  void set_data(uint16_t cpu_addr, uint32_t v) { data_[cpu_addr & 0x1FF] = v; }
  uint16_t pc() const { return pc_; }
  uint16_t jump_reg() const { return jump_reg_; }
  int stack_depth() const { return static_cast<int>(stack_.size()); }
  uint64_t steps() const { return steps_; }
  const std::vector<uint32_t>& uart_log() const { return uart_log_; }
  bool spinning() const { return spinning_; }

 private:
  uint32_t read_data(uint16_t addr);
  void write_data(uint16_t addr, uint32_t v);

  std::vector<uint16_t> code_;
  std::array<uint32_t, 512> data_{};
  std::array<uint32_t, 16> regs_{};
  uint16_t pc_ = 0;
  uint16_t jump_reg_ = 0;
  std::vector<uint16_t> stack_;
  std::vector<uint32_t> uart_log_;
  uint32_t timer_latch_ = 0;
  uint64_t steps_ = 0;
  bool spinning_ = false;
};

}  // namespace pcore
