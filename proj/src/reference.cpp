#include "pcore/reference.hpp"

#include <stdexcept>

#include "pcore/core.hpp"
#include "pcore/memsys.hpp"

namespace pcore {

ReferenceInterpreter::ReferenceInterpreter(const CodeImage& code, const DataImage& data)
    : code_(code) {
  code_.resize(kCodeCpuWords, 0);
  for (size_t i = 0; i < data.words.size(); ++i) data_[(data.base + i) & 0x1FF] = data.words[i];
}

uint32_t ReferenceInterpreter::read_data(uint16_t addr) {
  if (addr >= kDeviceBase && addr < kDeviceEnd) {
    switch (addr) {
      case kDevUartTx: return uart_log_.empty() ? 0 : uart_log_.back();
      case kDevTimerLow:
        timer_latch_ = static_cast<uint32_t>(steps_ >> 32);
        return static_cast<uint32_t>(steps_);
      case kDevPartitionId: return 0;
      case kDevTimerHigh: return timer_latch_;
      default: return 0;  // sampling ports stay at their reset value here
    }
  }
  return data_[addr & 0x1FF];
}

void ReferenceInterpreter::write_data(uint16_t addr, uint32_t v) {
  if (addr >= kDeviceBase && addr < kDeviceEnd) {
    if (addr == kDevUartTx) uart_log_.push_back(v);
    // other device addresses are read-only; the oracle just drops the write
    return;
  }
  data_[addr & 0x1FF] = v;
}

void ReferenceInterpreter::step() {
  const isa::Instruction in = isa::decode(code_[pc_ & 0x3FFF]);
  uint16_t next_pc = static_cast<uint16_t>((pc_ + 1) & 0x3FFF);
  switch (in.kind) {
    case isa::InstrKind::MemAddress:
      jump_reg_ = in.code_addr;
      break;
    case isa::InstrKind::MemAccess:
      if (in.store)
        write_data(in.data_addr, regs_[in.reg]);
      else
        regs_[in.reg] = read_data(in.data_addr);
      break;
    case isa::InstrKind::Operational: {
      const isa::OpInfo* info = isa::find_opcode(in.opcode);
      if (info == nullptr) break;  // unknown opcodes execute as no-ops
      switch (info->category) {
        case isa::OpCategory::AluArith:
        case isa::OpCategory::AluLogic:
          regs_[in.op_a] = alu_op(in.opcode, regs_[in.op_a], regs_[in.op_b]);
          break;
        case isa::OpCategory::JumpCond:
          if (jump_condition(in.opcode, regs_[in.op_a], regs_[in.op_b])) next_pc = jump_reg_;
          break;
        case isa::OpCategory::JumpUncond:
          // Spin convention: juc jumping back to its own jad.
          if (jump_reg_ == static_cast<uint16_t>((pc_ - 1) & 0x3FFF) &&
              isa::decode(code_[jump_reg_]) == isa::Instruction::mem_address(jump_reg_)) {
            spinning_ = true;
          }
          next_pc = jump_reg_;
          break;
        case isa::OpCategory::CallTrigger:
          if (stack_.size() >= 256) throw std::runtime_error("reference: address stack overflow");
          stack_.push_back(static_cast<uint16_t>((pc_ + 1) & 0x3FFF));
          next_pc = jump_reg_;
          break;
        case isa::OpCategory::Return:
          if (stack_.empty()) throw std::runtime_error("reference: address stack underflow");
          next_pc = stack_.back();
          stack_.pop_back();
          break;
        case isa::OpCategory::NoOp:
        case isa::OpCategory::StoreTrigger:
          break;
      }
      break;
    }
  }
  pc_ = next_pc;
  ++steps_;
}

ReferenceInterpreter::Stop ReferenceInterpreter::run(uint64_t max_steps) {
  for (uint64_t i = 0; i < max_steps; ++i) {
    step();
    if (spinning_) return Stop::Spin;
  }
  return Stop::Budget;
}

}  // namespace pcore
