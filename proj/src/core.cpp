#include "pcore/core.hpp"

#include <algorithm>

namespace pcore {

uint32_t alu_op(uint8_t opcode, uint32_t a, uint32_t b) {
  using namespace isa::op;
  switch (opcode) {
    case kAdd: return a + b;
    case kSub: return a - b;
    case kMul: return a * b;  // low 32 bits of the product
    case kXor: return a ^ b;
    case kAnd: return a & b;
    case kOr: return a | b;
    case kShr: return a >> (b & 31u);
    case kShl: return a << (b & 31u);
    default: return 0;
  }
}

bool jump_condition(uint8_t opcode, uint32_t a, uint32_t b) {
  using namespace isa::op;
  const auto sa = static_cast<int32_t>(a);
  const auto sb = static_cast<int32_t>(b);
  switch (opcode) {
    case kJle: return sa <= sb;
    case kJge: return sa >= sb;
    case kJl: return sa < sb;
    case kJg: return sa > sb;
    case kJe: return a == b;
    case kJne: return a != b;
    default: return false;
  }
}

Simulator::Simulator(const PartitionSchedule& sched, bool verbose_retire)
    : sched_(sched), swcu_(sched), verbose_(verbose_retire) {}

void Simulator::load_partition(int p, const CodeImage& code, const DataImage& data) {
  mem_.load_partition(p, code, data);
}

void Simulator::set_injections(std::vector<Injection> injections) {
  injections_ = std::move(injections);
  std::stable_sort(injections_.begin(), injections_.end(),
                   [](const Injection& a, const Injection& b) { return a.cycle < b.cycle; });
  next_injection_ = 0;
}

void Simulator::step() {
  while (next_injection_ < injections_.size() && injections_[next_injection_].cycle == cycle_) {
    const Injection& inj = injections_[next_injection_];
    mem_.inject_sample(inj.port, inj.value);
    trace_.add(cycle_, EventKind::Inject, -1, inj.port, inj.value);
    ++next_injection_;
  }

  SwcuSignals sig = swcu_.tick(cycle_);
  if (sig.idle_began) trace_.add(cycle_, EventKind::IdleBegin);
  if (sig.granted >= 0) {
    flag2_ = sig.granted;
    trace_.add(cycle_, EventKind::Grant, sig.granted);
  }
  if (sig.drain_started) trace_.add(cycle_, EventKind::DrainStart, sig.drain_from);
  flag1_ = sig.inject_noops;

  // Write-back / memory-access. Commits before decode reads the register
  // file, which gives the write-first behaviour the hazard distance assumes.
  if (wb_reg_.valid) {
    PartitionContext& ctx = contexts_[wb_reg_.owner];
    switch (wb_reg_.action) {
      case WbSlot::Action::RegWrite:
        ctx.regs[wb_reg_.reg] = wb_reg_.value;
        break;
      case WbSlot::Action::Load:
        ctx.regs[wb_reg_.reg] = mem_.data_read(wb_reg_.data_addr, wb_reg_.owner, cycle_);
        break;
      case WbSlot::Action::Store:
        if (auto dw = mem_.data_write(wb_reg_.data_addr, wb_reg_.value, wb_reg_.owner, cycle_))
          trace_.add(cycle_, EventKind::UartTx, wb_reg_.owner, dw->addr, dw->value);
        break;
      case WbSlot::Action::None:
        break;
    }
    const bool is_noop = (wb_reg_.word & 0xFF00u) == 0;  // operational, opcode 0
    if (!is_noop) retired_[wb_reg_.owner]++;
    if (verbose_) trace_.add(cycle_, EventKind::Retire, wb_reg_.owner, wb_reg_.addr, wb_reg_.word);
    if (wb_reg_.unknown)
      trace_.add(cycle_, EventKind::UnknownOp, wb_reg_.owner, wb_reg_.addr, wb_reg_.word);
  }

  // Execute. Branch decisions act on state as of the cycle start; the
  // redirect and flush are applied after fetch below.
  WbSlot new_wb;
  bool flush = false;
  uint16_t redirect_pc = 0;
  int redirect_owner = -1;
  j_en_ = false;
  call_en_ = false;
  if (decode_reg_.valid) {
    const isa::Instruction& in = decode_reg_.instr;
    PartitionContext& ctx = contexts_[decode_reg_.owner];
    new_wb.valid = true;
    new_wb.owner = decode_reg_.owner;
    new_wb.addr = decode_reg_.addr;
    new_wb.word = decode_reg_.word;
    new_wb.unknown = decode_reg_.unknown;
    switch (in.kind) {
      case isa::InstrKind::Operational: {
        const isa::OpInfo* info = decode_reg_.unknown ? nullptr : isa::find_opcode(in.opcode);
        if (info == nullptr) break;  // unknown opcodes execute as no-ops
        switch (info->category) {
          case isa::OpCategory::AluArith:
          case isa::OpCategory::AluLogic:
            alu_reg_ = alu_op(in.opcode, decode_reg_.val_a, decode_reg_.val_b);
            new_wb.action = WbSlot::Action::RegWrite;
            new_wb.reg = in.op_a;
            new_wb.value = alu_reg_;
            break;
          case isa::OpCategory::JumpCond:
          case isa::OpCategory::JumpUncond: {
            bool taken = info->category == isa::OpCategory::JumpUncond ||
                         jump_condition(in.opcode, decode_reg_.val_a, decode_reg_.val_b);
            if (taken) {
              if (!ctx.jump_valid)
                trace_.add(cycle_, EventKind::StaleJump, decode_reg_.owner, decode_reg_.addr,
                           decode_reg_.word);
              j_en_ = true;
              flush = true;
              redirect_pc = ctx.jump_reg;
              redirect_owner = decode_reg_.owner;
            }
            break;
          }
          case isa::OpCategory::CallTrigger: {
            if (!ctx.jump_valid)
              trace_.add(cycle_, EventKind::StaleJump, decode_reg_.owner, decode_reg_.addr,
                         decode_reg_.word);
            if (ctx.stack_write >= ctx.stack.size())
              throw SimFault(SimFault::Kind::StackOverflow, cycle_, decode_reg_.owner,
                             "subroutine address stack overflow");
            ctx.stack[ctx.stack_write] = static_cast<uint16_t>((decode_reg_.addr + 1) & 0x3FFF);
            ctx.stack_write++;
            ctx.stack_read++;
            call_en_ = true;
            flush = true;
            redirect_pc = ctx.jump_reg;
            redirect_owner = decode_reg_.owner;
            break;
          }
          case isa::OpCategory::Return: {
            if (ctx.stack_write == 0)
              throw SimFault(SimFault::Kind::StackUnderflow, cycle_, decode_reg_.owner,
                             "return with an empty subroutine address stack");
            redirect_pc = ctx.stack[ctx.stack_write - 1];
            ctx.stack_write--;
            ctx.stack_read--;
            j_en_ = true;
            flush = true;
            redirect_owner = decode_reg_.owner;
            break;
          }
          case isa::OpCategory::NoOp:
          case isa::OpCategory::StoreTrigger:
            break;
        }
        break;
      }
      case isa::InstrKind::MemAddress:
        break;  // jump_reg was written at decode
      case isa::InstrKind::MemAccess:
        new_wb.action = in.store ? WbSlot::Action::Store : WbSlot::Action::Load;
        new_wb.reg = in.reg;
        new_wb.value = decode_reg_.store_val;
        new_wb.data_addr = in.data_addr;
        break;
    }
  }

  // Decode. Register reads see this cycle's write-back.
  DecodeSlot new_decode;
  bool jad_pending = false;
  int jad_owner = -1;
  uint16_t jad_target = 0;
  if (fetch_reg_.valid) {
    new_decode.valid = true;
    new_decode.word = fetch_reg_.word;
    new_decode.addr = fetch_reg_.addr;
    new_decode.owner = fetch_reg_.owner;
    new_decode.instr = isa::decode(fetch_reg_.word);
    const isa::Instruction& in = new_decode.instr;
    PartitionContext& ctx = contexts_[fetch_reg_.owner];
    switch (in.kind) {
      case isa::InstrKind::Operational:
        new_decode.unknown = !isa::known_opcode(in.opcode);
        new_decode.val_a = ctx.regs[in.op_a];
        new_decode.val_b = ctx.regs[in.op_b];
        break;
      case isa::InstrKind::MemAddress:
        jad_pending = true;
        jad_owner = fetch_reg_.owner;
        jad_target = in.code_addr;
        break;
      case isa::InstrKind::MemAccess:
        new_decode.store_val = ctx.regs[in.reg];
        break;
    }
  }

  // Fetch, or no-op injection while ptr_c_flag1 is active.
  FetchSlot new_fetch;
  if (!flag1_ && flag2_ >= 0) {
    PartitionContext& ctx = contexts_[flag2_];
    new_fetch.valid = true;
    new_fetch.word = mem_.fetch(ctx.pc, flag2_);
    new_fetch.addr = ctx.pc;
    new_fetch.owner = flag2_;
    ctx.pc = static_cast<uint16_t>((ctx.pc + 1) & 0x3FFF);
  }

  if (flush) {
    contexts_[redirect_owner].pc = static_cast<uint16_t>(redirect_pc & 0x3FFF);
    new_fetch = FetchSlot{};
    new_decode = DecodeSlot{};
    jad_pending = false;  // a killed jad leaves jump_reg untouched
  }
  if (jad_pending) {
    contexts_[jad_owner].jump_reg = static_cast<uint16_t>(jad_target & 0x3FFF);
    contexts_[jad_owner].jump_valid = true;
  }

  wb_reg_ = new_wb;
  decode_reg_ = new_decode;
  fetch_reg_ = new_fetch;
  ++cycle_;
}

void Simulator::run(uint64_t horizon) {
  while (cycle_ < horizon) step();
}

}  // namespace pcore
