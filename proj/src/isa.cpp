#include "pcore/isa.hpp"

#include <array>
#include <cstdio>

namespace pcore::isa {

namespace {

constexpr std::array<OpInfo, 18> kOpcodeTable{{
    {op::kNoop, "noop", OpCategory::NoOp},
    {op::kAdd, "add", OpCategory::AluArith},
    {op::kSub, "sub", OpCategory::AluArith},
    {op::kMul, "mul", OpCategory::AluArith},
    {op::kJle, "jle", OpCategory::JumpCond},
    {op::kJge, "jge", OpCategory::JumpCond},
    {op::kJl, "jl", OpCategory::JumpCond},
    {op::kJg, "jg", OpCategory::JumpCond},
    {op::kJe, "je", OpCategory::JumpCond},
    {op::kJne, "jne", OpCategory::JumpCond},
    {op::kJuc, "juc", OpCategory::JumpUncond},
    {op::kCall, "call", OpCategory::CallTrigger},
    {op::kRet, "ret", OpCategory::Return},
    {op::kXor, "xor", OpCategory::AluLogic},
    {op::kAnd, "and", OpCategory::AluLogic},
    {op::kOr, "or", OpCategory::AluLogic},
    {op::kShr, "shr", OpCategory::AluLogic},
    {op::kShl, "shl", OpCategory::AluLogic},
}};

}  // namespace

std::span<const OpInfo> opcode_table() { return kOpcodeTable; }

const OpInfo* find_opcode(uint8_t code) {
  for (const auto& info : kOpcodeTable) {
    if (info.code == code) return &info;
  }
  return nullptr;
}

const OpInfo* find_mnemonic(std::string_view mnemonic) {
  for (const auto& info : kOpcodeTable) {
    if (info.mnemonic == mnemonic) return &info;
  }
  return nullptr;
}

Instruction Instruction::operational(uint8_t opcode, uint8_t op_a, uint8_t op_b) {
  Instruction i;
  i.kind = InstrKind::Operational;
  i.opcode = opcode;
  i.op_a = op_a;
  i.op_b = op_b;
  return i;
}

Instruction Instruction::mem_address(uint16_t code_addr) {
  Instruction i;
  i.kind = InstrKind::MemAddress;
  i.code_addr = code_addr;
  return i;
}

Instruction Instruction::mem_access(bool store, uint8_t reg, uint16_t data_addr) {
  Instruction i;
  i.kind = InstrKind::MemAccess;
  i.store = store;
  i.reg = reg;
  i.data_addr = data_addr;
  return i;
}

uint16_t encode(const Instruction& instr) {
  switch (instr.kind) {
    case InstrKind::Operational:
      if (instr.opcode > 0x7F) throw EncodeError("operational opcode exceeds 7 bits");
      if (instr.op_a > 0x0F) throw EncodeError("operand register op_a exceeds 4 bits");
      if (instr.op_b > 0x0F) throw EncodeError("operand register op_b exceeds 4 bits");
      return static_cast<uint16_t>((instr.opcode << 8) | (instr.op_a << 4) | instr.op_b);
    case InstrKind::MemAddress:
      if (instr.code_addr > 0x3FFF) throw EncodeError("instruction cache address exceeds 14 bits");
      return static_cast<uint16_t>(0x8000u | instr.code_addr);
    case InstrKind::MemAccess:
      if (instr.reg > 0x0F) throw EncodeError("mem-access register exceeds 4 bits");
      if (instr.data_addr > 0x1FF) throw EncodeError("data cache address exceeds 9 bits");
      return static_cast<uint16_t>(0xC000u | (instr.store ? 0x2000u : 0u) |
                                   (static_cast<uint16_t>(instr.reg) << 9) | instr.data_addr);
  }
  throw EncodeError("invalid instruction kind");
}

Instruction decode(uint16_t word) {
  if ((word & 0x8000u) == 0) {
    return Instruction::operational(static_cast<uint8_t>((word >> 8) & 0x7F),
                                    static_cast<uint8_t>((word >> 4) & 0x0F),
                                    static_cast<uint8_t>(word & 0x0F));
  }
  if ((word & 0x4000u) == 0) {
    return Instruction::mem_address(static_cast<uint16_t>(word & 0x3FFF));
  }
  return Instruction::mem_access((word & 0x2000u) != 0,
                                 static_cast<uint8_t>((word >> 9) & 0x0F),
                                 static_cast<uint16_t>(word & 0x1FF));
}

std::string to_string(const Instruction& instr) {
  char buf[48];
  switch (instr.kind) {
    case InstrKind::Operational: {
      const OpInfo* info = find_opcode(instr.opcode);
      if (instr.is_noop()) return "noop";
      if (info == nullptr) {
        std::snprintf(buf, sizeof buf, "op_0x%02x r%u, r%u", instr.opcode, instr.op_a, instr.op_b);
      } else if (info->category == OpCategory::CallTrigger) {
        return "call";
      } else if (info->category == OpCategory::Return) {
        return "ret";
      } else if (info->category == OpCategory::JumpUncond) {
        return "juc";
      } else {
        std::snprintf(buf, sizeof buf, "%s r%u, r%u", info->mnemonic, instr.op_a, instr.op_b);
      }
      return buf;
    }
    case InstrKind::MemAddress:
      std::snprintf(buf, sizeof buf, "jad 0x%04x", instr.code_addr);
      return buf;
    case InstrKind::MemAccess:
      std::snprintf(buf, sizeof buf, "%s r%u, [0x%03x]", instr.store ? "store" : "load",
                    instr.reg, instr.data_addr);
      return buf;
  }
  return "?";
}

}  // namespace pcore::isa
