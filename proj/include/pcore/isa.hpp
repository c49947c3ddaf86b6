#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcore::isa {

// 16-bit instruction word layouts:
//
//   operational   0 ooooooo aaaa bbbb    7-bit opcode, two register operands
//   mem-address   10 dddddddddddddd      14-bit instruction cache address
//   mem-access    11 s rrrr ddddddddd    store flag, register, 9-bit data address
//
// The first operand register of an operational instruction doubles as the
// destination. Mem-access moves a word between the data cache and a register;
// the direction bit is 1 for a store.

enum class InstrKind : uint8_t { Operational, MemAddress, MemAccess };

enum class OpCategory : uint8_t {
  AluArith,
  AluLogic,
  JumpCond,
  JumpUncond,
  CallTrigger,
  Return,
  NoOp,
  StoreTrigger,  // stores are keyed off the mem-access direction bit, no opcode maps here
};

namespace op {
constexpr uint8_t kNoop = 0x00;
constexpr uint8_t kAdd = 0x11;
constexpr uint8_t kSub = 0x12;
constexpr uint8_t kMul = 0x13;
constexpr uint8_t kJle = 0x21;
constexpr uint8_t kJge = 0x22;
constexpr uint8_t kJl = 0x23;
constexpr uint8_t kJg = 0x24;
constexpr uint8_t kJe = 0x25;
constexpr uint8_t kJne = 0x26;
constexpr uint8_t kJuc = 0x27;
constexpr uint8_t kCall = 0x28;
constexpr uint8_t kRet = 0x29;
constexpr uint8_t kXor = 0x31;
constexpr uint8_t kAnd = 0x32;
constexpr uint8_t kOr = 0x33;
constexpr uint8_t kShr = 0x34;
constexpr uint8_t kShl = 0x35;
}  // namespace op

struct OpInfo {
  uint8_t code;
  const char* mnemonic;
  OpCategory category;
};

std::span<const OpInfo> opcode_table();
const OpInfo* find_opcode(uint8_t code);
const OpInfo* find_mnemonic(std::string_view mnemonic);
inline bool known_opcode(uint8_t code) { return find_opcode(code) != nullptr; }

// Tagged instruction value. Fields that do not belong to the active kind are
// kept zeroed so that defaulted equality behaves.
struct Instruction {
  InstrKind kind = InstrKind::Operational;

  // Operational
  uint8_t opcode = 0;
  uint8_t op_a = 0;
  uint8_t op_b = 0;

  // MemAddress
  uint16_t code_addr = 0;  // 14 bits

  // MemAccess
  bool store = false;
  uint8_t reg = 0;
  uint16_t data_addr = 0;  // 9 bits

  static Instruction operational(uint8_t opcode, uint8_t op_a, uint8_t op_b);
  static Instruction mem_address(uint16_t code_addr);
  static Instruction mem_access(bool store, uint8_t reg, uint16_t data_addr);
  static Instruction noop() { return operational(op::kNoop, 0, 0); }

  bool is_noop() const {
    return kind == InstrKind::Operational && opcode == op::kNoop;
  }

  bool operator==(const Instruction&) const = default;
};

class EncodeError : public std::runtime_error {
 public:
  explicit EncodeError(const std::string& what) : std::runtime_error(what) {}
};

// Throws EncodeError when a field is out of range.
uint16_t encode(const Instruction& instr);

// Total over all 65536 words: the two tag bits always select a layout.
// Operational words with an opcode missing from the table decode with their
// raw fields; known_opcode() tells them apart.
Instruction decode(uint16_t word);

// Mnemonic rendering, e.g. "add r1, r2", "jad 0x00ff", "load r3, [0x018]".
std::string to_string(const Instruction& instr);

}  // namespace pcore::isa
