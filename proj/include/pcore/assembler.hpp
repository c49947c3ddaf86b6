#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pcore/image.hpp"

namespace pcore::assembler {

// Accepted source subset: x86-style assembly with register, memory-symbol
// and immediate operands.
//
//   mov add sub imul xor and or shr shl cmp
//   jle jge jl jg je jne jmp call ret
//
// plus `.data`/`.text` sections and `.long` words. Memory operands name a
// data symbol or a bare numeric address: `dword ptr [c]`, `[0x19]`.
// Anything outside the subset is a hard error, never a silent translation.
//
// Lowering introduces the internal statements `jad` (set jump address),
// `juc` (unconditional jump trigger) and `noop`. The register `emt` is
// reserved for inserted loads and may not appear in source.

class AsmError : public std::runtime_error {
 public:
  AsmError(int line, const std::string& msg);
  int line;
};

struct Operand {
  enum class Kind { Reg, Imm, Mem, Label };
  Kind kind = Kind::Reg;
  std::string text;      // register name, symbol, or label
  int64_t value = 0;     // immediate value or numeric memory address
  bool numeric = false;  // memory operand written as a bare address

  static Operand reg(std::string name);
  static Operand imm(int64_t v);
  static Operand mem(std::string sym);
  static Operand mem_addr(int64_t addr);
  static Operand label(std::string name);
};

struct Statement {
  std::string mnemonic;
  std::vector<Operand> ops;
  int line = 0;  // 0 for pass-inserted statements
  std::vector<std::string> labels;
};

struct DataSym {
  std::string name;
  std::vector<uint32_t> words;
  int line = 0;
};

struct AsmProgram {
  std::vector<Statement> stmts;
  std::vector<DataSym> data;
  std::vector<std::string> trailing_labels;  // bind to the address past the last statement
};

struct SymbolTable {
  std::map<std::string, uint16_t> code;  // label -> instruction cache address
  std::map<std::string, uint16_t> data;  // symbol -> data cache address
};

struct Artifacts {
  CodeImage code;
  DataImage data;
  std::string listing;
  SymbolTable symbols;
};

AsmProgram parse(std::string_view text);

// Immediate operands become loads from a constant pool in the data image;
// identical constants share a slot.
void pool_immediates(AsmProgram& prog);

// cmp/jcc pairs become jad/jcc, jmp becomes jad+juc, call becomes jad+call.
void lower_branches(AsmProgram& prog);

// No ALU or condition statement keeps a memory operand; inserted `mov emt`
// loads feed them instead. ALU statements with a memory destination expand
// to load-modify-store.
void lower_mem_operands(AsmProgram& prog);

// Register-to-register movs have no single-instruction encoding; they become
// xor dst,dst + add dst,src.
void lower_reg_moves(AsmProgram& prog);

// Enforces the producer/consumer pipeline distance by inserting no-ops
// directly before the consumer.
void insert_hazard_noops(AsmProgram& prog, int hazard_distance = 2);

Artifacts emit(const AsmProgram& prog);

// Full pipeline: parse, pool, branches, memory operands, register moves,
// hazard no-ops, emit.
Artifacts assemble(std::string_view text, int hazard_distance = 2);
AsmProgram lower(std::string_view text, int hazard_distance = 2);

std::string render(const Statement& stmt);
std::vector<std::string> render(const AsmProgram& prog);

int register_index(std::string_view name);  // -1 when unknown

}  // namespace pcore::assembler
