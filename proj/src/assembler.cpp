#include "pcore/assembler.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <optional>
#include <set>
#include <unordered_map>

#include "pcore/isa.hpp"
#include "pcore/memsys.hpp"

namespace pcore::assembler {

namespace {

constexpr const char* kEmt = "emt";
constexpr uint16_t kStaticBase = 0x020;

const std::unordered_map<std::string, int>& register_map() {
  static const std::unordered_map<std::string, int> map = {
      {"eax", 0},  {"ebx", 1},  {"ecx", 2},  {"edx", 3},  {"esi", 4},
      {"edi", 5},  {"ebp", 6},  {"esp", 7},  {"r8d", 8},  {"r9d", 9},
      {"r10d", 10}, {"r11d", 11}, {"r12d", 12}, {"r13d", 13}, {kEmt, 15},
  };
  return map;
}

const std::set<std::string>& alu_mnemonics() {
  static const std::set<std::string> set = {"add", "sub", "mul", "xor", "and", "or", "shr", "shl"};
  return set;
}

const std::set<std::string>& jcc_mnemonics() {
  static const std::set<std::string> set = {"jle", "jge", "jl", "jg", "je", "jne"};
  return set;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$'; }
bool is_ident_char(char c) { return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<int64_t> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i >= s.size()) return std::nullopt;
  int base = 10;
  if (s.size() - i > 2 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X')) {
    base = 16;
    i += 2;
  }
  int64_t v = 0;
  bool any = false;
  for (; i < s.size(); ++i) {
    int d;
    char c = s[i];
    if (c >= '0' && c <= '9') d = c - '0';
    else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else if (base == 16 && c >= 'A' && c <= 'F') d = c - 'A' + 10;
    else return std::nullopt;
    v = v * base + d;
    any = true;
    if (v > int64_t{1} << 40) return std::nullopt;  // keep values sane
  }
  if (!any) return std::nullopt;
  return neg ? -v : v;
}

Operand parse_operand(std::string_view tok, int line) {
  tok = trim(tok);
  if (tok.empty()) throw AsmError(line, "empty operand");

  // memory operand, optionally prefixed by a size keyword
  std::string_view rest = tok;
  if (rest.substr(0, 5) == "dword") {
    rest = trim(rest.substr(5));
    if (rest.substr(0, 3) != "ptr") throw AsmError(line, "malformed memory operand");
    rest = trim(rest.substr(3));
  }
  if (!rest.empty() && rest.front() == '[') {
    if (rest.back() != ']') throw AsmError(line, "malformed memory operand");
    std::string_view inner = trim(rest.substr(1, rest.size() - 2));
    if (inner.empty()) throw AsmError(line, "empty memory operand");
    if (auto v = parse_int(inner)) {
      if (*v < 0 || *v > 0x1FF) throw AsmError(line, "memory address outside the 9-bit data space");
      return Operand::mem_addr(*v);
    }
    for (char c : inner)
      if (!is_ident_char(c))
        throw AsmError(line, "unsupported addressing mode: [" + std::string(inner) + "]");
    return Operand::mem(std::string(inner));
  }
  if (rest != tok) throw AsmError(line, "malformed memory operand");

  if (auto v = parse_int(tok)) {
    if (*v < INT32_MIN || *v > int64_t{UINT32_MAX}) throw AsmError(line, "immediate does not fit 32 bits");
    return Operand::imm(*v);
  }

  std::string name(tok);
  if (register_map().count(name)) {
    if (name == kEmt) throw AsmError(line, "register emt is reserved for the assembler");
    return Operand::reg(name);
  }
  if (!is_ident_start(tok.front())) throw AsmError(line, "malformed operand: " + name);
  for (char c : tok)
    if (!is_ident_char(c)) throw AsmError(line, "malformed operand: " + name);
  return Operand::label(name);
}

std::vector<std::string_view> split_operands(std::string_view s) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

const std::set<std::string>& ignored_directives() {
  static const std::set<std::string> set = {
      ".globl",  ".global", ".type",   ".size", ".align", ".p2align",
      ".file",   ".ident",  ".intel_syntax", ".addrsig", ".addrsig_sym",
  };
  return set;
}

void check_statement(const Statement& st) {
  const std::string& m = st.mnemonic;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) throw AsmError(st.line, std::string(what) + " in '" + m + "'");
  };
  auto no_label_ops = [&] {
    for (const auto& op : st.ops)
      expect(op.kind != Operand::Kind::Label, "unexpected label operand");
  };
  if (m == "mov" || m == "cmp" || alu_mnemonics().count(m)) {
    expect(st.ops.size() == 2, "expected two operands");
    no_label_ops();
    expect(st.ops[0].kind != Operand::Kind::Imm, "immediate destination");
    return;
  }
  if (jcc_mnemonics().count(m) || m == "jmp" || m == "call") {
    expect(st.ops.size() == 1, "expected one operand");
    expect(st.ops[0].kind == Operand::Kind::Label || st.ops[0].kind == Operand::Kind::Imm,
           "expected a jump target");
    return;
  }
  if (m == "ret" || m == "noop") {
    expect(st.ops.empty(), "unexpected operand");
    return;
  }
  throw AsmError(st.line, "unsupported mnemonic '" + m + "'");
}

}  // namespace

AsmError::AsmError(int line, const std::string& msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line(line) {}

Operand Operand::reg(std::string name) {
  Operand o;
  o.kind = Kind::Reg;
  o.text = std::move(name);
  return o;
}
Operand Operand::imm(int64_t v) {
  Operand o;
  o.kind = Kind::Imm;
  o.value = v;
  return o;
}
Operand Operand::mem(std::string sym) {
  Operand o;
  o.kind = Kind::Mem;
  o.text = std::move(sym);
  return o;
}
Operand Operand::mem_addr(int64_t addr) {
  Operand o;
  o.kind = Kind::Mem;
  o.value = addr;
  o.numeric = true;
  return o;
}
Operand Operand::label(std::string name) {
  Operand o;
  o.kind = Kind::Label;
  o.text = std::move(name);
  return o;
}

int register_index(std::string_view name) {
  auto it = register_map().find(std::string(name));
  return it == register_map().end() ? -1 : it->second;
}

AsmProgram parse(std::string_view text) {
  AsmProgram prog;
  enum class Section { Text, Data } section = Section::Text;
  std::vector<std::string> pending_labels;
  std::set<std::string> seen_labels;
  int data_open = -1;  // index of the data symbol accepting .long words

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (auto h = line.find(';'); h != std::string_view::npos) line = line.substr(0, h);
    line = trim(line);

    // labels, possibly several on one line
    while (!line.empty()) {
      size_t i = 0;
      if (!is_ident_start(line[0])) break;
      while (i < line.size() && is_ident_char(line[i])) ++i;
      if (i >= line.size() || line[i] != ':') break;
      std::string name(line.substr(0, i));
      if (!seen_labels.insert(name).second) throw AsmError(line_no, "duplicate label '" + name + "'");
      if (section == Section::Data) {
        prog.data.push_back({name, {}, line_no});
        data_open = static_cast<int>(prog.data.size()) - 1;
      } else {
        pending_labels.push_back(name);
      }
      line = trim(line.substr(i + 1));
    }
    if (line.empty()) continue;

    if (line[0] == '.') {
      size_t i = 0;
      while (i < line.size() && is_ident_char(line[i])) ++i;
      std::string directive(line.substr(0, i));
      std::string_view arg = trim(line.substr(i));
      if (directive == ".data") {
        section = Section::Data;
      } else if (directive == ".text") {
        section = Section::Text;
        data_open = -1;
      } else if (directive == ".long") {
        if (section != Section::Data) throw AsmError(line_no, ".long outside the data section");
        if (data_open < 0) throw AsmError(line_no, ".long with no preceding data label");
        auto v = parse_int(arg);
        if (!v || *v < INT32_MIN || *v > int64_t{UINT32_MAX})
          throw AsmError(line_no, "bad .long value");
        prog.data[data_open].words.push_back(static_cast<uint32_t>(*v));
      } else if (ignored_directives().count(directive) || directive.rfind(".cfi", 0) == 0) {
        // tool noise from compiler output, no meaning here
      } else {
        throw AsmError(line_no, "unsupported directive '" + directive + "'");
      }
      continue;
    }

    if (section == Section::Data) throw AsmError(line_no, "instruction in the data section");

    size_t i = 0;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    Statement st;
    st.mnemonic = std::string(line.substr(0, i));
    std::transform(st.mnemonic.begin(), st.mnemonic.end(), st.mnemonic.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (st.mnemonic == "imul") st.mnemonic = "mul";
    st.line = line_no;
    std::string_view rest = trim(line.substr(i));
    if (!rest.empty())
      for (auto tok : split_operands(rest)) st.ops.push_back(parse_operand(tok, line_no));
    check_statement(st);
    st.labels = std::move(pending_labels);
    pending_labels.clear();
    prog.stmts.push_back(std::move(st));
  }

  prog.trailing_labels = std::move(pending_labels);
  return prog;
}

namespace {

Statement make_stmt(std::string mnemonic, std::vector<Operand> ops, int line = 0) {
  Statement st;
  st.mnemonic = std::move(mnemonic);
  st.ops = std::move(ops);
  st.line = line;
  return st;
}

// Rebuild helper: replaces statements one by one, keeping labels bound to the
// first statement that replaces them.
struct Rewriter {
  std::vector<Statement> out;
  std::vector<std::string> pending;

  void carry_labels(Statement& st) {
    if (pending.empty()) return;
    st.labels.insert(st.labels.begin(), pending.begin(), pending.end());
    pending.clear();
  }
  void push(Statement st) {
    carry_labels(st);
    out.push_back(std::move(st));
  }
  void drop_with_labels(Statement& st) {
    pending.insert(pending.end(), st.labels.begin(), st.labels.end());
  }
};

}  // namespace

void pool_immediates(AsmProgram& prog) {
  std::map<uint32_t, std::string> pool;
  auto pool_sym = [&](int64_t value) -> std::string {
    auto v = static_cast<uint32_t>(value);
    auto it = pool.find(v);
    if (it != pool.end()) return it->second;
    std::string name = ".pool_" + std::to_string(v);
    pool.emplace(v, name);
    prog.data.push_back({name, {v}, 0});
    return name;
  };

  Rewriter rw;
  for (auto& st : prog.stmts) {
    if (st.mnemonic == "mov" && st.ops.size() == 2 && st.ops[1].kind == Operand::Kind::Imm) {
      // the constant is staged through emt, as every pooled value is
      std::string sym = pool_sym(st.ops[1].value);
      Statement load = make_stmt("mov", {Operand::reg(kEmt), Operand::mem(sym)}, st.line);
      load.labels = std::move(st.labels);
      rw.push(std::move(load));
      rw.push(make_stmt("mov", {st.ops[0], Operand::reg(kEmt)}, st.line));
      continue;
    }
    for (auto& op : st.ops) {
      if (op.kind != Operand::Kind::Imm) continue;
      if (st.mnemonic == "jad" || st.mnemonic == "jmp" || st.mnemonic == "call")
        continue;  // numeric jump targets are code addresses, not data
      op = Operand::mem(pool_sym(op.value));
    }
    rw.push(std::move(st));
  }
  prog.stmts = std::move(rw.out);
  prog.trailing_labels.insert(prog.trailing_labels.begin(), rw.pending.begin(), rw.pending.end());
}

void lower_branches(AsmProgram& prog) {
  const auto& jccs = jcc_mnemonics();

  // Pair every conditional jump with the cmp that defines its operands. The
  // pair must sit in one basic block and nothing between them may clobber
  // the compared values. A cmp may feed several conditional jumps.
  std::unordered_map<size_t, size_t> jcc_to_cmp;
  std::set<size_t> used_cmps;
  for (size_t i = 0; i < prog.stmts.size(); ++i) {
    const Statement& st = prog.stmts[i];
    if (!jccs.count(st.mnemonic)) continue;
    bool found = false;
    for (size_t back = i; back-- > 0;) {
      const Statement& prev = prog.stmts[back];
      if (prev.mnemonic == "cmp") {
        // clobber scan over the statements between cmp and jcc
        for (size_t k = back + 1; k < i; ++k) {
          const Statement& mid = prog.stmts[k];
          if (jccs.count(mid.mnemonic)) continue;  // reads only
          for (const auto& cop : prev.ops) {
            bool clobbers = false;
            if (cop.kind == Operand::Kind::Reg && !mid.ops.empty() &&
                mid.ops[0].kind == Operand::Kind::Reg && mid.ops[0].text == cop.text &&
                (mid.mnemonic == "mov" || alu_mnemonics().count(mid.mnemonic)))
              clobbers = true;
            if (cop.kind == Operand::Kind::Mem && mid.mnemonic == "mov" && !mid.ops.empty() &&
                mid.ops[0].kind == Operand::Kind::Mem && mid.ops[0].text == cop.text &&
                mid.ops[0].numeric == cop.numeric && mid.ops[0].value == cop.value)
              clobbers = true;
            if (clobbers)
              throw AsmError(st.line, "comparison operand is modified between cmp and '" +
                                          st.mnemonic + "'");
          }
        }
        jcc_to_cmp[i] = back;
        used_cmps.insert(back);
        found = true;
        break;
      }
      if (!prev.labels.empty() || prev.mnemonic == "jmp" || prev.mnemonic == "call" ||
          prev.mnemonic == "ret" || prev.mnemonic == "jad")
        break;  // block boundary
      if (jccs.count(prev.mnemonic)) continue;  // fall-through keeps the cmp live
    }
    if (!found)
      throw AsmError(st.line, "conditional jump '" + st.mnemonic + "' has no dominating cmp");
  }

  for (size_t i = 0; i < prog.stmts.size(); ++i) {
    if (prog.stmts[i].mnemonic == "cmp" && !used_cmps.count(i))
      throw AsmError(prog.stmts[i].line, "cmp without a consuming conditional jump");
  }

  Rewriter rw;
  for (size_t i = 0; i < prog.stmts.size(); ++i) {
    Statement& st = prog.stmts[i];
    if (st.mnemonic == "cmp") {
      rw.drop_with_labels(st);
      continue;
    }
    if (jccs.count(st.mnemonic)) {
      const Statement& cmp = prog.stmts[jcc_to_cmp.at(i)];
      Statement jad = make_stmt("jad", {st.ops[0]}, st.line);
      jad.labels = std::move(st.labels);
      rw.push(std::move(jad));
      rw.push(make_stmt(st.mnemonic, cmp.ops, st.line));
      continue;
    }
    if (st.mnemonic == "jmp") {
      Statement jad = make_stmt("jad", {st.ops[0]}, st.line);
      jad.labels = std::move(st.labels);
      rw.push(std::move(jad));
      rw.push(make_stmt("juc", {}, st.line));
      continue;
    }
    if (st.mnemonic == "call") {
      Statement jad = make_stmt("jad", {st.ops[0]}, st.line);
      jad.labels = std::move(st.labels);
      rw.push(std::move(jad));
      rw.push(make_stmt("call", {}, st.line));
      continue;
    }
    rw.push(std::move(st));
  }
  prog.stmts = std::move(rw.out);
  prog.trailing_labels.insert(prog.trailing_labels.begin(), rw.pending.begin(), rw.pending.end());
}

void lower_mem_operands(AsmProgram& prog) {
  const auto& jccs = jcc_mnemonics();
  Rewriter rw;

  // Inserted loads go directly before the statement, except that a jcc keeps
  // its jad adjacent: the load is hoisted above the pair.
  auto insert_load = [&](Statement load, bool hoist_over_jad) {
    if (hoist_over_jad && !rw.out.empty() && rw.out.back().mnemonic == "jad") {
      Statement jad = std::move(rw.out.back());
      rw.out.pop_back();
      load.labels.insert(load.labels.begin(), jad.labels.begin(), jad.labels.end());
      jad.labels.clear();
      rw.out.push_back(std::move(load));
      rw.out.push_back(std::move(jad));
    } else {
      rw.push(std::move(load));
    }
  };

  for (auto& st : prog.stmts) {
    const bool is_alu = alu_mnemonics().count(st.mnemonic) > 0;
    const bool is_cond = st.ops.size() == 2 && (jccs.count(st.mnemonic) > 0 || st.mnemonic == "cmp");
    if (!is_alu && !is_cond) {
      if (st.mnemonic == "mov" && st.ops.size() == 2 && st.ops[0].kind == Operand::Kind::Mem &&
          st.ops[1].kind == Operand::Kind::Mem)
        throw AsmError(st.line, "unsupported pattern: two memory operands");
      rw.push(std::move(st));
      continue;
    }

    int mem_count = 0;
    for (const auto& op : st.ops)
      if (op.kind == Operand::Kind::Mem) ++mem_count;
    if (mem_count == 0) {
      rw.push(std::move(st));
      continue;
    }
    if (mem_count > 1) throw AsmError(st.line, "unsupported pattern: two memory operands");

    const int mem_idx = st.ops[1].kind == Operand::Kind::Mem ? 1 : 0;
    const bool store_back = mem_idx == 0 && is_alu;  // read-modify-write destination
    const Operand target = st.ops[mem_idx];

    Statement load = make_stmt("mov", {Operand::reg(kEmt), target}, st.line);
    const bool hoist =
        jccs.count(st.mnemonic) > 0 && !rw.out.empty() && rw.out.back().mnemonic == "jad";
    if (!hoist) {
      load.labels = std::move(st.labels);
      st.labels.clear();
    }
    insert_load(std::move(load), hoist);
    st.ops[mem_idx] = Operand::reg(kEmt);
    rw.push(std::move(st));
    if (store_back) rw.push(make_stmt("mov", {target, Operand::reg(kEmt)}, st.line));
  }
  prog.stmts = std::move(rw.out);
  prog.trailing_labels.insert(prog.trailing_labels.begin(), rw.pending.begin(), rw.pending.end());
}

void lower_reg_moves(AsmProgram& prog) {
  Rewriter rw;
  for (auto& st : prog.stmts) {
    if (st.mnemonic == "mov" && st.ops.size() == 2 && st.ops[0].kind == Operand::Kind::Reg &&
        st.ops[1].kind == Operand::Kind::Reg) {
      if (st.ops[0].text == st.ops[1].text) {
        Statement nop = make_stmt("noop", {}, st.line);
        nop.labels = std::move(st.labels);
        rw.push(std::move(nop));
        continue;
      }
      Statement zero = make_stmt("xor", {st.ops[0], st.ops[0]}, st.line);
      zero.labels = std::move(st.labels);
      rw.push(std::move(zero));
      rw.push(make_stmt("add", {st.ops[0], st.ops[1]}, st.line));
      continue;
    }
    rw.push(std::move(st));
  }
  prog.stmts = std::move(rw.out);
  prog.trailing_labels.insert(prog.trailing_labels.begin(), rw.pending.begin(), rw.pending.end());
}

namespace {

void statement_reads(const Statement& st, std::vector<std::string>& out) {
  out.clear();
  const auto& jccs = jcc_mnemonics();
  if (st.mnemonic == "mov" && st.ops.size() == 2) {
    if (st.ops[0].kind == Operand::Kind::Mem && st.ops[1].kind == Operand::Kind::Reg)
      out.push_back(st.ops[1].text);  // store
    if (st.ops[0].kind == Operand::Kind::Reg && st.ops[1].kind == Operand::Kind::Reg)
      out.push_back(st.ops[1].text);
    return;
  }
  if (alu_mnemonics().count(st.mnemonic) && st.ops.size() == 2) {
    if (st.ops[0].kind == Operand::Kind::Reg) out.push_back(st.ops[0].text);
    if (st.ops[1].kind == Operand::Kind::Reg) out.push_back(st.ops[1].text);
    return;
  }
  if ((jccs.count(st.mnemonic) || st.mnemonic == "cmp") && st.ops.size() == 2) {
    if (st.ops[0].kind == Operand::Kind::Reg) out.push_back(st.ops[0].text);
    if (st.ops[1].kind == Operand::Kind::Reg) out.push_back(st.ops[1].text);
    return;
  }
}

const std::string* statement_write(const Statement& st) {
  if (st.mnemonic == "mov" && st.ops.size() == 2 && st.ops[0].kind == Operand::Kind::Reg &&
      st.ops[1].kind != Operand::Kind::Imm) {
    if (st.ops[1].kind == Operand::Kind::Mem || st.ops[1].kind == Operand::Kind::Reg)
      return &st.ops[0].text;
  }
  if (alu_mnemonics().count(st.mnemonic) && st.ops.size() == 2 &&
      st.ops[0].kind == Operand::Kind::Reg)
    return &st.ops[0].text;
  return nullptr;
}

}  // namespace

void insert_hazard_noops(AsmProgram& prog, int hazard_distance) {
  std::unordered_map<std::string, long> last_write;
  Rewriter rw;
  std::vector<std::string> reads;
  for (auto& st : prog.stmts) {
    statement_reads(st, reads);
    long pos = static_cast<long>(rw.out.size());
    long needed = 0;
    for (const auto& r : reads) {
      auto it = last_write.find(r);
      if (it == last_write.end()) continue;
      needed = std::max(needed, hazard_distance - (pos - it->second));
    }
    for (long k = 0; k < needed; ++k) rw.out.push_back(make_stmt("noop", {}));
    const std::string* w = statement_write(st);
    std::string written = w ? *w : std::string();
    rw.push(std::move(st));
    if (!written.empty()) last_write[written] = static_cast<long>(rw.out.size()) - 1;
  }
  prog.stmts = std::move(rw.out);
}

namespace {

std::string render_operand(const Operand& op) {
  char buf[32];
  switch (op.kind) {
    case Operand::Kind::Reg:
      return op.text;
    case Operand::Kind::Imm:
      return std::to_string(op.value);
    case Operand::Kind::Mem:
      if (op.numeric) {
        std::snprintf(buf, sizeof buf, "dword ptr [0x%llx]",
                      static_cast<unsigned long long>(op.value));
        return buf;
      }
      return "dword ptr [" + op.text + "]";
    case Operand::Kind::Label:
      return op.text;
  }
  return "?";
}

}  // namespace

std::string render(const Statement& stmt) {
  std::string out = stmt.mnemonic;
  for (size_t i = 0; i < stmt.ops.size(); ++i) {
    out += i == 0 ? " " : ", ";
    out += render_operand(stmt.ops[i]);
  }
  return out;
}

std::vector<std::string> render(const AsmProgram& prog) {
  std::vector<std::string> out;
  out.reserve(prog.stmts.size());
  for (const auto& st : prog.stmts) out.push_back(render(st));
  return out;
}

Artifacts emit(const AsmProgram& prog) {
  Artifacts art;

  // data layout: definition order from the static base
  uint16_t cursor = kStaticBase;
  art.data.base = kStaticBase;
  for (const auto& sym : prog.data) {
    if (sym.words.empty())
      throw AsmError(sym.line, "data symbol '" + sym.name + "' has no value");
    if (art.symbols.data.count(sym.name) || art.symbols.code.count(sym.name))
      throw AsmError(sym.line, "duplicate symbol '" + sym.name + "'");
    art.symbols.data[sym.name] = cursor;
    for (uint32_t w : sym.words) {
      if (cursor >= kSharedBase) throw AsmError(sym.line, "data image overflow");
      art.data.words.push_back(w);
      ++cursor;
    }
  }

  // code labels: statement index is the instruction address
  if (prog.stmts.size() > kCodeCpuWords) throw AsmError(0, "code image exceeds the 14-bit space");
  for (size_t i = 0; i < prog.stmts.size(); ++i) {
    for (const auto& label : prog.stmts[i].labels) {
      if (art.symbols.code.count(label) || art.symbols.data.count(label))
        throw AsmError(prog.stmts[i].line, "duplicate symbol '" + label + "'");
      art.symbols.code[label] = static_cast<uint16_t>(i);
    }
  }
  for (const auto& label : prog.trailing_labels) {
    if (art.symbols.code.count(label) || art.symbols.data.count(label))
      throw AsmError(0, "duplicate symbol '" + label + "'");
    art.symbols.code[label] = static_cast<uint16_t>(prog.stmts.size());
  }

  auto data_address = [&](const Operand& op, int line) -> uint16_t {
    if (op.numeric) return static_cast<uint16_t>(op.value);
    auto it = art.symbols.data.find(op.text);
    if (it == art.symbols.data.end())
      throw AsmError(line, "undefined data symbol '" + op.text + "'");
    return it->second;
  };
  auto reg_of = [&](const Operand& op, int line) -> uint8_t {
    int idx = register_index(op.text);
    if (idx < 0) throw AsmError(line, "unknown register '" + op.text + "'");
    return static_cast<uint8_t>(idx);
  };

  for (const auto& st : prog.stmts) {
    isa::Instruction instr;
    const std::string& m = st.mnemonic;
    if (m == "noop") {
      instr = isa::Instruction::noop();
    } else if (m == "jad") {
      const Operand& t = st.ops.at(0);
      uint16_t addr;
      if (t.kind == Operand::Kind::Imm) {
        if (t.value < 0 || t.value > 0x3FFF)
          throw AsmError(st.line, "jump target outside the 14-bit space");
        addr = static_cast<uint16_t>(t.value);
      } else {
        auto it = art.symbols.code.find(t.text);
        if (it == art.symbols.code.end())
          throw AsmError(st.line, "undefined label '" + t.text + "'");
        addr = it->second;
      }
      instr = isa::Instruction::mem_address(addr);
    } else if (m == "juc") {
      instr = isa::Instruction::operational(isa::op::kJuc, 0, 0);
    } else if (m == "call") {
      instr = isa::Instruction::operational(isa::op::kCall, 0, 0);
    } else if (m == "ret") {
      instr = isa::Instruction::operational(isa::op::kRet, 0, 0);
    } else if (m == "mov" && st.ops.size() == 2 && st.ops[0].kind == Operand::Kind::Reg &&
               st.ops[1].kind == Operand::Kind::Mem) {
      instr = isa::Instruction::mem_access(false, reg_of(st.ops[0], st.line),
                                           data_address(st.ops[1], st.line));
    } else if (m == "mov" && st.ops.size() == 2 && st.ops[0].kind == Operand::Kind::Mem &&
               st.ops[1].kind == Operand::Kind::Reg) {
      instr = isa::Instruction::mem_access(true, reg_of(st.ops[1], st.line),
                                           data_address(st.ops[0], st.line));
    } else if ((alu_mnemonics().count(m) || jcc_mnemonics().count(m)) && st.ops.size() == 2 &&
               st.ops[0].kind == Operand::Kind::Reg && st.ops[1].kind == Operand::Kind::Reg) {
      const isa::OpInfo* info = isa::find_mnemonic(m);
      if (info == nullptr) throw AsmError(st.line, "no encoding for '" + m + "'");
      instr = isa::Instruction::operational(info->code, reg_of(st.ops[0], st.line),
                                            reg_of(st.ops[1], st.line));
    } else {
      throw AsmError(st.line, "statement not lowered to an encodable form: " + render(st));
    }
    art.code.push_back(isa::encode(instr));
  }

  // listing: address, word, mnemonic
  std::string& listing = art.listing;
  listing += "; registers: eax=r0 ebx=r1 ecx=r2 edx=r3 esi=r4 edi=r5 ebp=r6 esp=r7";
  listing += " r8d..r13d=r8..r13 emt=r15\n";
  for (const auto& [name, addr] : art.symbols.data) {
    char line[96];
    std::snprintf(line, sizeof line, "; data 0x%03x %s\n", addr, name.c_str());
    listing += line;
  }
  for (size_t i = 0; i < prog.stmts.size(); ++i) {
    for (const auto& label : prog.stmts[i].labels) listing += label + ":\n";
    char line[112];
    std::snprintf(line, sizeof line, "%04zx  %04x  %s\n", i, art.code[i],
                  render(prog.stmts[i]).c_str());
    listing += line;
  }
  for (const auto& label : prog.trailing_labels) listing += label + ":\n";
  return art;
}

AsmProgram lower(std::string_view text, int hazard_distance) {
  AsmProgram prog = parse(text);
  pool_immediates(prog);
  lower_branches(prog);
  lower_mem_operands(prog);
  lower_reg_moves(prog);
  insert_hazard_noops(prog, hazard_distance);
  return prog;
}

Artifacts assemble(std::string_view text, int hazard_distance) {
  return emit(lower(text, hazard_distance));
}

}  // namespace pcore::assembler
