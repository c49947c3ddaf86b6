#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pcore/assembler.hpp"
#include "pcore/isa.hpp"
#include "pcore/reference.hpp"
#include "support/progen.hpp"

using namespace pcore;
using namespace pcore::assembler;

namespace {

std::vector<std::string> rendered(const AsmProgram& prog) { return render(prog); }

AsmProgram parsed(const char* text) { return parse(text); }

}  // namespace

TEST_CASE("parse recognizes the statement forms") {
  AsmProgram p = parsed("add eax, dword ptr [c]\n");
  REQUIRE(p.stmts.size() == 1);
  CHECK(p.stmts[0].mnemonic == "add");
  REQUIRE(p.stmts[0].ops.size() == 2);
  CHECK(p.stmts[0].ops[0].kind == Operand::Kind::Reg);
  CHECK(p.stmts[0].ops[0].text == "eax");
  CHECK(p.stmts[0].ops[1].kind == Operand::Kind::Mem);
  CHECK(p.stmts[0].ops[1].text == "c");

  AsmProgram j = parsed("jle .LBB3_2\n");
  REQUIRE(j.stmts.size() == 1);
  CHECK(j.stmts[0].mnemonic == "jle");
  CHECK(j.stmts[0].ops[0].kind == Operand::Kind::Label);
  CHECK(j.stmts[0].ops[0].text == ".LBB3_2");

  CHECK(parsed("").stmts.empty());
  CHECK(parsed("\n  # only a comment\n ; another\n").stmts.empty());
}

TEST_CASE("parse reports errors with line numbers") {
  auto check_line = [](const char* text, int line) {
    try {
      parse(text);
      FAIL("expected a parse error for: ", text);
    } catch (const AsmError& e) {
      CHECK(e.line == line);
    }
  };
  check_line("noop\npush eax\n", 2);           // unsupported mnemonic
  check_line("mov eax, [ebp-4]\n", 1);         // unsupported addressing
  check_line("a: noop\nnoop\na: noop\n", 3);   // duplicate label
  check_line("mov eax\n", 1);                  // missing operand
  check_line("mov emt, 5\n", 1);               // reserved register
  check_line("mov ax, 5\n", 1);                // 16-bit names are out
  check_line(".data\nx:\n.long banana\n", 3);  // bad literal
  check_line(".long 5\n", 1);                  // .long outside .data
}

TEST_CASE("memory operand lowering reproduces the shown sequence") {
  AsmProgram p = parsed("add eax, dword ptr [c]\n");
  lower_mem_operands(p);
  CHECK(rendered(p) == std::vector<std::string>{
                           "mov emt, dword ptr [c]",
                           "add eax, emt",
                       });
  // applying the pass again changes nothing
  AsmProgram twice = p;
  lower_mem_operands(twice);
  CHECK(rendered(twice) == rendered(p));
}

TEST_CASE("branch lowering reproduces the shown sequence") {
  AsmProgram p = parsed("cmp eax, dword ptr [b]\njle .LBB3_2\nnoop\n.LBB3_2: noop\n");
  lower_branches(p);
  REQUIRE(p.stmts.size() >= 2);
  CHECK(render(p.stmts[0]) == "jad .LBB3_2");
  CHECK(render(p.stmts[1]) == "jle eax, dword ptr [b]");

  lower_mem_operands(p);
  CHECK(render(p.stmts[0]) == "mov emt, dword ptr [b]");  // hoisted above the pair
  CHECK(render(p.stmts[1]) == "jad .LBB3_2");
  CHECK(render(p.stmts[2]) == "jle eax, emt");
}

TEST_CASE("unconditional jumps and calls become two instructions") {
  AsmProgram p = parsed("jmp L\nL: call F\nF: ret\n");
  lower_branches(p);
  auto r = rendered(p);
  REQUIRE(r.size() == 5);
  CHECK(r[0] == "jad L");
  CHECK(r[1] == "juc");
  CHECK(r[2] == "jad F");
  CHECK(r[3] == "call");
  CHECK(r[4] == "ret");
  CHECK(p.stmts[2].labels == std::vector<std::string>{"L"});
  CHECK(p.stmts[4].labels == std::vector<std::string>{"F"});
}

TEST_CASE("branch lowering rejects unpaired statements") {
  AsmProgram no_cmp = parsed("jle L\nL: noop\n");
  CHECK_THROWS_AS(lower_branches(no_cmp), AsmError);

  AsmProgram clobbered = parsed("cmp eax, ebx\nmov eax, ecx\njle L\nL: noop\n");
  CHECK_THROWS_AS(lower_branches(clobbered), AsmError);

  AsmProgram across_label = parsed("cmp eax, ebx\nX: noop\njle X\n");
  CHECK_THROWS_AS(lower_branches(across_label), AsmError);

  AsmProgram dead_cmp = parsed("cmp eax, ebx\nnoop\n");
  CHECK_THROWS_AS(lower_branches(dead_cmp), AsmError);
}

TEST_CASE("one cmp may feed several conditional jumps") {
  AsmProgram p = parsed("cmp eax, ebx\njle A\njg B\nA: noop\nB: noop\n");
  lower_branches(p);
  auto r = rendered(p);
  REQUIRE(r.size() == 6);
  CHECK(r[0] == "jad A");
  CHECK(r[1] == "jle eax, ebx");
  CHECK(r[2] == "jad B");
  CHECK(r[3] == "jg eax, ebx");
}

TEST_CASE("immediates are pooled through emt and deduplicated") {
  AsmProgram p = parsed("mov eax, 5\n");
  pool_immediates(p);
  CHECK(rendered(p) == std::vector<std::string>{
                           "mov emt, dword ptr [.pool_5]",
                           "mov eax, emt",
                       });
  REQUIRE(p.data.size() == 1);
  CHECK(p.data[0].name == ".pool_5");
  CHECK(p.data[0].words == std::vector<uint32_t>{5});

  AsmProgram dedup = parsed("mov eax, 10000\nadd ebx, 10000\nmov ecx, 7\n");
  pool_immediates(dedup);
  CHECK(dedup.data.size() == 2);  // one slot for 10000, one for 7
  CHECK(render(dedup.stmts[2]) == "add ebx, dword ptr [.pool_10000]");

  AsmProgram none = parsed("add eax, ebx\n");
  AsmProgram before = none;
  pool_immediates(none);
  CHECK(rendered(none) == rendered(before));
  CHECK(none.data.empty());
}

TEST_CASE("pooled negative immediates keep their bit pattern") {
  AsmProgram p = parsed("mov eax, -1\n");
  pool_immediates(p);
  REQUIRE(p.data.size() == 1);
  CHECK(p.data[0].words[0] == 0xFFFFFFFFu);
}

TEST_CASE("consecutive memory users each get their own emt load") {
  AsmProgram p = parsed("sub ecx, dword ptr [d]\nxor ecx, dword ptr [d]\n");
  lower_mem_operands(p);
  CHECK(rendered(p) == std::vector<std::string>{
                           "mov emt, dword ptr [d]",
                           "sub ecx, emt",
                           "mov emt, dword ptr [d]",
                           "xor ecx, emt",
                       });
}

TEST_CASE("memory destinations expand to load-modify-store") {
  AsmProgram p = parsed("add dword ptr [c], eax\n");
  lower_mem_operands(p);
  CHECK(rendered(p) == std::vector<std::string>{
                           "mov emt, dword ptr [c]",
                           "add emt, eax",
                           "mov dword ptr [c], emt",
                       });
}

TEST_CASE("two memory operands are rejected") {
  AsmProgram p = parsed("mov dword ptr [a], dword ptr [b]\n");
  CHECK_THROWS_AS(lower_mem_operands(p), AsmError);
}

TEST_CASE("register moves lower to xor and add") {
  AsmProgram p = parsed("mov eax, ebx\nmov ecx, ecx\n");
  lower_reg_moves(p);
  CHECK(rendered(p) == std::vector<std::string>{
                           "xor eax, eax",
                           "add eax, ebx",
                           "noop",
                       });
}

TEST_CASE("hazard no-ops separate dependents by the pipeline distance") {
  AsmProgram p = parsed("add eax, ebx\nsub ecx, eax\n");
  insert_hazard_noops(p);
  CHECK(rendered(p) == std::vector<std::string>{"add eax, ebx", "noop", "sub ecx, eax"});

  AsmProgram indep = parsed("add eax, ebx\nsub ecx, edx\n");
  insert_hazard_noops(indep);
  CHECK(rendered(indep) == std::vector<std::string>{"add eax, ebx", "sub ecx, edx"});

  // load-use hazard on the inserted emt load
  AsmProgram load_use;
  load_use.stmts.push_back({"mov", {Operand::reg("emt"), Operand::mem("c")}, 0, {}});
  load_use.stmts.push_back({"add", {Operand::reg("eax"), Operand::reg("emt")}, 0, {}});
  insert_hazard_noops(load_use);
  CHECK(rendered(load_use) ==
        std::vector<std::string>{"mov emt, dword ptr [c]", "noop", "add eax, emt"});

  // idempotence
  AsmProgram again = load_use;
  insert_hazard_noops(again);
  CHECK(rendered(again) == rendered(load_use));
}

TEST_CASE("store sources count as reads") {
  AsmProgram p = parsed("add eax, ebx\nmov dword ptr [c], eax\n");
  insert_hazard_noops(p);
  CHECK(rendered(p) == std::vector<std::string>{"add eax, ebx", "noop", "mov dword ptr [c], eax"});
}

TEST_CASE("a wider hazard distance pads between jad and its condition") {
  AsmProgram p = parsed("add eax, ebx\ncmp eax, ecx\njle L\nL: noop\n");
  lower_branches(p);
  insert_hazard_noops(p, 3);
  auto r = rendered(p);
  // the condition reads eax written by the statement before the jad, so the
  // pad lands between the pair
  REQUIRE(r.size() >= 4);
  CHECK(r[0] == "add eax, ebx");
  CHECK(r[1] == "jad L");
  CHECK(r[2] == "noop");
  CHECK(r[3] == "jle eax, ecx");

  AsmProgram at_default = parsed("add eax, ebx\ncmp eax, ecx\njle L\nL: noop\n");
  lower_branches(at_default);
  insert_hazard_noops(at_default);  // distance 2: the pair itself is spacing enough
  CHECK(rendered(at_default) ==
        std::vector<std::string>{"add eax, ebx", "jad L", "jle eax, ecx", "noop"});
}

TEST_CASE("emit encodes lowered statements one to one") {
  AsmProgram noop_only;
  noop_only.stmts.push_back({"noop", {}, 0, {}});
  Artifacts a = emit(noop_only);
  CHECK(a.code == CodeImage{0x0000});

  AsmProgram pair;
  pair.stmts.push_back({"jad", {Operand::imm(0x00FF)}, 0, {}});
  pair.stmts.push_back({"juc", {}, 0, {}});
  Artifacts b = emit(pair);
  CHECK(b.code == CodeImage{0x80FF, 0x2700});
}

TEST_CASE("emit resolves labels and data symbols") {
  Artifacts art = assemble(
      ".data\n"
      "c: .long 42\n"
      ".text\n"
      "start: mov eax, dword ptr [c]\n"
      "jmp start\n");
  CHECK(art.symbols.data.at("c") == 0x020);
  CHECK(art.data.base == 0x020);
  CHECK(art.data.words == std::vector<uint32_t>{42});
  CHECK(art.symbols.code.at("start") == 0);
  CHECK(art.code[0] == isa::encode(isa::Instruction::mem_access(false, 0, 0x020)));

  CHECK_THROWS_AS(assemble("jmp nowhere\n"), AsmError);
  CHECK_THROWS_AS(assemble("mov eax, dword ptr [undefined_sym]\n"), AsmError);
}

TEST_CASE("listing pairs addresses, words and mnemonics") {
  Artifacts art = assemble("L: noop\njmp L\n");
  std::istringstream is(art.listing);
  std::string line;
  bool saw_label = false, saw_noop = false, saw_jad = false;
  while (std::getline(is, line)) {
    if (line == "L:") saw_label = true;
    if (line.rfind("0000  0000  noop", 0) == 0) saw_noop = true;
    if (line.rfind("0001  8000  jad L", 0) == 0) saw_jad = true;
  }
  CHECK(saw_label);
  CHECK(saw_noop);
  CHECK(saw_jad);
}

TEST_CASE("code space overflow is reported") {
  std::string big = ".text\n";
  for (int i = 0; i < 17000; ++i) big += "noop\n";
  CHECK_THROWS_AS(assemble(big), AsmError);
}

TEST_CASE("data space overflow is reported") {
  std::string big = ".data\nx:\n";
  for (int i = 0; i < 420; ++i) big += ".long 1\n";
  big += ".text\nnoop\n";
  CHECK_THROWS_AS(assemble(big), AsmError);
}

TEST_CASE("emt never appears in accepted source") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    std::string src = test_support::generate_program(rng);
    AsmProgram p = parse(src);
    for (const auto& st : p.stmts)
      for (const auto& op : st.ops)
        CHECK((op.kind != Operand::Kind::Reg || op.text != "emt"));
  }
}

TEST_CASE("assembly is deterministic") {
  std::mt19937 rng(99);
  std::string src = test_support::generate_program(rng);
  Artifacts a = assemble(src);
  Artifacts b = assemble(src);
  CHECK(a.code == b.code);
  CHECK(a.data.words == b.data.words);
  CHECK(a.listing == b.listing);
}

TEST_CASE("relowering an already lowered program changes nothing") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    std::string src = test_support::generate_program(rng);
    AsmProgram p = lower(src);
    AsmProgram twice = p;
    lower_mem_operands(twice);
    insert_hazard_noops(twice);
    CHECK(rendered(twice) == rendered(p));
  }
}

TEST_CASE("lowered programs preserve the source semantics") {
  std::mt19937 rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::string src = test_support::generate_program(rng);

    AsmProgram parsed_prog = parse(src);
    test_support::SourceInterpreter interp(parsed_prog);
    test_support::SourceState expect = interp.run(200000);
    REQUIRE(expect.halted);

    Artifacts art = assemble(src);
    ReferenceInterpreter ref(art.code, art.data);
    REQUIRE(ref.run(500000) == ReferenceInterpreter::Stop::Spin);

    for (const auto& [name, value] : expect.regs) {
      int idx = register_index(name);
      REQUIRE(idx >= 0);
      CHECK(ref.regs()[static_cast<size_t>(idx)] == value);
    }
    for (const auto& [name, words] : expect.symbols) {
      uint16_t addr = art.symbols.data.at(name);
      for (size_t i = 0; i < words.size(); ++i)
        CHECK(ref.data(static_cast<uint16_t>(addr + i)) == words[i]);
    }
    for (const auto& [addr, value] : expect.numeric_mem)
      CHECK(ref.data(static_cast<uint16_t>(addr)) == value);
    CHECK(ref.uart_log() == expect.uart);
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("the bundled benchmark assembles and cycles its counter") {
  std::ifstream is(std::string(ASSETS_DIR) + "/programs/benchmark.s");
  REQUIRE(is);
  std::stringstream ss;
  ss << is.rdbuf();
  Artifacts art = assemble(ss.str());
  CHECK(!art.code.empty());

  ReferenceInterpreter ref(art.code, art.data);
  ref.run(120000);  // a couple of laps
  CHECK(ref.uart_log().size() >= 2);
  uint16_t m_addr = art.symbols.data.at("m");
  CHECK(ref.data(m_addr) <= 1000);
}
