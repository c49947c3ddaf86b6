#include <vector>

#include "doctest.h"
#include "pcore/core.hpp"
#include "pcore/memsys.hpp"
#include "pcore/reference.hpp"
#include "pcore/trace.hpp"
#include "support/helpers.hpp"

using namespace pcore;
using namespace pcore::isa;
using test_support::always_on;
using test_support::chopped;
using test_support::make_code;
using test_support::tiled;

namespace {

std::vector<TraceEvent> retires(const Trace& trace) {
  std::vector<TraceEvent> out;
  for (const auto& e : trace.events)
    if (e.kind == EventKind::Retire) out.push_back(e);
  return out;
}

bool has_event(const Trace& trace, EventKind kind) {
  for (const auto& e : trace.events)
    if (e.kind == kind) return true;
  return false;
}

}  // namespace

TEST_CASE("alu operations wrap and mask shifts") {
  CHECK(alu_op(op::kAdd, 0xFFFFFFFFu, 2) == 1);
  CHECK(alu_op(op::kSub, 0, 1) == 0xFFFFFFFFu);
  CHECK(alu_op(op::kMul, 0x10000u, 0x10000u) == 0);  // low 32 bits
  CHECK(alu_op(op::kMul, 0xFFFFFFFFu, 0xFFFFFFFFu) == 1);
  CHECK(alu_op(op::kXor, 0xF0F0u, 0x0FF0u) == 0xFF00u);
  CHECK(alu_op(op::kAnd, 0xF0F0u, 0x0FF0u) == 0x00F0u);
  CHECK(alu_op(op::kOr, 0xF0F0u, 0x0FF0u) == 0xFFF0u);
  CHECK(alu_op(op::kShr, 0xF0u, 4) == 0x0Fu);
  CHECK(alu_op(op::kShr, 0xF0u, 33) == 0x78u);  // count masked to 5 bits
  CHECK(alu_op(op::kShl, 1, 33) == 2);
  CHECK(alu_op(op::kShr, 0x80000000u, 1) == 0x40000000u);  // logical shift
}

TEST_CASE("jump conditions follow signed comparison") {
  CHECK(jump_condition(op::kJle, 3, 5));
  CHECK(jump_condition(op::kJle, 5, 5));
  CHECK_FALSE(jump_condition(op::kJle, 6, 5));
  CHECK(jump_condition(op::kJge, 5, 5));
  CHECK(jump_condition(op::kJl, static_cast<uint32_t>(-1), 0));  // signed
  CHECK_FALSE(jump_condition(op::kJg, 2, 9));
  CHECK(jump_condition(op::kJe, 5, 5));
  CHECK(jump_condition(op::kJne, 4, 5));
  CHECK_FALSE(jump_condition(op::kJne, 5, 5));
}

TEST_CASE("N straight-line instructions retire in N+3 cycles from the grant") {
  const int n = 7;
  std::vector<Instruction> prog(n, Instruction::operational(op::kAdd, 1, 2));
  Simulator sim(always_on(100), /*verbose_retire=*/true);
  sim.load_partition(0, make_code(prog), {});
  sim.run(40);

  auto r = retires(sim.trace());
  REQUIRE(r.size() >= static_cast<size_t>(n));
  CHECK(r[0].cycle == 3);  // fetch 0, decode 1, execute 2, write-back 3
  CHECK(r[n - 1].cycle == n + 2);
  CHECK(r[n - 1].cycle - 0 + 1 == n + 3);
}

TEST_CASE("write-first register file: one no-op separates dependents") {
  // r1 = r1 + r2; noop; r3 = r3 + r1 picks up the fresh r1
  Simulator sim(always_on(100));
  sim.context(0).regs[1] = 7;
  sim.context(0).regs[2] = 3;
  sim.load_partition(0, make_code({
                            Instruction::operational(op::kAdd, 1, 2),
                            Instruction::noop(),
                            Instruction::operational(op::kAdd, 3, 1),
                        }),
                     {});
  sim.run(20);
  CHECK(sim.context(0).regs[1] == 10);
  CHECK(sim.context(0).regs[3] == 10);
}

TEST_CASE("adjacent dependents read the stale value") {
  // Documented pipeline behaviour the assembler's no-ops exist to avoid.
  Simulator sim(always_on(100));
  sim.context(0).regs[1] = 7;
  sim.context(0).regs[2] = 3;
  sim.load_partition(0, make_code({
                            Instruction::operational(op::kAdd, 1, 2),
                            Instruction::operational(op::kAdd, 3, 1),
                        }),
                     {});
  sim.run(20);
  CHECK(sim.context(0).regs[1] == 10);
  CHECK(sim.context(0).regs[3] == 7);  // read before the write landed
}

TEST_CASE("taken branch flushes the two younger slots") {
  Simulator sim(always_on(100), true);
  sim.context(0).regs[1] = 100;
  sim.load_partition(0, make_code({
                            Instruction::mem_address(5),                    // 0: jad 5
                            Instruction::operational(op::kJuc, 0, 0),       // 1: taken
                            Instruction::operational(op::kAdd, 1, 1),       // 2: wrong path
                            Instruction::operational(op::kAdd, 1, 1),       // 3: wrong path
                            Instruction::operational(op::kAdd, 1, 1),       // 4: unreachable
                            Instruction::operational(op::kAdd, 2, 1),       // 5: target
                        }),
                     {});
  for (int i = 0; i < 4; ++i) sim.step();
  CHECK(sim.j_en());  // juc resolved at execute during cycle 3
  sim.run(20);

  CHECK(sim.context(0).regs[1] == 100);  // wrong-path adds never retired
  CHECK(sim.context(0).regs[2] == 100);
  auto r = retires(sim.trace());
  // jad at 3, juc at 4, target at 7 (refetched at 4 after the redirect)
  REQUIRE(r.size() >= 3);
  CHECK(r[0].addr == 0);
  CHECK(r[0].cycle == 3);
  CHECK(r[1].addr == 1);
  CHECK(r[1].cycle == 4);
  CHECK(r[2].addr == 5);
  CHECK(r[2].cycle == 7);
}

TEST_CASE("untaken branch falls through with no penalty") {
  Simulator sim(always_on(100), true);
  sim.context(0).regs[1] = 9;
  sim.context(0).regs[2] = 2;
  sim.load_partition(0, make_code({
                            Instruction::mem_address(5),               // jad 5
                            Instruction::operational(op::kJg, 2, 1),   // 2 > 9: not taken
                            Instruction::operational(op::kAdd, 3, 1),  // fall-through
                            Instruction::operational(op::kAdd, 4, 1),
                        }),
                     {});
  sim.run(20);
  CHECK_FALSE(sim.j_en());
  CHECK(sim.context(0).regs[3] == 9);
  CHECK(sim.context(0).regs[4] == 9);
  auto r = retires(sim.trace());
  REQUIRE(r.size() >= 4);
  for (size_t i = 1; i < 4; ++i) CHECK(r[i].cycle == r[i - 1].cycle + 1);  // contiguous
}

TEST_CASE("call pushes the return address and return resumes past the call") {
  Simulator sim(always_on(200), true);
  sim.context(0).regs[2] = 5;
  sim.load_partition(0, make_code({
                            Instruction::mem_address(5),               // 0: jad callee
                            Instruction::operational(op::kCall, 0, 0), // 1: call
                            Instruction::operational(op::kAdd, 1, 2),  // 2: after return
                            Instruction::mem_address(3),               // 3: spin
                            Instruction::operational(op::kJuc, 0, 0),  // 4
                            Instruction::operational(op::kAdd, 3, 2),  // 5: callee body
                            Instruction::operational(op::kRet, 0, 0),  // 6
                        }),
                     {});
  for (int i = 0; i < 5; ++i) sim.step();
  CHECK(sim.call_en() == false);  // call resolved during cycle 3
  // stack state while inside the callee
  CHECK(sim.context(0).stack_write == 1);
  CHECK(sim.context(0).stack_read == 0);
  CHECK(sim.context(0).stack[0] == 2);  // call address + 1

  sim.run(60);
  CHECK(sim.context(0).regs[3] == 5);  // callee ran
  CHECK(sim.context(0).regs[1] == 5);  // instruction after the call ran once
  CHECK(sim.context(0).stack_write == 0);
  CHECK(sim.context(0).stack_read == -1);
}

TEST_CASE("nested calls unwind to the initial stack pointers") {
  // main calls f1, f1 calls f2, f2 calls f3; each returns in turn
  std::vector<Instruction> prog = {
      Instruction::mem_address(5),                // 0: jad f1
      Instruction::operational(op::kCall, 0, 0),  // 1
      Instruction::mem_address(2),                // 2: spin
      Instruction::operational(op::kJuc, 0, 0),   // 3
      Instruction::noop(),                        // 4
      Instruction::mem_address(9),                // 5: f1: jad f2
      Instruction::operational(op::kCall, 0, 0),  // 6
      Instruction::operational(op::kRet, 0, 0),   // 7
      Instruction::noop(),                        // 8
      Instruction::mem_address(12),               // 9: f2: jad f3
      Instruction::operational(op::kCall, 0, 0),  // 10
      Instruction::operational(op::kRet, 0, 0),   // 11
      Instruction::operational(op::kAdd, 1, 1),   // 12: f3
      Instruction::operational(op::kRet, 0, 0),   // 13
  };
  Simulator sim(always_on(300));
  sim.context(0).regs[1] = 3;
  sim.load_partition(0, make_code(prog), {});
  sim.run(120);
  CHECK(sim.context(0).regs[1] == 6);
  CHECK(sim.context(0).stack_write == 0);
  CHECK(sim.context(0).stack_read == -1);
}

TEST_CASE("return with an empty stack halts with a diagnostic") {
  Simulator sim(always_on(100));
  sim.load_partition(0, make_code({Instruction::operational(op::kRet, 0, 0)}), {});
  CHECK_THROWS_AS(sim.run(20), SimFault);
}

TEST_CASE("address stack overflow is trapped") {
  // jad 0; call repeatedly calls address 0, pushing every time
  Simulator sim(always_on(20000));
  sim.load_partition(0, make_code({
                            Instruction::mem_address(0),
                            Instruction::operational(op::kCall, 0, 0),
                        }),
                     {});
  bool trapped = false;
  try {
    sim.run(10000);
  } catch (const SimFault& f) {
    trapped = true;
    CHECK(f.kind == SimFault::Kind::StackOverflow);
  }
  CHECK(trapped);
}

TEST_CASE("a no-op stream changes nothing but the cycle counter") {
  Simulator sim(always_on(100));
  PartitionContext before = sim.context(0);
  sim.load_partition(0, {}, {});  // empty image fetches no-op words
  sim.run(50);
  PartitionContext after = sim.context(0);
  after.pc = before.pc;  // the pc walks forward, everything else must hold
  CHECK(after == before);
  CHECK(sim.cycle() == 50);
  CHECK(sim.retired()[0] == 0);
  CHECK(sim.trace().events.size() == 1);  // the grant
}

TEST_CASE("loads and stores reach the data cache through the pipeline") {
  // r1 = m[0x30]; noop; r1 += r1; noop; m[0x30] = r1
  DataImage data;
  data.base = 0x030;
  data.words = {3};
  Simulator sim(always_on(100));
  sim.load_partition(0, make_code({
                            Instruction::mem_access(false, 1, 0x030),
                            Instruction::noop(),
                            Instruction::operational(op::kAdd, 1, 1),
                            Instruction::noop(),
                            Instruction::mem_access(true, 1, 0x030),
                        }),
                     data);
  sim.run(20);
  CHECK(sim.mem().peek_data(0x030, 0) == 6);
  CHECK(sim.context(0).regs[1] == 6);
}

TEST_CASE("timer, partition id and uart are reachable from programs") {
  Simulator sim(always_on(100, 1), true);
  sim.load_partition(1, make_code({
                            Instruction::mem_access(false, 1, kDevTimerLow),
                            Instruction::noop(),
                            Instruction::mem_access(true, 1, kDevUartTx),
                            Instruction::mem_access(false, 2, kDevPartitionId),
                        }),
                     {});
  sim.run(20);
  CHECK(sim.context(1).regs[1] == 3);  // load retired at cycle 3
  CHECK(sim.context(1).regs[2] == 1);  // active partition id
  bool saw_uart = false;
  for (const auto& e : sim.trace().events)
    if (e.kind == EventKind::UartTx) {
      saw_uart = true;
      CHECK(e.value == 3);
      CHECK(e.partition == 1);
      CHECK(e.cycle == 5);
    }
  CHECK(saw_uart);
}

TEST_CASE("unknown opcodes retire as no-ops and are flagged") {
  Simulator sim(always_on(100));
  PartitionContext before = sim.context(0);
  sim.load_partition(0, make_code({Instruction::operational(0x7F, 1, 2)}), {});
  sim.run(20);
  PartitionContext after = sim.context(0);
  after.pc = before.pc;
  CHECK(after == before);
  CHECK(has_event(sim.trace(), EventKind::UnknownOp));
}

TEST_CASE("a jump with no prior jad is flagged as stale") {
  Simulator sim(always_on(100));
  sim.load_partition(0, make_code({Instruction::operational(op::kJuc, 0, 0)}), {});
  sim.run(20);
  CHECK(has_event(sim.trace(), EventKind::StaleJump));
}

TEST_CASE("stores never modify the instruction image") {
  std::vector<Instruction> prog;
  for (uint16_t a = 0x020; a < 0x060; ++a) prog.push_back(Instruction::mem_access(true, 1, a));
  CodeImage code = make_code(prog);
  Simulator sim(always_on(400));
  sim.context(0).regs[1] = 0xDEAD;
  sim.load_partition(0, code, {});
  sim.run(300);
  for (size_t i = 0; i < code.size(); ++i) CHECK(sim.mem().peek_code(static_cast<uint16_t>(i), 0) == code[i]);
}

TEST_CASE("suspend and resume leaves the architectural state identical") {
  // A compute loop: r1 accumulates r2 while r3 counts down via jg.
  std::vector<Instruction> prog = {
      Instruction::mem_address(6),               // 0: jad exit
      Instruction::operational(op::kAdd, 1, 2),  // 1: r1 += r2
      Instruction::operational(op::kSub, 3, 4),  // 2: r3 -= r4
      Instruction::mem_address(1),               // 3: jad loop body
      Instruction::operational(op::kJg, 3, 0),   // 4: while r3 > 0
      Instruction::noop(),                       // 5
      Instruction::mem_address(6),               // 6: spin
      Instruction::operational(op::kJuc, 0, 0),  // 7
  };
  auto init = [&](Simulator& sim) {
    sim.context(0).regs[2] = 7;
    sim.context(0).regs[3] = 400;
    sim.context(0).regs[4] = 1;
    sim.load_partition(0, make_code(prog), {});
  };

  Simulator solo(always_on(20000));
  init(solo);
  solo.run(12000);

  Simulator interrupted(chopped(37));  // re-granted every 37 cycles
  init(interrupted);
  interrupted.run(12000 * 2);  // at least the same number of granted cycles

  CHECK(interrupted.context(0).regs == solo.context(0).regs);
  CHECK(interrupted.context(0).stack == solo.context(0).stack);
  CHECK(interrupted.context(0).stack_write == solo.context(0).stack_write);
  CHECK(interrupted.context(0).jump_reg == solo.context(0).jump_reg);
  CHECK(solo.context(0).regs[1] == 7 * 400);
}

TEST_CASE("inactive partitions are bit-identical across another partition's grant") {
  std::vector<Instruction> writer = {
      Instruction::operational(op::kAdd, 1, 2),
      Instruction::mem_access(true, 1, 0x040),
      Instruction::mem_address(2),
      Instruction::operational(op::kJuc, 0, 0),
  };
  Simulator sim(tiled({500, 500, 500}));
  sim.context(0).regs[2] = 11;
  sim.load_partition(0, make_code(writer), {});
  PartitionContext snap1 = sim.context(1);
  PartitionContext snap2 = sim.context(2);
  sim.run(499);  // inside partition 0's first grant
  CHECK(sim.context(1) == snap1);
  CHECK(sim.context(2) == snap2);
}

TEST_CASE("partitions keep identical register and memory names apart") {
  auto writer = [](uint32_t v) {
    return std::vector<Instruction>{
        Instruction::mem_access(false, 1, 0x020),  // r1 = m[0x20]
        Instruction::noop(),
        Instruction::mem_access(true, 1, 0x021),  // m[0x21] = r1
        Instruction::mem_address(3),
        Instruction::operational(op::kJuc, 0, 0),
    };
    (void)v;
  };
  DataImage d0, d1;
  d0.base = d1.base = 0x020;
  d0.words = {111};
  d1.words = {222};
  Simulator sim(tiled({300, 300}));
  sim.load_partition(0, make_code(writer(0)), d0);
  sim.load_partition(1, make_code(writer(0)), d1);
  sim.run(1000);
  CHECK(sim.context(0).regs[1] == 111);
  CHECK(sim.context(1).regs[1] == 222);
  CHECK(sim.mem().peek_data(0x021, 0) == 111);
  CHECK(sim.mem().peek_data(0x021, 1) == 222);
  auto& counts = sim.mem().segment_access_counts();
  CHECK(counts[0][1] == 0);
  CHECK(counts[1][0] == 0);
}

TEST_CASE("pipelined core matches the reference interpreter on a small program") {
  DataImage data;
  data.base = 0x020;
  data.words = {3, 0};
  std::vector<Instruction> prog = {
      Instruction::mem_access(false, 1, 0x020),  // r1 = 3
      Instruction::noop(),
      Instruction::operational(op::kAdd, 1, 1),  // r1 = 6
      Instruction::noop(),
      Instruction::mem_access(true, 1, 0x020),   // m = 6
      Instruction::mem_address(5),               // spin
      Instruction::operational(op::kJuc, 0, 0),
  };
  CodeImage code = make_code(prog);

  ReferenceInterpreter ref(code, data);
  REQUIRE(ref.run(1000) == ReferenceInterpreter::Stop::Spin);
  CHECK(ref.data(0x020) == 6);

  Simulator sim(always_on(200));
  sim.load_partition(0, code, data);
  sim.run(100);
  CHECK(sim.mem().peek_data(0x020, 0) == 6);
  for (int r = 0; r < 16; ++r) CHECK(sim.context(0).regs[r] == ref.regs()[r]);
}

TEST_CASE("reference interpreter example: load, double, store") {
  DataImage data;
  data.base = 0x023;
  data.words = {3};
  ReferenceInterpreter ref(make_code({
                               Instruction::mem_access(false, 1, 0x023),
                               Instruction::operational(op::kAdd, 1, 1),
                               Instruction::mem_access(true, 1, 0x023),
                               Instruction::mem_address(3),
                               Instruction::operational(op::kJuc, 0, 0),
                           }),
                           data);
  CHECK(ref.run(100) == ReferenceInterpreter::Stop::Spin);
  CHECK(ref.data(0x023) == 6);
}

TEST_CASE("reference interpreter reports an exhausted budget") {
  // endless loop that is not the spin idiom
  ReferenceInterpreter ref(make_code({
                               Instruction::mem_address(0),
                               Instruction::operational(op::kJe, 0, 0),  // always taken
                           }),
                           {});
  CHECK(ref.run(500) == ReferenceInterpreter::Stop::Budget);
}

TEST_CASE("traces are byte-identical across runs") {
  auto run_once = [] {
    Simulator sim(tiled({200, 300}), true);
    sim.context(0).regs[2] = 3;
    sim.load_partition(0, make_code({
                              Instruction::operational(op::kAdd, 1, 2),
                              Instruction::mem_access(true, 1, kDevUartTx),
                              Instruction::mem_address(2),
                              Instruction::operational(op::kJuc, 0, 0),
                          }),
                       {});
    sim.set_injections({{100, 0, 42}, {200, 1, 43}});
    sim.run(2000);
    return to_csv(sim.trace());
  };
  CHECK(run_once() == run_once());
}
