#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "prophet/sim.hpp"

using namespace prophet;

namespace {

std::vector<std::string> grep(const std::vector<std::string>& lines,
                              const std::string& needle) {
  std::vector<std::string> out;
  for (const auto& l : lines) {
    if (l.find(needle) != std::string::npos) out.push_back(l);
  }
  return out;
}

MachineConfig small_cfg(int pes = 4) {
  MachineConfig cfg;
  cfg.num_pes = pes;
  cfg.memory_words = 4096;
  return cfg;
}

// One spawn, perfect memory live-in prediction via the p-slice: the slice
// reads the spawn-time value, the body re-reads and sees the parent's later
// store.
const char* kFig5 = R"(
main:
    li r1, 1
    li r2, 2
    li r5, 100
    st r1, [r5+0]
    spawn SP1
    st r2, [r5+0]
    mov r3, r1
    li r9, 1
    li r9, 2
    li r9, 3
SP1:
    cqip SP1
    pslice_entry SP1
    ld r3, [r5+0]
    pslice_exit SP1
    ld r4, [r5+0]
    add r6, r3, r4
    st r6, [r5+1]
    halt
)";

}  // namespace

TEST_CASE("arithmetic-only program costs the same on both machines") {
  Program prog = parse_program(R"(
main:
    li r1, 6
    li r2, 7
    mul r3, r1, r2
    addi r3, r3, -2
    sub r4, r3, r1
    halt
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg);
  CHECK(r.stats.cycles == r.seq_cycles);
  CHECK(r.stats.cycles == 6);
  CHECK(r.registers[3] == 40);
  CHECK(r.registers[4] == 34);
  CHECK(r.stats.spawned_threads == 0);
  CHECK(r.stats.commits == 0);
}

TEST_CASE("stores are buffered and paid once at the final commit") {
  Program prog = parse_program(R"(
    li r1, 9
    li r5, 50
    st r1, [r5+0]
    st r1, [r5+1]
    st r1, [r5+0]
    halt
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg);
  CHECK(r.memory[50] == 9);
  CHECK(r.memory[51] == 9);
  CHECK(r.seq_cycles == 6);
  // 6 instruction cycles + 2 distinct dirty words at commit.
  CHECK(r.stats.cycles == 8);
}

TEST_CASE("memory latency applies to loads; buffered stores dodge it") {
  Program prog = parse_program(R"(
    li r5, 10
    ld r1, [r5+0]
    st r1, [r5+1]
    halt
)");
  MachineConfig cfg = small_cfg();
  cfg.mem_latency = 3;
  RunResult r = run_speculative(prog, cfg);
  CHECK(r.seq_cycles == 1 + 3 + 3 + 1);
  // li 1, ld 3 (miss to memory), st 1, halt 1, commit 1 word.
  CHECK(r.stats.cycles == 1 + 3 + 1 + 1 + 1);
}

TEST_CASE("perfect slice prediction: spawn, verify, commit, token handoff") {
  Program prog = parse_program(kFig5);
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg, /*with_trace=*/true);
  CHECK(r.memory[100] == 2);
  CHECK(r.memory[101] == 3);  // 1 (pre-computed) + 2 (speculative re-read)
  CHECK(r.stats.spawned_threads == 1);
  CHECK(r.stats.failed_threads == 0);
  CHECK(r.stats.violations == 0);
  CHECK(r.stats.verifications == 1);
  CHECK(r.stats.failed_verifications == 0);
  CHECK(r.stats.commits == 1);

  // The slice read the spawn-time value 1, the body re-read and saw 2.
  auto pre_loads = grep(r.trace, "ev=LD");
  REQUIRE(pre_loads.size() >= 2);
  auto pre = grep(pre_loads, "phase=pre");
  auto sp = grep(grep(pre_loads, "phase=sp"), "tid=1");
  REQUIRE(pre.size() == 1);
  REQUIRE(sp.size() == 1);
  CHECK(pre[0].find("addr=100 value=1 src=remote") != std::string::npos);
  CHECK(sp[0].find("addr=100 value=2 src=remote") != std::string::npos);
}

TEST_CASE("speculative runs are deterministic byte for byte") {
  Program prog = parse_program(kFig5);
  MachineConfig cfg = small_cfg();
  RunResult a = run_speculative(prog, cfg, true);
  RunResult b = run_speculative(prog, cfg, true);
  CHECK(a.trace == b.trace);
  CHECK(a.memory == b.memory);
  CHECK(a.stats.cycles == b.stats.cycles);
}

TEST_CASE("raw violation: restart the violator, re-run, converge") {
  Program prog = parse_program(R"(
main:
    li r5, 100
    li r1, 7
    spawn SP1
    li r9, 1
    li r9, 2
    li r9, 3
    li r9, 4
    li r9, 5
    st r1, [r5+0]
    li r9, 6
    li r9, 7
    li r9, 8
    mov r3, r1
SP1:
    cqip SP1
    pslice_entry SP1
    pslice_exit SP1
    ld r4, [r5+0]
    st r4, [r5+1]
    halt
)");
  MachineConfig cfg = small_cfg(2);
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[100] == 7);
  CHECK(r.memory[101] == 7);
  CHECK(r.stats.violations == 1);
  CHECK(r.stats.spawned_threads == 1);
  CHECK(r.stats.failed_threads == 1);
  CHECK(r.stats.commits == 1);  // the restarted thread still commits
  auto violations = grep(r.trace, "ev=VIOLATION");
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("addr=100 victim=1") != std::string::npos);
  // First consume was the stale 0 from memory; the re-run reads 7 remotely.
  auto loads = grep(grep(r.trace, "ev=LD"), "tid=1");
  REQUIRE(loads.size() == 2);
  CHECK(loads[0].find("value=0 src=mem") != std::string::npos);
  CHECK(loads[1].find("value=7 src=remote") != std::string::npos);
}

TEST_CASE("mispredicting slice: verification fails, stable re-executes") {
  Program prog = parse_program(R"(
main:
    li r5, 100
    li r1, 5
    spawn SP1
    li r9, 1
    li r9, 2
    li r9, 3
    li r9, 4
    li r1, 6
    mov r3, r1
SP1:
    cqip SP1
    pslice_entry SP1
    mov r3, r1
    pslice_exit SP1
    mov r7, r3
    st r7, [r5+0]
    halt
)");
  MachineConfig cfg = small_cfg(2);
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[100] == 6);
  CHECK(r.stats.verifications == 1);
  CHECK(r.stats.failed_verifications == 1);
  CHECK(r.stats.failed_threads == 1);
  CHECK(r.stats.commits == 0);  // nothing ever passed a verification
  auto fails = grep(r.trace, "result=fail");
  REQUIRE(fails.size() == 1);
  CHECK(fails[0].find("r3: predicted 5, stable 6") != std::string::npos);
  CHECK(grep(r.trace, "reason=verify_fail").size() == 1);
}

TEST_CASE("control mismatch squashes the wrong-path successor") {
  Program prog = parse_program(R"(
main:
    li r5, 100
    li r1, 1
    spawn B
    st r1, [r5+0]
A:
    cqip A
    pslice_entry A
    pslice_exit A
    addi r1, r1, 10
    st r1, [r5+1]
B:
    cqip B
    pslice_entry B
    pslice_exit B
    addi r1, r1, 100
    st r1, [r5+2]
    halt
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[100] == 1);
  CHECK(r.memory[101] == 11);
  CHECK(r.memory[102] == 111);
  CHECK(r.stats.spawned_threads == 1);
  CHECK(r.stats.failed_threads == 1);
  CHECK(r.stats.verifications == 0);
  auto mismatches = grep(r.trace, "action=mismatch");
  REQUIRE(mismatches.size() == 1);
  CHECK(mismatches[0].find("label=A") != std::string::npos);
  CHECK(mismatches[0].find("found=B") != std::string::npos);
}

TEST_CASE("commit token walks the chain in speculative order") {
  Program prog = parse_program(R"(
main:
    li r5, 200
    li r1, 1
    spawn A
    st r1, [r5+0]
A:
    cqip A
    pslice_entry A
    pslice_exit A
    spawn B
    addi r1, r1, 1
    st r1, [r5+1]
B:
    cqip B
    pslice_entry B
    addi r1, r1, 1
    pslice_exit B
    addi r1, r1, 1
    st r1, [r5+2]
    halt
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[200] == 1);
  CHECK(r.memory[201] == 2);
  CHECK(r.memory[202] == 3);
  CHECK(r.registers[1] == 3);
  CHECK(r.stats.spawned_threads == 2);
  CHECK(r.stats.failed_threads == 0);
  CHECK(r.stats.commits == 2);
  auto commits = grep(r.trace, "ev=COMMIT");
  REQUIRE(commits.size() == 2);
  CHECK(commits[0].find("tid=0") != std::string::npos);
  CHECK(commits[0].find("token_to=1") != std::string::npos);
  CHECK(commits[1].find("tid=1") != std::string::npos);
  CHECK(commits[1].find("token_to=2") != std::string::npos);
  auto halts = grep(r.trace, "ev=HALT");
  REQUIRE(halts.size() == 1);
  CHECK(halts[0].find("tid=2") != std::string::npos);
}

TEST_CASE("spawns are refused once the PEs are full") {
  Program prog = parse_program(kFig5);
  MachineConfig cfg = small_cfg(1);
  RunResult r = run_speculative(prog, cfg);
  CHECK(r.stats.spawned_threads == 0);
  CHECK(r.stats.refused_spawns == 1);
  CHECK(r.memory[100] == 2);
  CHECK(r.memory[101] == 3);
}

TEST_CASE("a wrong-path thread that runs off the program parks harmlessly") {
  Program prog = parse_program(R"(
main:
    spawn L
    li r1, 5
    li r2, 0
    li r9, 1
    li r9, 2
    li r9, 3
    st r1, [r2+100]
    halt
L:
    cqip L
    pslice_entry L
    pslice_exit L
    addi r1, r1, 1
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[100] == 5);
  CHECK(r.stats.spawned_threads == 1);
  CHECK(r.stats.failed_threads == 1);  // squashed at the stable halt
  CHECK(grep(r.trace, "kind=offend").size() == 1);
  CHECK(grep(r.trace, "reason=halt").size() == 1);
}

TEST_CASE("non-terminating programs hit the cycle budget") {
  Program prog = parse_program(R"(
main:
    jmp main
    halt
)");
  MachineConfig cfg = small_cfg();
  cfg.max_cycles = 1000;
  CHECK_THROWS_AS(run_speculative(prog, cfg), RuntimeLimitError);
}

TEST_CASE("squash instruction discards the named successor region") {
  Program prog = parse_program(R"(
main:
    li r5, 100
    li r1, 1
    spawn SP1
    st r1, [r5+0]
    squash SP1
    addi r1, r1, 2
SP1:
    cqip SP1
    pslice_entry SP1
    pslice_exit SP1
    addi r1, r1, 5
    st r1, [r5+1]
    halt
)");
  MachineConfig cfg = small_cfg();
  RunResult r = run_speculative(prog, cfg, true);
  CHECK(r.memory[100] == 1);
  CHECK(r.memory[101] == 8);  // 1 + 2 + 5
  CHECK(r.stats.spawned_threads == 1);
  CHECK(r.stats.failed_threads == 1);
  auto squashes = grep(r.trace, "reason=instr");
  REQUIRE(squashes.size() == 1);
  CHECK(squashes[0].find("label=SP1") != std::string::npos);
  // After the squash the cqip finds no successor and falls through.
  CHECK(grep(r.trace, "action=through").size() == 1);
}
