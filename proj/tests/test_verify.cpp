#include <map>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "prophet/verify.hpp"

using namespace prophet;

namespace {

// Stable + child pair, the way the simulator holds them at a cqip.
struct Pair {
  ThreadContext stable;
  ThreadContext child;
  std::vector<int64_t> memory = std::vector<int64_t>(64, 0);

  Pair() {
    stable.tid = 0;
    stable.stable = true;
    stable.regs.reset({});
    child.tid = 1;
    child.version = 1;
    child.regs.reset({});
  }
};

}  // namespace

TEST_CASE("a correct prediction passes and counts compared words") {
  Pair p;
  p.memory[10] = 42;
  p.child.cache.write_pre(10, 42);     // p-slice predicted memory[10]
  p.child.regs.write_pre(3, 42);
  p.child.regs.seal_precomputation();
  (void)p.child.regs.read_sp(3);       // body consumed the prediction
  p.stable.regs.write_sp(3, 42);       // stable produced the same value

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  CHECK(report.passed());
  CHECK(report.words_compared == 2);
  CHECK(describe(report) == "ok");
}

TEST_CASE("a mispredicted memory word is reported by address") {
  Pair p;
  p.child.cache.write_pre(10, 5);
  p.stable.cache.write_sp(10, 1, 7);  // stable's final value differs

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  REQUIRE_FALSE(report.passed());
  REQUIRE(report.memory.size() == 1);
  CHECK(report.memory[0] == MemoryMismatch{10, 5, 7});
  CHECK(report.registers.empty());
  CHECK(describe(report) == "memory[10]: predicted 5, stable 7");
}

TEST_CASE("a mispredicted consumed register is reported by name") {
  Pair p;
  p.child.regs.write_pre(3, 10);
  p.child.regs.seal_precomputation();
  (void)p.child.regs.read_sp(3);
  p.stable.regs.write_sp(3, 12);

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  REQUIRE_FALSE(report.passed());
  REQUIRE(report.registers.size() == 1);
  CHECK(report.registers[0] == RegisterMismatch{3, 10, 12});
  CHECK(describe(report) == "r3: predicted 10, stable 12");
}

TEST_CASE("read-then-written registers still validate the consumed value") {
  Pair p;
  p.child.regs.write_pre(4, 10);
  p.child.regs.seal_precomputation();
  (void)p.child.regs.read_sp(4);
  p.child.regs.write_sp(4, 99);  // VaandMC; 10 was still consumed
  p.stable.regs.write_sp(4, 11);

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  REQUIRE(report.registers.size() == 1);
  CHECK(report.registers[0] == RegisterMismatch{4, 10, 11});
}

TEST_CASE("write-first registers and untouched registers are not checked") {
  Pair p;
  p.child.regs.write_pre(5, 10);
  p.child.regs.seal_precomputation();
  p.child.regs.write_sp(5, 1);   // MCommit: never consumed the prediction
  p.stable.regs.write_sp(5, 2);
  p.stable.regs.write_sp(6, 3);  // child never touched r6

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  CHECK(report.passed());
  CHECK(report.words_compared == 0);
}

TEST_CASE("pre-computation loads are not verification targets") {
  Pair p;
  p.memory[20] = 8;
  p.child.cache.install_pre_loaded(20, 8);  // PreSh
  p.memory[20] = 9;                         // stable later changed it

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  CHECK(report.passed());
  CHECK(report.words_compared == 0);
}

TEST_CASE("a prediction superseded by the body is still verified") {
  Pair p;
  p.child.cache.write_pre(12, 5);          // PreEx
  p.child.cache.write_sp(12, 1, 77);       // body overwrote: PreEx -> PreExO
  p.memory[12] = 5;

  auto report = verify_sub_thread(p.stable, p.child, p.memory);
  CHECK(report.passed());  // the version-0 value 5 is what gets checked
  p.memory[12] = 6;
  auto report2 = verify_sub_thread(p.stable, p.child, p.memory);
  REQUIRE(report2.memory.size() == 1);
  CHECK(report2.memory[0] == MemoryMismatch{12, 5, 6});
}

TEST_CASE("the stable view prefers the stable cache over memory") {
  Pair p;
  p.memory[30] = 1;
  CHECK(stable_view(p.stable.cache, p.memory, 30) == 1);
  p.stable.cache.write_sp(30, 1, 2);
  CHECK(stable_view(p.stable.cache, p.memory, 30) == 2);
  p.stable.cache.write_sp(30, 3, 4);  // ages the old line, new current
  CHECK(stable_view(p.stable.cache, p.memory, 30) == 4);
  CHECK(stable_view(p.stable.cache, p.memory, 9999) == 0);  // out of range
}

TEST_CASE("verification against a replay oracle on random predictions") {
  std::mt19937_64 rng(77001);
  auto roll = [&rng](int n) {
    return static_cast<int>(rng() % static_cast<uint64_t>(n));
  };
  for (int trial = 0; trial < 200; ++trial) {
    Pair p;
    std::map<uint64_t, int64_t> stable_final_mem;
    for (int i = 0; i < 8; ++i) {
      uint64_t a = static_cast<uint64_t>(roll(16));
      int64_t v = roll(5);
      p.memory[a] = v;
      stable_final_mem[a] = v;
    }
    for (int i = 0; i < 4; ++i) {
      uint64_t a = static_cast<uint64_t>(roll(16));
      int64_t v = roll(5);
      p.stable.cache.write_sp(a, 1, v);
      stable_final_mem[a] = v;
    }
    std::array<int64_t, kNumRegisters> stable_regs{};
    for (int r = 0; r < 4; ++r) {
      stable_regs[r] = roll(5);
      p.stable.regs.write_sp(r, stable_regs[r]);
    }

    std::map<uint64_t, int64_t> predictions;
    for (int i = 0; i < 5; ++i) {
      uint64_t a = static_cast<uint64_t>(roll(16));
      int64_t v = roll(5);
      p.child.cache.write_pre(a, v);
      predictions[a] = v;
    }
    std::array<int64_t, 4> reg_pred{};
    std::array<bool, 4> reg_consumed{};
    for (int r = 0; r < 4; ++r) {
      reg_pred[r] = roll(5);
      p.child.regs.write_pre(r, reg_pred[r]);
    }
    p.child.regs.seal_precomputation();
    for (int r = 0; r < 4; ++r) {
      reg_consumed[r] = roll(2) == 0;
      if (reg_consumed[r]) (void)p.child.regs.read_sp(r);
    }

    auto report = verify_sub_thread(p.stable, p.child, p.memory);

    // Oracle: recompute the expected mismatch sets from the raw maps.
    std::vector<MemoryMismatch> want_mem;
    for (const auto& [a, v] : predictions) {
      int64_t actual = stable_final_mem.count(a) ? stable_final_mem[a] : 0;
      if (v != actual) want_mem.push_back({a, v, actual});
    }
    std::vector<RegisterMismatch> want_reg;
    for (int r = 0; r < 4; ++r) {
      if (reg_consumed[r] && reg_pred[r] != stable_regs[r]) {
        want_reg.push_back({r, reg_pred[r], stable_regs[r]});
      }
    }
    CHECK(report.memory == want_mem);
    CHECK(report.registers == want_reg);
    CHECK(report.passed() == (want_mem.empty() && want_reg.empty()));
  }
}
