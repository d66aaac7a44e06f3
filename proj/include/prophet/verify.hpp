#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prophet/thread.hpp"

namespace prophet {

struct MemoryMismatch {
  uint64_t address;
  int64_t predicted;
  int64_t actual;
  bool operator==(const MemoryMismatch&) const = default;
};

struct RegisterMismatch {
  int reg;
  int64_t predicted;
  int64_t actual;
  bool operator==(const RegisterMismatch&) const = default;
};

struct VerificationReport {
  std::vector<MemoryMismatch> memory;
  std::vector<RegisterMismatch> registers;
  int words_compared = 0;
  bool passed() const { return memory.empty() && registers.empty(); }
};

// "memory[100]: predicted 5, stable 7; r3: predicted 1, stable 2"
std::string describe(const VerificationReport& report);

// The stable thread's final value for an address: its current cache line
// when one exists, main memory otherwise (0 past the end, matching the
// speculative read semantics).
int64_t stable_view(const L1MemCache& stable_cache,
                    const std::vector<int64_t>& memory, uint64_t addr);

// Checks the successor's pre-computation against the stable thread's final
// state: every value the p-slice stored (version-0 dirty lines) and every
// register the body consumed before writing (L=1) must match what the
// stable thread actually produced. Speculatively consumed memory needs no
// check here; the violation test on stores covers it.
VerificationReport verify_sub_thread(const ThreadContext& stable,
                                     const ThreadContext& child,
                                     const std::vector<int64_t>& memory);

}  // namespace prophet
