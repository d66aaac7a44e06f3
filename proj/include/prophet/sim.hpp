#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "prophet/isa.hpp"

namespace prophet {

struct MachineConfig {
  int num_pes = 4;
  size_t memory_words = 65536;
  int spawn_cost = 1;             // cycles the spawner is busy
  int squash_cost = 1;            // cycles a squash instruction takes
  int mem_latency = 1;            // main memory access, cycles
  int verify_cost_per_word = 1;   // per word compared or committed
  int bus_latency = 0;            // extra cycles on a remote-served read
  uint64_t max_cycles = 10'000'000;
};

struct RunStats {
  uint64_t cycles = 0;
  int spawned_threads = 0;        // successful spawns; the main thread not counted
  int failed_threads = 0;         // spawned threads squashed or restarted at least once
  int refused_spawns = 0;         // spawn requests with every PE busy
  int violations = 0;             // read-after-write violations detected
  int verifications = 0;
  int failed_verifications = 0;
  int commits = 0;                // sub-thread commits (token handoffs)
  uint64_t retired_instructions = 0;
};

struct SeqResult {
  std::vector<int64_t> memory;
  std::array<int64_t, kNumRegisters> registers{};
  uint64_t cycles = 0;
  uint64_t instructions = 0;
};

struct RunResult {
  std::vector<int64_t> memory;
  std::array<int64_t, kNumRegisters> registers{};
  RunStats stats;
  uint64_t seq_cycles = 0;
  std::vector<std::string> trace;  // one line per event; empty unless requested
};

// Speculative and sequential final states differ: a protocol bug.
class EquivalenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The program did not halt within max_cycles.
class RuntimeLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reference machine: one PE, program order, speculation instructions are
// inert markers and p-slices are skipped.
SeqResult run_sequential(const Program& prog, const MachineConfig& cfg);

// Full chip-multiprocessor run. Always runs the sequential machine first and
// throws EquivalenceError unless the final memory image and register file
// match it bit for bit.
RunResult run_speculative(const Program& prog, const MachineConfig& cfg,
                          bool with_trace = false);

}  // namespace prophet
