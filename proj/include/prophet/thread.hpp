#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "prophet/isa.hpp"
#include "prophet/mem_cache.hpp"
#include "prophet/reg_cache.hpp"

namespace prophet {

// Thread lifecycle states.
//   Idle            no thread on the processing element
//   Initialization  allocated; start address, registers and version copied
//   PreCompute      executing its p-slice to predict live-ins
//   SpExecution     speculative body execution
//   StableExecution non-speculative execution (the one stable thread)
//   Wait            finished speculatively; blocked until verified + token
//   SubThreadVerify stable side: checking its successor's pre-computation
//   Verification    successor side: paused while being checked
//   Commit          stable side: publishing state, handing the token over
//   Squash          being discarded together with everything more speculative
//   Restart         violation victim about to re-run from its spawn point
enum class ThreadState {
  Idle,
  Initialization,
  PreCompute,
  SpExecution,
  StableExecution,
  Wait,
  SubThreadVerify,
  Verification,
  Commit,
  Squash,
  Restart,
};

const char* thread_state_name(ThreadState s);

enum class ThreadEvent {
  Allocated,
  InitDone,
  PsliceExitReached,
  ThreadEndSpeculative,
  StableTokenReceived,
  VerifyMessageReceived,
  OwnCqipExecuted,
  VerificationPassedOrNoChild,
  VerificationFailed,
  CommitDone,
  SquashMessage,
  SquashDone,
  ViolationMessage,
  ReInitialized,
};

const char* thread_event_name(ThreadEvent e);

class SimInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The explicit transition relation. Undefined (state, event) pairs throw
// SimInvariantError: they indicate an engine bug, never a program input
// problem.
ThreadState transition(ThreadState state, ThreadEvent event);

struct ThreadContext {
  int tid = -1;
  uint64_t version = 1;       // bumped by one on each successful spawn
  std::string start_label;    // empty for the main thread
  int start_pc = 0;           // first body instruction (past the cqip marker)
  int pc = 0;
  ThreadState state = ThreadState::Idle;
  int pe = -1;
  bool stable = false;
  bool sealed = false;        // p-slice finished (main thread: born sealed)
  int parent_tid = -1;        // -1: none, or parent already committed
  int isl_succ_tid = -1;      // -1: most speculative
  int stall = 0;              // cycles left on the current multi-cycle action
  uint64_t created_cycle = 0;
  bool ever_failed = false;   // squashed or restarted at least once

  RegCache regs;
  std::array<int64_t, kNumRegisters> spawn_snapshot{};
  L1MemCache cache;

  bool live() const {
    return state != ThreadState::Idle && state != ThreadState::Squash;
  }
};

// Owns every thread context (dead ones included, for statistics), the
// immediate-successor list and the PE table. One instance per speculative
// run.
class ThreadEngine {
 public:
  explicit ThreadEngine(int num_pes);

  // The main thread: stable from birth, version 1, on PE 0, no p-slice.
  ThreadContext& create_main();

  // Allocates a child on the first idle PE. The child takes the parent's
  // version and register snapshot; the parent's version increments. The
  // child becomes the parent's immediate successor and inherits its former
  // successors. Returns nullptr (and changes nothing) when no PE is idle.
  ThreadContext* spawn_thread(ThreadContext& parent, const std::string& label,
                              int start_pc, uint64_t cycle);

  // Discards `victim` (when inclusive) and every thread more speculative
  // than it. Squashed threads lose their cache lines and PEs. Returns the
  // squashed tids in ISL order.
  std::vector<int> squash_from(ThreadContext& victim, bool inclusive);

  // Violation recovery: the victim re-runs from its spawn point with the
  // original snapshot. Caller squashes successors first. The thread is left
  // in Restart; ReInitialized moves it to PreCompute.
  void restart(ThreadContext& victim);

  // Distance from the stable head along the ISL (head = 0).
  int speculative_level(int tid) const;

  std::vector<int> isl_order() const;  // head first
  // ISL predecessors of tid, nearest first.
  std::vector<int> predecessors_of(int tid) const;
  // Visibility set for pre-computation reads: the parent, then the parent's
  // own predecessors. Empty when the parent already committed.
  std::vector<int> pre_visibility_of(int tid) const;

  // Commit handoff: the head leaves the ISL, its successor (if any) becomes
  // the stable head. Frees the PE. Returns the new head tid or -1.
  int retire_head();

  ThreadContext& thread(int tid) { return *threads_.at(tid); }
  const ThreadContext& thread(int tid) const { return *threads_.at(tid); }
  bool has_thread(int tid) const {
    return tid >= 0 && tid < static_cast<int>(threads_.size());
  }
  int head_tid() const { return head_tid_; }
  int num_pes() const { return static_cast<int>(pe_to_tid_.size()); }
  int pe_thread(int pe) const { return pe_to_tid_.at(pe); }
  int live_count() const;
  int total_threads() const { return static_cast<int>(threads_.size()); }

  // Exactly one live stable thread, and it is the ISL head.
  void check_invariants() const;

 private:
  std::vector<std::unique_ptr<ThreadContext>> threads_;
  std::vector<int> pe_to_tid_;
  int head_tid_ = -1;
};

}  // namespace prophet
