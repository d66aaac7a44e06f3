#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "prophet/isa.hpp"

namespace prophet {

// Register line states. V = valid, L = loaded before any speculative write
// (the first speculative access was a read), M = modified speculatively.
//   Invalid  (0,X,X)
//   Init     (1,0,0)  spawn snapshot / p-slice result, untouched by the body
//   Validate (1,1,0)  consumed before any write; needs validation at commit
//   MCommit  (1,0,1)  written before any read; commits without validation
//   VaandMC  (1,1,1)  consumed first, then overwritten; both apply
enum class RegState { Invalid, Init, Validate, MCommit, VaandMC };

struct RegBits {
  bool v = false;
  bool l = false;
  bool m = false;
  bool operator==(const RegBits&) const = default;
};

const char* reg_state_name(RegState s);
RegBits encode_reg_state(RegState s);
RegState decode_reg_state(RegBits bits);  // v=0 decodes Invalid for any l/m

// Per-thread register file with speculation state bits. Values live here;
// pre-computation accesses pass through without touching the bits, the
// speculation phase drives the L/M state machine.
class RegCache {
 public:
  RegCache();

  // Spawn and restart both start from a parent snapshot: every register
  // becomes Init holding the snapshot value, first-read records cleared.
  void reset(const std::array<int64_t, kNumRegisters>& snapshot);

  // Pre-computation accesses (p-slice): direct, no state changes.
  int64_t read_pre(int r) const;
  void write_pre(int r, int64_t v);

  // Executed at pslice_exit: current working values become the sealed
  // Init set the body starts from.
  void seal_precomputation();

  // Speculation accesses (body / stable execution).
  int64_t read_sp(int r);
  void write_sp(int r, int64_t v);

  RegState state(int r) const;
  int64_t value(int r) const;
  const std::array<int64_t, kNumRegisters>& values() const { return values_; }

  // Value consumed at the first speculative read, recorded for validation.
  std::optional<int64_t> first_read_value(int r) const;

  // All registers with L=1, with their first-read values, ascending index.
  std::vector<std::pair<int, int64_t>> registers_needing_validation() const;

  // Commit-time synchronization: Init registers take the parent's final
  // values, Validate registers are refreshed to them (verification already
  // proved them equal), modified registers keep the local values.
  void synchronize_from_parent(
      const std::array<int64_t, kNumRegisters>& parent_final);

 private:
  std::array<int64_t, kNumRegisters> values_{};
  std::array<RegState, kNumRegisters> states_{};
  std::array<int64_t, kNumRegisters> first_read_{};
  std::array<bool, kNumRegisters> has_first_read_{};
};

}  // namespace prophet
