#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "prophet/mem_cache.hpp"

namespace prophet {

// Snooping-bus message kinds. Local kinds record cache activity for traces;
// only the remote kinds (RPrR, RSpR) and VioTest involve other processing
// elements.
//   LPrR(address)                         pre-computation read hit
//   RPrR(level, address, thread_version)  pre-computation read served remotely
//   LPrW(address, value)                  pre-computation write
//   LSpR(address)                         speculation read hit
//   LSpW(address, value)                  speculation write
//   RSpR(level, address)                  speculation read served remotely
//   VioTest(level, address)               broadcast after every LSpW
enum class BusMsgKind { LPrR, RPrR, LPrW, LSpR, LSpW, RSpR, VioTest };

const char* bus_msg_kind_name(BusMsgKind kind);
bool is_local_kind(BusMsgKind kind);

struct BusMessage {
  BusMsgKind kind = BusMsgKind::LPrR;
  int sender_tid = -1;
  // Sender's distance from the stable thread; carried by RPrR, RSpR and
  // VioTest.
  int speculative_level = -1;
  uint64_t address = 0;
  int64_t value = 0;           // LPrW, LSpW
  uint64_t thread_version = 0; // RPrR: the reader's version bound
};

// Parameter-shape check per message kind; throws std::invalid_argument.
void validate_message(const BusMessage& msg);

// Receiver side of VioTest: true when the cache holds data consumed from a
// predecessor during speculation (an RL=1 line with version > 0) for this
// address. Callers only probe receivers strictly more speculative than the
// sender.
bool check_violation(const L1MemCache& cache, const BusMessage& viotest);

// Read-service arbitration. Caches are ordered nearest-first from the
// requester's point of view; the first holder answers. Returns (index into
// `caches`, value).

// Pre-computation read: caches[0] is the parent and answers under the
// reader's version limit (its version history included); deeper entries are
// the parent's own predecessors and answer with their newest version.
std::optional<std::pair<int, int64_t>> serve_remote_pre_read(
    const std::vector<const L1MemCache*>& caches, uint64_t addr,
    uint64_t version_limit);

// Speculation read: every predecessor answers from its current (O=0) line.
std::optional<std::pair<int, int64_t>> serve_remote_sp_read(
    const std::vector<const L1MemCache*>& caches, uint64_t addr);

// VioTest delivery: receivers ordered least-speculative-first; returns the
// index of the first violator. Squashing everything behind it makes one
// restart per broadcast sufficient.
std::optional<int> first_violator(
    const std::vector<const L1MemCache*>& receivers, uint64_t addr);

}  // namespace prophet
