#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace prophet {

// Cache line states over the bit tuple (V, RL, M, Ver, O):
//   Invalid (0,X,X,X,X)
//   PreSh   (1,1,0,0,1)   loaded during pre-computation; marked old so the
//                         speculation phase re-fetches instead of consuming it
//   PreEx   (1,0,1,0,0)   written during pre-computation (a predicted live-in)
//   PreExO  (1,0,1,0,1)   PreEx superseded by a speculative write
//   SpSh    (1,1,0,TV,0)  loaded from a predecessor or memory in speculation
//   SpShM   (1,1,1,TV,0)  loaded, then modified
//   SpShO   (1,1,1,TV,1)  SpShM superseded by a newer version
//   SpEx    (1,0,1,TV,0)  locally generated in speculation
//   SpExO   (1,0,1,TV,1)  SpEx superseded by a newer version
// Version 0 is reserved for pre-computation data; speculative lines carry the
// owning thread's version at access time (TV >= 1).
enum class MemLineState {
  Invalid,
  PreSh,
  PreEx,
  PreExO,
  SpSh,
  SpShM,
  SpShO,
  SpEx,
  SpExO,
};

const char* mem_state_name(MemLineState s);

struct MemLineBits {
  bool v = false;
  bool rl = false;
  bool m = false;
  uint64_t ver = 0;
  bool o = false;
  bool operator==(const MemLineBits&) const = default;
};

// Canonical bit pattern for a state; `tv` fills Ver for the Sp* states.
MemLineBits encode_mem_state(MemLineState s, uint64_t tv);

// Inverse of the table above. O is accepted as don't-care for PreSh.
// Throws std::invalid_argument for patterns outside the table.
MemLineState decode_mem_state(const MemLineBits& bits);

struct MemCacheLine {
  uint64_t tag = 0;  // word address
  uint64_t ver = 0;
  bool rl = false;
  bool m = false;
  bool o = false;
  int64_t data = 0;

  MemLineState state() const {
    return decode_mem_state({true, rl, m, ver, o});
  }
};

// One thread's L1: a multi-version store keyed by (address, version). A
// thread holds several versions of the same word: version 0 from its
// p-slice plus one version per spawn epoch it wrote in. Old (O=1) lines are
// version history kept to serve sub-thread pre-computation reads; at most
// one line per address is current (O=0).
class L1MemCache {
 public:
  // -- pre-computation phase ------------------------------------------------
  std::optional<int64_t> read_pre_local(uint64_t addr) const;
  void install_pre_loaded(uint64_t addr, int64_t value);  // PreSh
  void write_pre(uint64_t addr, int64_t value);           // PreEx create/update

  // -- speculation phase ----------------------------------------------------
  std::optional<int64_t> read_sp_local(uint64_t addr) const;
  void install_sp_loaded(uint64_t addr, uint64_t tv, int64_t value);  // SpSh
  // Write with versioning: same-version current line is updated in place;
  // otherwise the current line ages (dirty) or drops (clean) and a new line
  // at `tv` is installed. Returns the resulting line.
  const MemCacheLine& write_sp(uint64_t addr, uint64_t tv, int64_t value);

  // -- remote service -------------------------------------------------------
  // Parent side of a pre-computation read: newest version <= limit, version
  // history included.
  std::optional<int64_t> serve_pre_read_parent(uint64_t addr,
                                               uint64_t version_limit) const;
  // Deeper predecessor side of a pre-computation read: newest version held.
  std::optional<int64_t> serve_pre_read(uint64_t addr) const;
  // Predecessor side of a speculative read: current (O=0) line only.
  std::optional<int64_t> serve_sp_read(uint64_t addr) const;

  // Violation probe: holds data consumed from a predecessor in speculation.
  bool has_speculative_load(uint64_t addr) const;

  // -- verification / commit ------------------------------------------------
  // Final pre-computation values: all version-0 modified lines (PreEx and
  // PreExO), ascending address.
  std::vector<std::pair<uint64_t, int64_t>> lines_needing_verification() const;
  const MemCacheLine* newest_version(uint64_t addr) const;  // current line
  // Newest modified line per address, ascending address.
  std::vector<std::pair<uint64_t, int64_t>> dirty_newest_lines() const;
  // Writes dirty_newest_lines into memory and empties the cache. Returns the
  // word count. Throws std::out_of_range if a dirty address does not fit.
  int commit_lines(std::vector<int64_t>& memory);

  void invalidate_all() { lines_.clear(); }

  size_t size() const { return lines_.size(); }
  std::optional<MemCacheLine> line(uint64_t addr, uint64_t ver) const;
  std::vector<MemCacheLine> dump() const;  // (tag, ver) ascending

 private:
  std::map<std::pair<uint64_t, uint64_t>, MemCacheLine> lines_;
};

}  // namespace prophet
