#include "prophet/mem_cache.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace prophet {

const char* mem_state_name(MemLineState s) {
  switch (s) {
    case MemLineState::Invalid:
      return "Invalid";
    case MemLineState::PreSh:
      return "PreSh";
    case MemLineState::PreEx:
      return "PreEx";
    case MemLineState::PreExO:
      return "PreExO";
    case MemLineState::SpSh:
      return "SpSh";
    case MemLineState::SpShM:
      return "SpShM";
    case MemLineState::SpShO:
      return "SpShO";
    case MemLineState::SpEx:
      return "SpEx";
    case MemLineState::SpExO:
      return "SpExO";
  }
  return "?";
}

MemLineBits encode_mem_state(MemLineState s, uint64_t tv) {
  switch (s) {
    case MemLineState::Invalid:
      return {false, false, false, 0, false};
    case MemLineState::PreSh:
      return {true, true, false, 0, true};
    case MemLineState::PreEx:
      return {true, false, true, 0, false};
    case MemLineState::PreExO:
      return {true, false, true, 0, true};
    case MemLineState::SpSh:
      return {true, true, false, tv, false};
    case MemLineState::SpShM:
      return {true, true, true, tv, false};
    case MemLineState::SpShO:
      return {true, true, true, tv, true};
    case MemLineState::SpEx:
      return {true, false, true, tv, false};
    case MemLineState::SpExO:
      return {true, false, true, tv, true};
  }
  return {};
}

MemLineState decode_mem_state(const MemLineBits& bits) {
  if (!bits.v) return MemLineState::Invalid;
  if (bits.ver == 0) {
    if (bits.rl && !bits.m) return MemLineState::PreSh;  // O is don't-care
    if (!bits.rl && bits.m)
      return bits.o ? MemLineState::PreExO : MemLineState::PreEx;
  } else {
    if (bits.rl && !bits.m && !bits.o) return MemLineState::SpSh;
    if (bits.rl && bits.m)
      return bits.o ? MemLineState::SpShO : MemLineState::SpShM;
    if (!bits.rl && bits.m)
      return bits.o ? MemLineState::SpExO : MemLineState::SpEx;
  }
  throw std::invalid_argument("unencodable cache line bits (rl=" +
                              std::to_string(bits.rl) + " m=" +
                              std::to_string(bits.m) + " ver=" +
                              std::to_string(bits.ver) + " o=" +
                              std::to_string(bits.o) + ")");
}

std::optional<int64_t> L1MemCache::read_pre_local(uint64_t addr) const {
  auto it = lines_.find({addr, 0});
  if (it == lines_.end()) return std::nullopt;
  return it->second.data;
}

void L1MemCache::install_pre_loaded(uint64_t addr, int64_t value) {
  assert(!lines_.count(std::pair<uint64_t, uint64_t>{addr, 0}));
  lines_[{addr, 0}] = MemCacheLine{addr, 0, true, false, true, value};
}

void L1MemCache::write_pre(uint64_t addr, int64_t value) {
  // Create or take over the version-0 slot; a prior PreSh load is absorbed.
  lines_[{addr, 0}] = MemCacheLine{addr, 0, false, true, false, value};
}

const MemCacheLine* L1MemCache::newest_version(uint64_t addr) const {
  // The current line is the unique O=0 entry for this address.
  auto begin = lines_.lower_bound({addr, 0});
  auto end = lines_.upper_bound({addr, UINT64_MAX});
  const MemCacheLine* found = nullptr;
  for (auto it = begin; it != end; ++it) {
    if (it->second.o) continue;
    assert(found == nullptr);
    found = &it->second;
  }
  return found;
}

std::optional<int64_t> L1MemCache::read_sp_local(uint64_t addr) const {
  const MemCacheLine* cur = newest_version(addr);
  if (!cur) return std::nullopt;
  return cur->data;
}

void L1MemCache::install_sp_loaded(uint64_t addr, uint64_t tv, int64_t value) {
  assert(tv > 0);
  assert(newest_version(addr) == nullptr);
  lines_[{addr, tv}] = MemCacheLine{addr, tv, true, false, false, value};
}

const MemCacheLine& L1MemCache::write_sp(uint64_t addr, uint64_t tv,
                                         int64_t value) {
  assert(tv > 0);
  const MemCacheLine* cur = newest_version(addr);
  if (cur && cur->ver == tv) {
    // same spawn epoch: update in place; a loaded line becomes SpShM
    auto& line = lines_.at({addr, tv});
    line.data = value;
    line.m = true;
    return line;
  }
  bool remote = false;
  if (cur) {
    assert(cur->ver < tv);
    remote = cur->rl;
    auto key = std::pair<uint64_t, uint64_t>{addr, cur->ver};
    if (cur->m) {
      // dirty version history: PreEx->PreExO, SpEx->SpExO, SpShM->SpShO
      lines_.at(key).o = true;
    } else {
      // a clean remote copy has no old form; superseded means dropped
      lines_.erase(key);
    }
  }
  auto& line = lines_[{addr, tv}];
  line = MemCacheLine{addr, tv, remote, true, false, value};
  return line;
}

std::optional<int64_t> L1MemCache::serve_pre_read_parent(
    uint64_t addr, uint64_t version_limit) const {
  auto begin = lines_.lower_bound({addr, 0});
  auto end = lines_.upper_bound({addr, version_limit});
  if (begin == end) return std::nullopt;
  --end;  // highest version <= limit, old lines included
  return end->second.data;
}

std::optional<int64_t> L1MemCache::serve_pre_read(uint64_t addr) const {
  auto begin = lines_.lower_bound({addr, 0});
  auto end = lines_.upper_bound({addr, UINT64_MAX});
  if (begin == end) return std::nullopt;
  --end;
  return end->second.data;
}

std::optional<int64_t> L1MemCache::serve_sp_read(uint64_t addr) const {
  const MemCacheLine* cur = newest_version(addr);
  if (!cur) return std::nullopt;
  return cur->data;
}

bool L1MemCache::has_speculative_load(uint64_t addr) const {
  auto begin = lines_.lower_bound({addr, 1});
  auto end = lines_.upper_bound({addr, UINT64_MAX});
  for (auto it = begin; it != end; ++it) {
    if (it->second.rl) return true;
  }
  return false;
}

std::vector<std::pair<uint64_t, int64_t>> L1MemCache::lines_needing_verification()
    const {
  std::vector<std::pair<uint64_t, int64_t>> out;
  for (const auto& [key, line] : lines_) {
    if (line.ver == 0 && line.m) out.emplace_back(line.tag, line.data);
  }
  return out;
}

std::vector<std::pair<uint64_t, int64_t>> L1MemCache::dirty_newest_lines() const {
  std::vector<std::pair<uint64_t, int64_t>> out;
  for (const auto& [key, line] : lines_) {
    if (!line.o && line.m) out.emplace_back(line.tag, line.data);
  }
  return out;
}

int L1MemCache::commit_lines(std::vector<int64_t>& memory) {
  auto dirty = dirty_newest_lines();
  for (const auto& [addr, value] : dirty) {
    if (addr >= memory.size())
      throw std::out_of_range("commit to address " + std::to_string(addr) +
                              " outside memory");
    memory[addr] = value;
  }
  lines_.clear();
  return static_cast<int>(dirty.size());
}

std::optional<MemCacheLine> L1MemCache::line(uint64_t addr, uint64_t ver) const {
  auto it = lines_.find({addr, ver});
  if (it == lines_.end()) return std::nullopt;
  return it->second;
}

std::vector<MemCacheLine> L1MemCache::dump() const {
  std::vector<MemCacheLine> out;
  out.reserve(lines_.size());
  for (const auto& [key, line] : lines_) out.push_back(line);
  return out;
}

}  // namespace prophet
