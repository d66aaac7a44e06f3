#include "prophet/reg_cache.hpp"

#include <cassert>
#include <stdexcept>

namespace prophet {

namespace {

void check_index(int r) {
  if (r < 0 || r >= kNumRegisters)
    throw std::out_of_range("register index " + std::to_string(r));
}

}  // namespace

const char* reg_state_name(RegState s) {
  switch (s) {
    case RegState::Invalid:
      return "Invalid";
    case RegState::Init:
      return "Init";
    case RegState::Validate:
      return "Validate";
    case RegState::MCommit:
      return "MCommit";
    case RegState::VaandMC:
      return "VaandMC";
  }
  return "?";
}

RegBits encode_reg_state(RegState s) {
  switch (s) {
    case RegState::Invalid:
      return {false, false, false};
    case RegState::Init:
      return {true, false, false};
    case RegState::Validate:
      return {true, true, false};
    case RegState::MCommit:
      return {true, false, true};
    case RegState::VaandMC:
      return {true, true, true};
  }
  return {};
}

RegState decode_reg_state(RegBits bits) {
  if (!bits.v) return RegState::Invalid;
  if (bits.l && bits.m) return RegState::VaandMC;
  if (bits.l) return RegState::Validate;
  if (bits.m) return RegState::MCommit;
  return RegState::Init;
}

RegCache::RegCache() {
  states_.fill(RegState::Invalid);
  has_first_read_.fill(false);
}

void RegCache::reset(const std::array<int64_t, kNumRegisters>& snapshot) {
  values_ = snapshot;
  states_.fill(RegState::Init);
  has_first_read_.fill(false);
}

int64_t RegCache::read_pre(int r) const {
  check_index(r);
  return values_[r];
}

void RegCache::write_pre(int r, int64_t v) {
  check_index(r);
  values_[r] = v;
}

void RegCache::seal_precomputation() {
  states_.fill(RegState::Init);
  has_first_read_.fill(false);
}

int64_t RegCache::read_sp(int r) {
  check_index(r);
  assert(states_[r] != RegState::Invalid);
  if (states_[r] == RegState::Init) {
    states_[r] = RegState::Validate;
    first_read_[r] = values_[r];
    has_first_read_[r] = true;
  }
  return values_[r];
}

void RegCache::write_sp(int r, int64_t v) {
  check_index(r);
  assert(states_[r] != RegState::Invalid);
  if (states_[r] == RegState::Init)
    states_[r] = RegState::MCommit;
  else if (states_[r] == RegState::Validate)
    states_[r] = RegState::VaandMC;
  values_[r] = v;
}

RegState RegCache::state(int r) const {
  check_index(r);
  return states_[r];
}

int64_t RegCache::value(int r) const {
  check_index(r);
  return values_[r];
}

std::optional<int64_t> RegCache::first_read_value(int r) const {
  check_index(r);
  if (!has_first_read_[r]) return std::nullopt;
  return first_read_[r];
}

std::vector<std::pair<int, int64_t>> RegCache::registers_needing_validation()
    const {
  std::vector<std::pair<int, int64_t>> out;
  for (int r = 0; r < kNumRegisters; ++r) {
    if (states_[r] == RegState::Validate || states_[r] == RegState::VaandMC) {
      assert(has_first_read_[r]);
      out.emplace_back(r, first_read_[r]);
    }
  }
  return out;
}

void RegCache::synchronize_from_parent(
    const std::array<int64_t, kNumRegisters>& parent_final) {
  for (int r = 0; r < kNumRegisters; ++r) {
    if (states_[r] == RegState::Init || states_[r] == RegState::Validate)
      values_[r] = parent_final[r];
  }
}

}  // namespace prophet
