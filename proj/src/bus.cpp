#include "prophet/bus.hpp"

#include <stdexcept>
#include <string>

namespace prophet {

const char* bus_msg_kind_name(BusMsgKind kind) {
  switch (kind) {
    case BusMsgKind::LPrR:
      return "LPrR";
    case BusMsgKind::RPrR:
      return "RPrR";
    case BusMsgKind::LPrW:
      return "LPrW";
    case BusMsgKind::LSpR:
      return "LSpR";
    case BusMsgKind::LSpW:
      return "LSpW";
    case BusMsgKind::RSpR:
      return "RSpR";
    case BusMsgKind::VioTest:
      return "VioTest";
  }
  return "?";
}

bool is_local_kind(BusMsgKind kind) {
  switch (kind) {
    case BusMsgKind::LPrR:
    case BusMsgKind::LPrW:
    case BusMsgKind::LSpR:
    case BusMsgKind::LSpW:
      return true;
    default:
      return false;
  }
}

void validate_message(const BusMessage& msg) {
  auto fail = [&](const char* what) {
    throw std::invalid_argument(std::string(bus_msg_kind_name(msg.kind)) +
                                ": " + what);
  };
  if (msg.sender_tid < 0) fail("missing sender");
  switch (msg.kind) {
    case BusMsgKind::RPrR:
      if (msg.speculative_level < 0) fail("missing speculative level");
      if (msg.thread_version < 1) fail("thread version must be positive");
      break;
    case BusMsgKind::RSpR:
    case BusMsgKind::VioTest:
      if (msg.speculative_level < 0) fail("missing speculative level");
      if (msg.thread_version != 0) fail("unexpected thread version");
      break;
    case BusMsgKind::LPrR:
    case BusMsgKind::LSpR:
      if (msg.value != 0) fail("unexpected value");
      [[fallthrough]];
    case BusMsgKind::LPrW:
    case BusMsgKind::LSpW:
      if (msg.speculative_level != -1) fail("local message carries no level");
      if (msg.thread_version != 0) fail("unexpected thread version");
      break;
  }
}

bool check_violation(const L1MemCache& cache, const BusMessage& viotest) {
  if (viotest.kind != BusMsgKind::VioTest)
    throw std::invalid_argument("check_violation expects a VioTest message");
  return cache.has_speculative_load(viotest.address);
}

std::optional<std::pair<int, int64_t>> serve_remote_pre_read(
    const std::vector<const L1MemCache*>& caches, uint64_t addr,
    uint64_t version_limit) {
  for (size_t i = 0; i < caches.size(); ++i) {
    std::optional<int64_t> got =
        i == 0 ? caches[i]->serve_pre_read_parent(addr, version_limit)
               : caches[i]->serve_pre_read(addr);
    if (got) return std::pair<int, int64_t>{static_cast<int>(i), *got};
  }
  return std::nullopt;
}

std::optional<std::pair<int, int64_t>> serve_remote_sp_read(
    const std::vector<const L1MemCache*>& caches, uint64_t addr) {
  for (size_t i = 0; i < caches.size(); ++i) {
    if (auto got = caches[i]->serve_sp_read(addr))
      return std::pair<int, int64_t>{static_cast<int>(i), *got};
  }
  return std::nullopt;
}

std::optional<int> first_violator(
    const std::vector<const L1MemCache*>& receivers, uint64_t addr) {
  for (size_t i = 0; i < receivers.size(); ++i) {
    if (receivers[i]->has_speculative_load(addr)) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace prophet
