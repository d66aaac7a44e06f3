#include "prophet/verify.hpp"

#include <sstream>

namespace prophet {

std::string describe(const VerificationReport& report) {
  if (report.passed()) return "ok";
  std::ostringstream os;
  bool first = true;
  for (const auto& m : report.memory) {
    if (!first) os << "; ";
    os << "memory[" << m.address << "]: predicted " << m.predicted
       << ", stable " << m.actual;
    first = false;
  }
  for (const auto& r : report.registers) {
    if (!first) os << "; ";
    os << "r" << r.reg << ": predicted " << r.predicted << ", stable "
       << r.actual;
    first = false;
  }
  return os.str();
}

int64_t stable_view(const L1MemCache& stable_cache,
                    const std::vector<int64_t>& memory, uint64_t addr) {
  if (const MemCacheLine* line = stable_cache.newest_version(addr)) {
    return line->data;
  }
  if (addr < memory.size()) return memory[addr];
  return 0;
}

VerificationReport verify_sub_thread(const ThreadContext& stable,
                                     const ThreadContext& child,
                                     const std::vector<int64_t>& memory) {
  VerificationReport report;
  for (const auto& [addr, predicted] :
       child.cache.lines_needing_verification()) {
    int64_t actual = stable_view(stable.cache, memory, addr);
    ++report.words_compared;
    if (predicted != actual) report.memory.push_back({addr, predicted, actual});
  }
  for (const auto& [reg, predicted] :
       child.regs.registers_needing_validation()) {
    int64_t actual = stable.regs.value(reg);
    ++report.words_compared;
    if (predicted != actual) report.registers.push_back({reg, predicted, actual});
  }
  return report;
}

}  // namespace prophet
