#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prophet/sim.hpp"

namespace prophet {

// One result line of a run: everything needed to print the summary table or
// its CSV form.
struct ReportRow {
  std::string program;
  int pes = 0;
  uint64_t spawned = 0;
  uint64_t failed = 0;
  uint64_t seq_cycles = 0;
  uint64_t spmt_cycles = 0;
};

ReportRow make_row(std::string program, int pes, const RunResult& result);

// (spawned - failed) / spawned as a percentage with one decimal, or "N/A"
// when nothing was spawned.
std::string pct_successful(const ReportRow& row);

// seq_cycles / spmt_cycles with four decimals.
std::string speedup(const ReportRow& row);

// Aligned text table with the header
//   program  PEs  spawned  failed  pct_successful  seq_cycles  spmt_cycles  speedup
std::string format_table(const std::vector<ReportRow>& rows);

// CSV, one header line then one line per row:
//   program,pes,spawned,failed,pct_successful,seq_cycles,spmt_cycles,speedup
std::string format_csv(const std::vector<ReportRow>& rows);

}  // namespace prophet
