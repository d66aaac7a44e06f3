#include "prophet/report.hpp"

#include <algorithm>
#include <cstdio>

namespace prophet {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

ReportRow make_row(std::string program, int pes, const RunResult& result) {
  ReportRow row;
  row.program = std::move(program);
  row.pes = pes;
  row.spawned = result.stats.spawned_threads;
  row.failed = result.stats.failed_threads;
  row.seq_cycles = result.seq_cycles;
  row.spmt_cycles = result.stats.cycles;
  return row;
}

std::string pct_successful(const ReportRow& row) {
  if (row.spawned == 0) return "N/A";
  double pct = 100.0 * static_cast<double>(row.spawned - row.failed) /
               static_cast<double>(row.spawned);
  return fixed(pct, 1);
}

std::string speedup(const ReportRow& row) {
  return fixed(static_cast<double>(row.seq_cycles) /
                   static_cast<double>(row.spmt_cycles),
               4);
}

namespace {

const char* const kHeaders[] = {"program",        "PEs",
                                "spawned",        "failed",
                                "pct_successful", "seq_cycles",
                                "spmt_cycles",    "speedup"};

std::vector<std::string> cells(const ReportRow& row) {
  return {row.program,
          std::to_string(row.pes),
          std::to_string(row.spawned),
          std::to_string(row.failed),
          pct_successful(row),
          std::to_string(row.seq_cycles),
          std::to_string(row.spmt_cycles),
          speedup(row)};
}

}  // namespace

std::string format_table(const std::vector<ReportRow>& rows) {
  constexpr int kCols = 8;
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(kHeaders, kHeaders + kCols);
  for (const auto& row : rows) grid.push_back(cells(row));

  size_t width[kCols] = {};
  for (const auto& line : grid)
    for (int c = 0; c < kCols; ++c)
      width[c] = std::max(width[c], line[c].size());

  std::string out;
  for (const auto& line : grid) {
    for (int c = 0; c < kCols; ++c) {
      if (c) out += "  ";
      size_t pad = width[c] - line[c].size();
      if (c == 0) {  // program names left-aligned, numbers right-aligned
        out += line[c];
        if (c < kCols - 1) out.append(pad, ' ');
      } else {
        out.append(pad, ' ');
        out += line[c];
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "program,pes,spawned,failed,pct_successful,seq_cycles,spmt_cycles,"
      "speedup\n";
  for (const auto& row : rows) {
    auto line = cells(row);
    for (size_t c = 0; c < line.size(); ++c) {
      if (c) out += ',';
      out += line[c];
    }
    out += '\n';
  }
  return out;
}

}  // namespace prophet
