#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "prophet/isa.hpp"
#include "prophet/sim.hpp"

using namespace prophet;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const std::vector<std::string> kCorpus = {
    "fig5.prophet",         "raw_violation.prophet", "loop_independent.prophet",
    "loop_carried.prophet", "nested_spawn.prophet",  "squash_instr.prophet",
};

}  // namespace

TEST_CASE("corpus: every program parses and validates") {
  for (const auto& name : kCorpus) {
    CAPTURE(name);
    auto text = slurp(std::filesystem::path(PROPHET_CORPUS_DIR) / name);
    Program prog = parse_program(text);
    CHECK(!prog.instructions.empty());
    // round-trip through the canonical printer
    CHECK(parse_program(print_program(prog)) == prog);
  }
}

TEST_CASE("corpus: speculative run matches sequential at 1/2/4/8 PEs") {
  for (const auto& name : kCorpus) {
    auto text = slurp(std::filesystem::path(PROPHET_CORPUS_DIR) / name);
    Program prog = parse_program(text);
    for (int pes : {1, 2, 4, 8}) {
      CAPTURE(name);
      CAPTURE(pes);
      MachineConfig cfg;
      cfg.num_pes = pes;
      cfg.memory_words = 4096;
      // run_speculative throws EquivalenceError if the final memory or
      // register state diverges from the sequential machine
      RunResult r = run_speculative(prog, cfg);
      CHECK(r.stats.cycles > 0);
      CHECK(r.seq_cycles > 0);
    }
  }
}

TEST_CASE("corpus: loop_independent scales") {
  auto text =
      slurp(std::filesystem::path(PROPHET_CORPUS_DIR) / "loop_independent.prophet");
  Program prog = parse_program(text);
  std::vector<uint64_t> cycles;
  for (int pes : {1, 2, 4}) {
    MachineConfig cfg;
    cfg.num_pes = pes;
    cfg.memory_words = 4096;
    cycles.push_back(run_speculative(prog, cfg).stats.cycles);
  }
  CHECK(cycles[1] <= cycles[0]);
  CHECK(cycles[2] <= cycles[1]);
  MachineConfig cfg;
  cfg.num_pes = 4;
  cfg.memory_words = 4096;
  RunResult r = run_speculative(prog, cfg);
  double speedup = static_cast<double>(r.seq_cycles) / r.stats.cycles;
  CHECK(speedup >= 1.5);
}

TEST_CASE("corpus: nested_spawn produces the running sums") {
  auto text =
      slurp(std::filesystem::path(PROPHET_CORPUS_DIR) / "nested_spawn.prophet");
  Program prog = parse_program(text);
  MachineConfig cfg;
  cfg.num_pes = 4;
  cfg.memory_words = 4096;
  RunResult r = run_speculative(prog, cfg, /*with_trace=*/true);
  CHECK(r.memory[300] == 1);
  CHECK(r.memory[301] == 3);
  CHECK(r.memory[302] == 6);
  CHECK(r.memory[303] == 10);
  CHECK(r.memory[304] == 15);
  CHECK(r.stats.commits == 3);
  CHECK(r.stats.violations == 0);
  CHECK(r.stats.failed_verifications == 0);
  // each stage's load of its input slot is served out of the producer's
  // still-uncommitted cache
  int remote = 0;
  for (const auto& line : r.trace)
    if (line.find("ev=LD") != std::string::npos &&
        line.find("src=remote") != std::string::npos &&
        line.find("phase=sp") != std::string::npos)
      ++remote;
  CHECK(remote == 3);
}

TEST_CASE("corpus: squash_instr ends with one surviving child") {
  auto text =
      slurp(std::filesystem::path(PROPHET_CORPUS_DIR) / "squash_instr.prophet");
  Program prog = parse_program(text);
  MachineConfig cfg;
  cfg.num_pes = 4;
  cfg.memory_words = 4096;
  RunResult r = run_speculative(prog, cfg);
  CHECK(r.memory[100] == 12);
  CHECK(r.stats.spawned_threads == 2);
  CHECK(r.stats.failed_threads == 1);
  CHECK(r.stats.verifications == 1);
  CHECK(r.stats.failed_verifications == 0);
  CHECK(r.stats.commits == 1);
}
