#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prophet/generator.hpp"
#include "prophet/isa.hpp"
#include "prophet/report.hpp"
#include "prophet/sim.hpp"
#include "prophet/thread.hpp"

namespace {

struct CostFlags {
  int pes = 4;
  int mem_latency = 1;
  int spawn_cost = 1;
  int verify_cost = 1;
  uint64_t max_cycles = 10'000'000;
};

void add_cost_flags(CLI::App* cmd, CostFlags* f, bool with_pes = true) {
  if (with_pes) cmd->add_option("--pes", f->pes, "processing elements");
  cmd->add_option("--mem-latency", f->mem_latency, "memory access latency");
  cmd->add_option("--spawn-cost", f->spawn_cost, "cycles per spawn");
  cmd->add_option("--verify-cost", f->verify_cost,
                  "verification cycles per compared word");
  cmd->add_option("--max-cycles", f->max_cycles, "runtime limit");
}

prophet::MachineConfig to_config(const CostFlags& f) {
  prophet::MachineConfig cfg;
  cfg.num_pes = f.pes;
  cfg.mem_latency = f.mem_latency;
  cfg.spawn_cost = f.spawn_cost;
  cfg.verify_cost_per_word = f.verify_cost;
  cfg.max_cycles = f.max_cycles;
  return cfg;
}

prophet::Program load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return prophet::parse_program(text.str());
}

std::string program_name(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prophet speculative multithreading simulator"};
  app.require_subcommand(1);

  std::string run_file;
  CostFlags run_flags;
  bool run_trace = false, run_csv = false;
  auto* run = app.add_subcommand("run", "simulate one program and report");
  run->add_option("program", run_file, "program file")->required();
  add_cost_flags(run, &run_flags);
  run->add_flag("--trace", run_trace, "print the event trace first");
  run->add_flag("--csv", run_csv, "emit CSV instead of a table");

  std::vector<std::string> sweep_files;
  CostFlags sweep_flags;
  std::vector<int> sweep_pes = {1, 2, 4, 8};
  bool sweep_csv = false;
  auto* sweep = app.add_subcommand("sweep", "run programs across PE counts");
  sweep->add_option("program", sweep_files, "program files")->required();
  add_cost_flags(sweep, &sweep_flags, /*with_pes=*/false);
  sweep->add_option("--pes", sweep_pes, "PE counts to sweep");
  sweep->add_flag("--csv", sweep_csv, "emit CSV instead of a table");

  std::string trace_file;
  CostFlags trace_flags;
  auto* trace = app.add_subcommand("trace", "print the event trace");
  trace->add_option("program", trace_file, "program file")->required();
  add_cost_flags(trace, &trace_flags);

  uint64_t gen_seed = 0;
  int gen_max = 200;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a random program");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--max-instructions", gen_max, "instruction budget");
  gen->add_option("--out", gen_out, "write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) {
      prophet::Program prog = load_program(run_file);
      prophet::RunResult result =
          prophet::run_speculative(prog, to_config(run_flags), run_trace);
      if (run_trace)
        for (const auto& line : result.trace) std::cout << line << '\n';
      std::vector<prophet::ReportRow> rows = {
          prophet::make_row(program_name(run_file), run_flags.pes, result)};
      std::cout << (run_csv ? prophet::format_csv(rows)
                            : prophet::format_table(rows));
    } else if (*sweep) {
      std::vector<prophet::ReportRow> rows;
      for (const auto& file : sweep_files) {
        prophet::Program prog = load_program(file);
        for (int pes : sweep_pes) {
          CostFlags f = sweep_flags;
          f.pes = pes;
          rows.push_back(prophet::make_row(
              program_name(file), pes,
              prophet::run_speculative(prog, to_config(f))));
        }
      }
      std::cout << (sweep_csv ? prophet::format_csv(rows)
                              : prophet::format_table(rows));
    } else if (*trace) {
      prophet::Program prog = load_program(trace_file);
      prophet::RunResult result =
          prophet::run_speculative(prog, to_config(trace_flags), true);
      for (const auto& line : result.trace) std::cout << line << '\n';
    } else if (*gen) {
      prophet::GeneratorOptions opts;
      opts.seed = gen_seed;
      opts.max_instructions = gen_max;
      std::string text = prophet::generate_program_text(opts);
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(gen_out);
        if (!out.good()) throw std::runtime_error("cannot write " + gen_out);
        out << text;
      }
    }
  } catch (const prophet::EquivalenceError& e) {
    std::cerr << "equivalence failure: " << e.what() << '\n';
    return 2;
  } catch (const prophet::SimInvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 2;
  } catch (const prophet::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const prophet::RuntimeLimitError& e) {
    std::cerr << "runtime limit: " << e.what() << '\n';
    return 1;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
