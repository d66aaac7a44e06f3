#include "prophet/sim.hpp"

#include <cassert>
#include <sstream>

#include "prophet/bus.hpp"
#include "prophet/thread.hpp"
#include "prophet/verify.hpp"

namespace prophet {

namespace {

// Two's-complement wraparound, shared ISA semantics for both machines.
int64_t alu_add(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) +
                              static_cast<uint64_t>(b));
}
int64_t alu_sub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) -
                              static_cast<uint64_t>(b));
}
int64_t alu_mul(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) *
                              static_cast<uint64_t>(b));
}

bool branch_taken(const Instruction& ins, int64_t a, int64_t b) {
  switch (ins.op) {
    case Opcode::Beq: return a == b;
    case Opcode::Bne: return a != b;
    case Opcode::Blt: return a < b;
    default: throw SimInvariantError("branch_taken on a non-branch");
  }
}

int latency_cycles(const MachineConfig& cfg) {
  return cfg.mem_latency > 1 ? cfg.mem_latency : 1;
}

class Simulator {
 public:
  Simulator(const Program& prog, const MachineConfig& cfg, bool tracing)
      : prog_(prog),
        cfg_(cfg),
        tracing_(tracing),
        memory_(cfg.memory_words, 0),
        engine_(cfg.num_pes) {}

  RunResult run();

 private:
  void step_pe(int pe, uint64_t cycle);
  void exec_pre(ThreadContext& t, uint64_t cycle);
  void exec_body(ThreadContext& t, uint64_t cycle);
  void step_sub_thread_verify(ThreadContext& t, uint64_t cycle);
  void step_commit(ThreadContext& t, uint64_t cycle);
  void do_spawn(ThreadContext& t, const Instruction& ins, uint64_t cycle);
  void do_stable_cqip(ThreadContext& t, const Instruction& ins,
                      uint64_t cycle);
  void do_squash_instr(ThreadContext& t, const Instruction& ins,
                       uint64_t cycle);
  void do_stable_halt(ThreadContext& t, uint64_t cycle);
  void speculative_end(ThreadContext& t, const char* kind, uint64_t cycle);
  int64_t load_pre(ThreadContext& t, uint64_t addr, int* extra,
                   const char** src);
  int64_t load_sp(ThreadContext& t, uint64_t addr, int* extra,
                  const char** src);
  void store_sp(ThreadContext& t, uint64_t addr, int64_t value,
                uint64_t cycle);
  int pslice_entry_pc(const std::string& label) const {
    return prog_.pslice_ranges.at(label).entry;
  }

  void emit(uint64_t cycle, const ThreadContext& t, const char* ev,
            const std::string& kv) {
    std::ostringstream os;
    os << "cycle=" << cycle << " pe=" << t.pe << " tid=" << t.tid
       << " ev=" << ev;
    if (!kv.empty()) os << ' ' << kv;
    trace_.push_back(os.str());
  }
  static std::string join_tids(const std::vector<int>& tids) {
    std::ostringstream os;
    for (size_t i = 0; i < tids.size(); ++i) {
      if (i) os << ',';
      os << tids[i];
    }
    return os.str();
  }

  const Program& prog_;
  MachineConfig cfg_;
  bool tracing_;
  std::vector<int64_t> memory_;
  ThreadEngine engine_;
  RunStats stats_;
  std::vector<std::string> trace_;
  std::vector<uint64_t> wake_at_;
  int verifying_child_ = -1;
  bool done_ = false;
  uint64_t end_cycle_ = 0;
  std::array<int64_t, kNumRegisters> final_regs_{};
};

RunResult Simulator::run() {
  ThreadContext& main = engine_.create_main();
  (void)main;
  wake_at_.push_back(0);

  uint64_t cycle = 0;
  for (; !done_; ++cycle) {
    if (cycle >= cfg_.max_cycles) {
      throw RuntimeLimitError("speculative run exceeded max cycles");
    }
    for (int pe = 0; pe < cfg_.num_pes && !done_; ++pe) {
      int tid = engine_.pe_thread(pe);
      if (tid < 0) continue;
      ThreadContext& t = engine_.thread(tid);
      if (!t.live()) continue;
      if (wake_at_[tid] > cycle) continue;
      if (t.stall > 0) {
        --t.stall;
        continue;
      }
      step_pe(pe, cycle);
    }
    if (!done_) engine_.check_invariants();
  }
  stats_.cycles = end_cycle_;
  for (int tid = 1; tid < engine_.total_threads(); ++tid) {
    if (engine_.thread(tid).ever_failed) ++stats_.failed_threads;
  }

  RunResult result;
  result.memory = std::move(memory_);
  result.registers = final_regs_;
  result.stats = stats_;
  result.trace = std::move(trace_);
  return result;
}

void Simulator::step_pe(int pe, uint64_t cycle) {
  ThreadContext& t = engine_.thread(engine_.pe_thread(pe));
  switch (t.state) {
    case ThreadState::Initialization:
      t.state = transition(t.state, ThreadEvent::InitDone);
      t.pc = pslice_entry_pc(t.start_label);
      if (tracing_) emit(cycle, t, "INIT_DONE", "");
      break;
    case ThreadState::Restart:
      t.state = transition(t.state, ThreadEvent::ReInitialized);
      t.pc = pslice_entry_pc(t.start_label);
      if (tracing_) emit(cycle, t, "REINIT", "");
      break;
    case ThreadState::PreCompute:
      exec_pre(t, cycle);
      break;
    case ThreadState::SpExecution:
    case ThreadState::StableExecution:
      exec_body(t, cycle);
      break;
    case ThreadState::Wait:
    case ThreadState::Verification:
      break;  // parked
    case ThreadState::SubThreadVerify:
      step_sub_thread_verify(t, cycle);
      break;
    case ThreadState::Commit:
      step_commit(t, cycle);
      break;
    case ThreadState::Idle:
    case ThreadState::Squash:
      throw SimInvariantError("dead thread scheduled on a PE");
  }
}

// ---------------------------------------------------------------------------
// pre-computation phase (p-slice)

int64_t Simulator::load_pre(ThreadContext& t, uint64_t addr, int* extra,
                            const char** src) {
  if (auto local = t.cache.read_pre_local(addr)) {
    *extra = 0;
    *src = "local";
    return *local;
  }
  std::vector<const L1MemCache*> caches;
  for (int tid : engine_.pre_visibility_of(t.tid)) {
    caches.push_back(&engine_.thread(tid).cache);
  }
  if (auto remote = serve_remote_pre_read(caches, addr, t.version)) {
    t.cache.install_pre_loaded(addr, remote->second);
    *extra = cfg_.bus_latency;
    *src = "remote";
    return remote->second;
  }
  int64_t v = addr < memory_.size() ? memory_[addr] : 0;
  t.cache.install_pre_loaded(addr, v);
  *extra = latency_cycles(cfg_) - 1;
  *src = "mem";
  return v;
}

void Simulator::exec_pre(ThreadContext& t, uint64_t cycle) {
  const Instruction& ins = prog_.instructions.at(t.pc);
  ++stats_.retired_instructions;
  switch (ins.op) {
    case Opcode::PsliceEntry:
      t.pc += 1;
      break;
    case Opcode::PsliceExit:
      t.regs.seal_precomputation();
      t.sealed = true;
      t.state = transition(t.state, ThreadEvent::PsliceExitReached);
      t.pc += 1;
      if (tracing_) emit(cycle, t, "SEAL", "");
      break;
    case Opcode::Li:
      t.regs.write_pre(ins.rd, ins.imm);
      t.pc += 1;
      break;
    case Opcode::Mov:
      t.regs.write_pre(ins.rd, t.regs.read_pre(ins.rs));
      t.pc += 1;
      break;
    case Opcode::Add:
      t.regs.write_pre(ins.rd,
                       alu_add(t.regs.read_pre(ins.rs), t.regs.read_pre(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Sub:
      t.regs.write_pre(ins.rd,
                       alu_sub(t.regs.read_pre(ins.rs), t.regs.read_pre(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Mul:
      t.regs.write_pre(ins.rd,
                       alu_mul(t.regs.read_pre(ins.rs), t.regs.read_pre(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Addi:
      t.regs.write_pre(ins.rd, alu_add(t.regs.read_pre(ins.rs), ins.imm));
      t.pc += 1;
      break;
    case Opcode::Ld: {
      uint64_t addr =
          static_cast<uint64_t>(alu_add(t.regs.read_pre(ins.rs), ins.imm));
      int extra = 0;
      const char* src = "";
      int64_t v = load_pre(t, addr, &extra, &src);
      t.regs.write_pre(ins.rd, v);
      t.stall = extra;
      if (tracing_) {
        std::ostringstream os;
        os << "pc=" << t.pc << " addr=" << addr << " value=" << v
           << " src=" << src << " phase=pre";
        emit(cycle, t, "LD", os.str());
      }
      t.pc += 1;
      break;
    }
    case Opcode::St: {
      uint64_t addr =
          static_cast<uint64_t>(alu_add(t.regs.read_pre(ins.rs), ins.imm));
      int64_t v = t.regs.read_pre(ins.rd);
      t.cache.write_pre(addr, v);
      if (tracing_) {
        std::ostringstream os;
        os << "pc=" << t.pc << " addr=" << addr << " value=" << v
           << " phase=pre";
        emit(cycle, t, "ST", os.str());
      }
      t.pc += 1;
      break;
    }
    case Opcode::Beq:
    case Opcode::Bne:
    case Opcode::Blt: {
      bool taken =
          branch_taken(ins, t.regs.read_pre(ins.rs), t.regs.read_pre(ins.rt));
      t.pc = sequential_next(prog_, t.pc, taken);
      break;
    }
    case Opcode::Jmp:
      t.pc = ins.target;
      break;
    default:
      throw SimInvariantError(
          std::string(opcode_name(ins.op)) + " reached inside a p-slice");
  }
}

// ---------------------------------------------------------------------------
// speculation phase (thread body, stable execution included)

int64_t Simulator::load_sp(ThreadContext& t, uint64_t addr, int* extra,
                           const char** src) {
  if (auto local = t.cache.read_sp_local(addr)) {
    *extra = 0;
    *src = "local";
    return *local;
  }
  std::vector<const L1MemCache*> caches;
  for (int tid : engine_.predecessors_of(t.tid)) {
    caches.push_back(&engine_.thread(tid).cache);
  }
  if (auto remote = serve_remote_sp_read(caches, addr)) {
    t.cache.install_sp_loaded(addr, t.version, remote->second);
    *extra = cfg_.bus_latency;
    *src = "remote";
    return remote->second;
  }
  int64_t v = addr < memory_.size() ? memory_[addr] : 0;
  t.cache.install_sp_loaded(addr, t.version, v);
  *extra = latency_cycles(cfg_) - 1;
  *src = "mem";
  return v;
}

void Simulator::store_sp(ThreadContext& t, uint64_t addr, int64_t value,
                         uint64_t cycle) {
  t.cache.write_sp(addr, t.version, value);
  // Violation test rides every speculative store: threads past the writer
  // that consumed this address took a stale value.
  int violator = -1;
  for (int tid = t.isl_succ_tid; tid != -1;
       tid = engine_.thread(tid).isl_succ_tid) {
    if (engine_.thread(tid).cache.has_speculative_load(addr)) {
      violator = tid;
      break;
    }
  }
  if (violator == -1) return;
  ++stats_.violations;
  ThreadContext& victim = engine_.thread(violator);
  if (tracing_) {
    std::ostringstream os;
    os << "addr=" << addr << " victim=" << violator;
    emit(cycle, t, "VIOLATION", os.str());
  }
  std::vector<int> squashed = engine_.squash_from(victim, /*inclusive=*/false);
  if (tracing_ && !squashed.empty()) {
    emit(cycle, t, "SQUASH", "reason=violation victims=" + join_tids(squashed));
  }
  engine_.restart(victim);
  wake_at_[violator] = cycle + 1;
  if (tracing_) emit(cycle, victim, "RESTART", "");
}

void Simulator::speculative_end(ThreadContext& t, const char* kind,
                                uint64_t cycle) {
  t.state = transition(t.state, ThreadEvent::ThreadEndSpeculative);
  if (tracing_) emit(cycle, t, "THREAD_END", std::string("kind=") + kind);
}

void Simulator::exec_body(ThreadContext& t, uint64_t cycle) {
  if (t.pc < 0 || t.pc >= static_cast<int>(prog_.instructions.size())) {
    // Wrong-path threads may run off the program; they park until squashed.
    // The stable thread cannot: the reference machine would have too.
    if (!t.stable) {
      speculative_end(t, "offend", cycle);
      return;
    }
    throw std::out_of_range("pc out of range in stable execution");
  }
  const Instruction& ins = prog_.instructions[t.pc];
  ++stats_.retired_instructions;
  switch (ins.op) {
    case Opcode::Li:
      t.regs.write_sp(ins.rd, ins.imm);
      t.pc += 1;
      break;
    case Opcode::Mov:
      t.regs.write_sp(ins.rd, t.regs.read_sp(ins.rs));
      t.pc += 1;
      break;
    case Opcode::Add:
      t.regs.write_sp(ins.rd,
                      alu_add(t.regs.read_sp(ins.rs), t.regs.read_sp(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Sub:
      t.regs.write_sp(ins.rd,
                      alu_sub(t.regs.read_sp(ins.rs), t.regs.read_sp(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Mul:
      t.regs.write_sp(ins.rd,
                      alu_mul(t.regs.read_sp(ins.rs), t.regs.read_sp(ins.rt)));
      t.pc += 1;
      break;
    case Opcode::Addi:
      t.regs.write_sp(ins.rd, alu_add(t.regs.read_sp(ins.rs), ins.imm));
      t.pc += 1;
      break;
    case Opcode::Ld: {
      uint64_t addr =
          static_cast<uint64_t>(alu_add(t.regs.read_sp(ins.rs), ins.imm));
      int extra = 0;
      const char* src = "";
      int64_t v = load_sp(t, addr, &extra, &src);
      t.regs.write_sp(ins.rd, v);
      t.stall = extra;
      if (tracing_) {
        std::ostringstream os;
        os << "pc=" << t.pc << " addr=" << addr << " value=" << v
           << " src=" << src << " phase=sp";
        emit(cycle, t, "LD", os.str());
      }
      t.pc += 1;
      break;
    }
    case Opcode::St: {
      uint64_t addr =
          static_cast<uint64_t>(alu_add(t.regs.read_sp(ins.rs), ins.imm));
      int64_t v = t.regs.read_sp(ins.rd);
      if (tracing_) {
        std::ostringstream os;
        os << "pc=" << t.pc << " addr=" << addr << " value=" << v
           << " phase=sp";
        emit(cycle, t, "ST", os.str());
      }
      store_sp(t, addr, v, cycle);
      t.pc += 1;
      break;
    }
    case Opcode::Beq:
    case Opcode::Bne:
    case Opcode::Blt: {
      bool taken =
          branch_taken(ins, t.regs.read_sp(ins.rs), t.regs.read_sp(ins.rt));
      t.pc = sequential_next(prog_, t.pc, taken);
      break;
    }
    case Opcode::Jmp:
      t.pc = ins.target;
      break;
    case Opcode::PsliceEntry:
      // Falling into a spawn region executes the marker and skips the slice,
      // exactly like the reference machine.
      t.pc = sequential_next(prog_, t.pc);
      break;
    case Opcode::Spawn:
      do_spawn(t, ins, cycle);
      break;
    case Opcode::Squash:
      do_squash_instr(t, ins, cycle);
      break;
    case Opcode::Cqip:
      if (t.stable) {
        do_stable_cqip(t, ins, cycle);
      } else {
        speculative_end(t, "cqip", cycle);  // pc stays: re-runs as stable
      }
      break;
    case Opcode::Halt:
      if (t.stable) {
        do_stable_halt(t, cycle);
      } else {
        speculative_end(t, "halt", cycle);
      }
      break;
    case Opcode::PsliceExit:
      throw SimInvariantError("pslice_exit reached in the speculation phase");
  }
}

void Simulator::do_spawn(ThreadContext& t, const Instruction& ins,
                         uint64_t cycle) {
  int entry = pslice_entry_pc(ins.label);
  ThreadContext* child = engine_.spawn_thread(t, ins.label, entry, cycle);
  if (child == nullptr) {
    ++stats_.refused_spawns;
    if (tracing_) emit(cycle, t, "SPAWN_REFUSED", "label=" + ins.label);
  } else {
    ++stats_.spawned_threads;
    wake_at_.push_back(cycle + 1);
    assert(static_cast<int>(wake_at_.size()) == engine_.total_threads());
    if (tracing_) {
      std::ostringstream os;
      os << "child=" << child->tid << " version=" << child->version
         << " label=" << ins.label << " child_pe=" << child->pe;
      emit(cycle, t, "SPAWN", os.str());
    }
  }
  t.pc += 1;
  t.stall = cfg_.spawn_cost - 1;
}

void Simulator::do_squash_instr(ThreadContext& t, const Instruction& ins,
                                uint64_t cycle) {
  // Discards the nearest successor spawned for this label, along with
  // everything past it.
  int target = -1;
  for (int tid = t.isl_succ_tid; tid != -1;
       tid = engine_.thread(tid).isl_succ_tid) {
    if (engine_.thread(tid).start_label == ins.label) {
      target = tid;
      break;
    }
  }
  if (target != -1) {
    std::vector<int> squashed =
        engine_.squash_from(engine_.thread(target), /*inclusive=*/true);
    if (tracing_) {
      emit(cycle, t, "SQUASH",
           "reason=instr label=" + ins.label +
               " victims=" + join_tids(squashed));
    }
  }
  t.pc += 1;
  t.stall = cfg_.squash_cost - 1;
}

void Simulator::do_stable_cqip(ThreadContext& t, const Instruction& ins,
                               uint64_t cycle) {
  int succ = t.isl_succ_tid;
  if (succ == -1) {
    if (tracing_) emit(cycle, t, "CQIP", "label=" + ins.label + " action=through");
    t.pc += 1;
    return;
  }
  ThreadContext& child = engine_.thread(succ);
  if (child.start_label != ins.label) {
    // Control mis-speculation: the next thread in speculative order was
    // spawned for a point this execution never reaches first.
    std::vector<int> squashed = engine_.squash_from(child, /*inclusive=*/true);
    if (tracing_) {
      emit(cycle, t, "CQIP",
           "label=" + ins.label + " action=mismatch found=" +
               child.start_label + " victims=" + join_tids(squashed));
    }
    t.pc += 1;
    return;
  }
  t.state = transition(t.state, ThreadEvent::OwnCqipExecuted);
  verifying_child_ = succ;
  if (tracing_) {
    std::ostringstream os;
    os << "label=" << ins.label << " action=verify child=" << succ;
    emit(cycle, t, "CQIP", os.str());
  }
}

void Simulator::step_sub_thread_verify(ThreadContext& t, uint64_t cycle) {
  ThreadContext& child = engine_.thread(verifying_child_);
  if (!child.live()) throw SimInvariantError("verified child vanished");
  if (!child.sealed || (child.state != ThreadState::SpExecution &&
                        child.state != ThreadState::Wait)) {
    return;  // pre-computation still running (or restarting); wait for it
  }
  child.state = transition(child.state, ThreadEvent::VerifyMessageReceived);
  VerificationReport report = verify_sub_thread(t, child, memory_);
  ++stats_.verifications;
  int cost = 1 + cfg_.verify_cost_per_word * report.words_compared;
  if (report.passed()) {
    t.state = transition(t.state, ThreadEvent::VerificationPassedOrNoChild);
    t.stall = cost - 1;
    if (tracing_) {
      std::ostringstream os;
      os << "result=pass child=" << child.tid
         << " words=" << report.words_compared;
      emit(cycle, t, "VERIFY", os.str());
    }
  } else {
    ++stats_.failed_verifications;
    if (tracing_) {
      std::ostringstream os;
      os << "result=fail child=" << child.tid << " detail=\""
         << describe(report) << "\"";
      emit(cycle, t, "VERIFY", os.str());
    }
    std::vector<int> squashed = engine_.squash_from(child, /*inclusive=*/true);
    if (tracing_) {
      emit(cycle, t, "SQUASH",
           "reason=verify_fail victims=" + join_tids(squashed));
    }
    verifying_child_ = -1;
    t.state = transition(t.state, ThreadEvent::VerificationFailed);
    t.pc += 1;  // execute straight through the cqip
    t.stall = cost - 1;
  }
}

void Simulator::step_commit(ThreadContext& t, uint64_t cycle) {
  ThreadContext& child = engine_.thread(verifying_child_);
  if (child.state != ThreadState::Verification) {
    throw SimInvariantError("commit without a paused successor");
  }
  int words = t.cache.commit_lines(memory_);
  child.regs.synchronize_from_parent(t.regs.values());
  ++stats_.commits;
  if (tracing_) {
    std::ostringstream os;
    os << "words=" << words << " token_to=" << child.tid;
    emit(cycle, t, "COMMIT", os.str());
  }
  t.state = transition(t.state, ThreadEvent::CommitDone);
  engine_.retire_head();
  child.state = transition(child.state, ThreadEvent::StableTokenReceived);
  wake_at_[child.tid] = cycle + 1 + cfg_.verify_cost_per_word * words;
  verifying_child_ = -1;
}

void Simulator::do_stable_halt(ThreadContext& t, uint64_t cycle) {
  if (t.isl_succ_tid != -1) {
    std::vector<int> squashed = engine_.squash_from(t, /*inclusive=*/false);
    if (tracing_) {
      emit(cycle, t, "SQUASH", "reason=halt victims=" + join_tids(squashed));
    }
  }
  int words = t.cache.commit_lines(memory_);
  final_regs_ = t.regs.values();
  if (tracing_) {
    std::ostringstream os;
    os << "words=" << words;
    emit(cycle, t, "HALT", os.str());
  }
  done_ = true;
  end_cycle_ = cycle + 1 + cfg_.verify_cost_per_word * words;
}

}  // namespace

// ---------------------------------------------------------------------------

SeqResult run_sequential(const Program& prog, const MachineConfig& cfg) {
  SeqResult res;
  res.memory.assign(cfg.memory_words, 0);
  std::array<int64_t, kNumRegisters>& regs = res.registers;
  int pc = 0;
  while (pc != kHaltPc) {
    if (res.cycles >= cfg.max_cycles) {
      throw RuntimeLimitError("sequential run exceeded max cycles");
    }
    const Instruction& ins = prog.instructions.at(pc);
    ++res.instructions;
    int cost = 1;
    bool taken = false;
    switch (ins.op) {
      case Opcode::Li: regs[ins.rd] = ins.imm; break;
      case Opcode::Mov: regs[ins.rd] = regs[ins.rs]; break;
      case Opcode::Add: regs[ins.rd] = alu_add(regs[ins.rs], regs[ins.rt]); break;
      case Opcode::Sub: regs[ins.rd] = alu_sub(regs[ins.rs], regs[ins.rt]); break;
      case Opcode::Mul: regs[ins.rd] = alu_mul(regs[ins.rs], regs[ins.rt]); break;
      case Opcode::Addi: regs[ins.rd] = alu_add(regs[ins.rs], ins.imm); break;
      case Opcode::Ld: {
        uint64_t addr = static_cast<uint64_t>(alu_add(regs[ins.rs], ins.imm));
        regs[ins.rd] = addr < res.memory.size() ? res.memory[addr] : 0;
        cost = cfg.mem_latency > 1 ? cfg.mem_latency : 1;
        break;
      }
      case Opcode::St: {
        uint64_t addr = static_cast<uint64_t>(alu_add(regs[ins.rs], ins.imm));
        if (addr >= res.memory.size()) {
          throw std::out_of_range("store out of bounds at pc " +
                                  std::to_string(pc));
        }
        res.memory[addr] = regs[ins.rd];
        cost = cfg.mem_latency > 1 ? cfg.mem_latency : 1;
        break;
      }
      case Opcode::Beq:
      case Opcode::Bne:
      case Opcode::Blt:
        taken = branch_taken(ins, regs[ins.rs], regs[ins.rt]);
        break;
      case Opcode::Jmp:
      case Opcode::Halt:
      case Opcode::Spawn:
      case Opcode::Cqip:
      case Opcode::Squash:
      case Opcode::PsliceEntry:
        break;  // control handled by sequential_next; markers are inert
      case Opcode::PsliceExit:
        throw SimInvariantError("pslice_exit reached by the reference machine");
    }
    res.cycles += static_cast<uint64_t>(cost);
    pc = sequential_next(prog, pc, taken);
  }
  return res;
}

RunResult run_speculative(const Program& prog, const MachineConfig& cfg,
                          bool with_trace) {
  SeqResult seq = run_sequential(prog, cfg);
  Simulator sim(prog, cfg, with_trace);
  RunResult result = sim.run();
  result.seq_cycles = seq.cycles;

  if (result.memory != seq.memory) {
    for (size_t a = 0; a < seq.memory.size(); ++a) {
      if (result.memory[a] != seq.memory[a]) {
        std::ostringstream os;
        os << "memory diverges at address " << a << ": speculative "
           << result.memory[a] << ", sequential " << seq.memory[a];
        throw EquivalenceError(os.str());
      }
    }
  }
  if (result.registers != seq.registers) {
    for (int r = 0; r < kNumRegisters; ++r) {
      if (result.registers[r] != seq.registers[r]) {
        std::ostringstream os;
        os << "register r" << r << " diverges: speculative "
           << result.registers[r] << ", sequential " << seq.registers[r];
        throw EquivalenceError(os.str());
      }
    }
  }
  return result;
}

}  // namespace prophet
