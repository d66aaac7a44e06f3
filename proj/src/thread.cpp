#include "prophet/thread.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace prophet {

const char* thread_state_name(ThreadState s) {
  switch (s) {
    case ThreadState::Idle: return "Idle";
    case ThreadState::Initialization: return "Initialization";
    case ThreadState::PreCompute: return "PreCompute";
    case ThreadState::SpExecution: return "SpExecution";
    case ThreadState::StableExecution: return "StableExecution";
    case ThreadState::Wait: return "Wait";
    case ThreadState::SubThreadVerify: return "SubThreadVerify";
    case ThreadState::Verification: return "Verification";
    case ThreadState::Commit: return "Commit";
    case ThreadState::Squash: return "Squash";
    case ThreadState::Restart: return "Restart";
  }
  return "?";
}

const char* thread_event_name(ThreadEvent e) {
  switch (e) {
    case ThreadEvent::Allocated: return "Allocated";
    case ThreadEvent::InitDone: return "InitDone";
    case ThreadEvent::PsliceExitReached: return "PsliceExitReached";
    case ThreadEvent::ThreadEndSpeculative: return "ThreadEndSpeculative";
    case ThreadEvent::StableTokenReceived: return "StableTokenReceived";
    case ThreadEvent::VerifyMessageReceived: return "VerifyMessageReceived";
    case ThreadEvent::OwnCqipExecuted: return "OwnCqipExecuted";
    case ThreadEvent::VerificationPassedOrNoChild:
      return "VerificationPassedOrNoChild";
    case ThreadEvent::VerificationFailed: return "VerificationFailed";
    case ThreadEvent::CommitDone: return "CommitDone";
    case ThreadEvent::SquashMessage: return "SquashMessage";
    case ThreadEvent::SquashDone: return "SquashDone";
    case ThreadEvent::ViolationMessage: return "ViolationMessage";
    case ThreadEvent::ReInitialized: return "ReInitialized";
  }
  return "?";
}

ThreadState transition(ThreadState state, ThreadEvent event) {
  using S = ThreadState;
  using E = ThreadEvent;
  switch (event) {
    case E::Allocated:
      if (state == S::Idle) return S::Initialization;
      break;
    case E::InitDone:
      if (state == S::Initialization) return S::PreCompute;
      break;
    case E::PsliceExitReached:
      if (state == S::PreCompute) return S::SpExecution;
      break;
    case E::ThreadEndSpeculative:
      if (state == S::SpExecution) return S::Wait;
      break;
    case E::StableTokenReceived:
      if (state == S::SpExecution || state == S::Wait ||
          state == S::Verification) {
        return S::StableExecution;
      }
      break;
    case E::VerifyMessageReceived:
      if (state == S::SpExecution || state == S::Wait) return S::Verification;
      break;
    case E::OwnCqipExecuted:
      if (state == S::StableExecution) return S::SubThreadVerify;
      break;
    case E::VerificationPassedOrNoChild:
      if (state == S::SubThreadVerify) return S::Commit;
      break;
    case E::VerificationFailed:
      // The mispredicted successor is squashed; the stable thread resumes
      // executing straight through its cqip.
      if (state == S::SubThreadVerify) return S::StableExecution;
      break;
    case E::CommitDone:
      if (state == S::Commit) return S::Idle;
      break;
    case E::SquashMessage:
      if (state == S::Initialization || state == S::PreCompute ||
          state == S::SpExecution || state == S::Wait ||
          state == S::Verification || state == S::Restart) {
        return S::Squash;
      }
      break;
    case E::SquashDone:
      if (state == S::Squash) return S::Idle;
      break;
    case E::ViolationMessage:
      if (state == S::SpExecution || state == S::Wait) return S::Restart;
      break;
    case E::ReInitialized:
      if (state == S::Restart) return S::PreCompute;
      break;
  }
  std::ostringstream os;
  os << "undefined thread transition: " << thread_state_name(state) << " + "
     << thread_event_name(event);
  throw SimInvariantError(os.str());
}

ThreadEngine::ThreadEngine(int num_pes) : pe_to_tid_(num_pes, -1) {
  if (num_pes < 1) throw SimInvariantError("need at least one PE");
}

ThreadContext& ThreadEngine::create_main() {
  if (!threads_.empty()) throw SimInvariantError("main thread already exists");
  auto ctx = std::make_unique<ThreadContext>();
  ctx->tid = 0;
  ctx->version = 1;
  ctx->pe = 0;
  ctx->stable = true;
  ctx->sealed = true;
  ctx->state = ThreadState::StableExecution;
  ctx->regs.reset({});
  threads_.push_back(std::move(ctx));
  pe_to_tid_[0] = 0;
  head_tid_ = 0;
  return *threads_[0];
}

ThreadContext* ThreadEngine::spawn_thread(ThreadContext& parent,
                                          const std::string& label,
                                          int start_pc, uint64_t cycle) {
  int pe = -1;
  for (int i = 0; i < num_pes(); ++i) {
    if (pe_to_tid_[i] == -1) {
      pe = i;
      break;
    }
  }
  if (pe == -1) return nullptr;

  auto ctx = std::make_unique<ThreadContext>();
  ctx->tid = static_cast<int>(threads_.size());
  ctx->version = parent.version;
  parent.version += 1;
  ctx->start_label = label;
  ctx->start_pc = start_pc;
  ctx->pc = start_pc;
  ctx->pe = pe;
  ctx->parent_tid = parent.tid;
  ctx->created_cycle = cycle;
  ctx->spawn_snapshot = parent.regs.values();
  ctx->regs.reset(ctx->spawn_snapshot);
  ctx->state = transition(ThreadState::Idle, ThreadEvent::Allocated);

  ctx->isl_succ_tid = parent.isl_succ_tid;
  parent.isl_succ_tid = ctx->tid;

  pe_to_tid_[pe] = ctx->tid;
  ThreadContext& ref = *ctx;
  threads_.push_back(std::move(ctx));
  return &ref;
}

std::vector<int> ThreadEngine::squash_from(ThreadContext& victim,
                                           bool inclusive) {
  int first = inclusive ? victim.tid : victim.isl_succ_tid;
  std::vector<int> squashed;
  for (int tid = first; tid != -1;) {
    ThreadContext& t = *threads_.at(tid);
    if (t.stable) throw SimInvariantError("attempt to squash the stable thread");
    int next = t.isl_succ_tid;
    t.state = transition(t.state, ThreadEvent::SquashMessage);
    t.cache.invalidate_all();
    t.ever_failed = true;
    pe_to_tid_.at(t.pe) = -1;
    t.pe = -1;
    t.isl_succ_tid = -1;
    t.state = transition(t.state, ThreadEvent::SquashDone);
    squashed.push_back(tid);
    tid = next;
  }
  if (inclusive && !squashed.empty()) {
    for (auto& t : threads_) {
      if (t->live() && t->isl_succ_tid == victim.tid) {
        t->isl_succ_tid = -1;
        break;
      }
    }
  } else if (!inclusive) {
    victim.isl_succ_tid = -1;
  }
  return squashed;
}

void ThreadEngine::restart(ThreadContext& victim) {
  if (victim.isl_succ_tid != -1) {
    throw SimInvariantError("restart requires the successors squashed first");
  }
  victim.state = transition(victim.state, ThreadEvent::ViolationMessage);
  victim.cache.invalidate_all();
  victim.regs.reset(victim.spawn_snapshot);
  victim.pc = victim.start_pc;
  victim.sealed = false;
  victim.ever_failed = true;
  victim.stall = 0;
}

int ThreadEngine::speculative_level(int tid) const {
  int level = 0;
  for (int cur = head_tid_; cur != -1; cur = threads_.at(cur)->isl_succ_tid) {
    if (cur == tid) return level;
    ++level;
  }
  throw SimInvariantError("thread not on the immediate-successor list");
}

std::vector<int> ThreadEngine::isl_order() const {
  std::vector<int> order;
  for (int cur = head_tid_; cur != -1; cur = threads_.at(cur)->isl_succ_tid) {
    order.push_back(cur);
  }
  return order;
}

std::vector<int> ThreadEngine::predecessors_of(int tid) const {
  std::vector<int> preds;
  for (int cur = head_tid_; cur != -1; cur = threads_.at(cur)->isl_succ_tid) {
    if (cur == tid) {
      std::reverse(preds.begin(), preds.end());
      return preds;
    }
    preds.push_back(cur);
  }
  throw SimInvariantError("thread not on the immediate-successor list");
}

std::vector<int> ThreadEngine::pre_visibility_of(int tid) const {
  const ThreadContext& t = *threads_.at(tid);
  if (t.parent_tid == -1) return {};
  std::vector<int> vis;
  vis.push_back(t.parent_tid);
  for (int p : predecessors_of(t.parent_tid)) vis.push_back(p);
  return vis;
}

int ThreadEngine::retire_head() {
  ThreadContext& head = *threads_.at(head_tid_);
  if (head.state != ThreadState::Idle) {
    throw SimInvariantError("retiring a head that has not finished committing");
  }
  int next = head.isl_succ_tid;
  head.isl_succ_tid = -1;
  head.stable = false;
  pe_to_tid_.at(head.pe) = -1;
  head.pe = -1;
  for (auto& t : threads_) {
    if (t->live() && t->parent_tid == head.tid) t->parent_tid = -1;
  }
  head_tid_ = next;
  if (next != -1) threads_.at(next)->stable = true;
  return next;
}

int ThreadEngine::live_count() const {
  int n = 0;
  for (const auto& t : threads_) {
    if (t->live()) ++n;
  }
  return n;
}

void ThreadEngine::check_invariants() const {
  int live = live_count();
  if (live == 0) {
    if (head_tid_ != -1) throw SimInvariantError("dangling head tid");
    return;
  }
  if (head_tid_ == -1) throw SimInvariantError("live threads without a head");
  int chain = 0;
  int stable_count = 0;
  for (int cur = head_tid_; cur != -1; cur = threads_.at(cur)->isl_succ_tid) {
    const ThreadContext& t = *threads_.at(cur);
    if (!t.live()) throw SimInvariantError("dead thread on the ISL");
    if (t.stable) ++stable_count;
    if (t.pe < 0 || t.pe >= num_pes() || pe_to_tid_.at(t.pe) != cur) {
      throw SimInvariantError("PE table out of sync");
    }
    ++chain;
    if (chain > live) throw SimInvariantError("ISL cycle detected");
  }
  if (chain != live) {
    throw SimInvariantError("live thread missing from the ISL");
  }
  if (stable_count != 1 || !threads_.at(head_tid_)->stable) {
    throw SimInvariantError("stable thread must be exactly the ISL head");
  }
}

}  // namespace prophet
