#include "prophet/generator.hpp"

#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace prophet {

namespace {

// Register conventions for generated code. Keeping address registers away
// from the arithmetic pool guarantees every store lands in bounds on every
// path, including wrong-path speculation.
constexpr int kCounter = 1;    // loop counter
constexpr int kPred = 4;       // the register chain slices predict
constexpr int kFiller = 9;     // filler target
constexpr int kTrip = 14;      // loop trip count
constexpr int kAddr = 15;      // computed address
constexpr int kBases[] = {5, 6, 7};
constexpr int kBaseValues[] = {100, 600, 1200};
constexpr int kPool[] = {0, 2, 3, 8, 10, 11, 12, 13};

class Emitter {
 public:
  explicit Emitter(uint64_t seed, int max_instructions)
      : eng_(seed), budget_(max_instructions < 24 ? 24 : max_instructions) {}

  // bounded draw from the engine itself; distributions are not portable
  int below(int n) { return static_cast<int>(eng_() % static_cast<uint64_t>(n)); }
  int range(int lo, int hi) { return lo + below(hi - lo + 1); }
  bool chance(int pct) { return below(100) < pct; }

  void op(const std::string& text) {
    lines_.push_back("    " + text);
    ++count_;
  }
  void label(const std::string& name) { lines_.push_back(name + ":"); }
  int remaining() const { return budget_ - count_; }

  std::string reg(int r) { return "r" + std::to_string(r); }
  int pool_reg() { return kPool[below(static_cast<int>(std::size(kPool)))]; }
  int base_reg() { return kBases[below(3)]; }

  void arith_op() {
    int roll = below(100);
    int rd = pool_reg();
    if (roll < 35) {
      static const char* kBin[] = {"add", "sub", "mul"};
      op(std::string(kBin[below(3)]) + " " + reg(rd) + ", " + reg(pool_reg()) +
         ", " + reg(pool_reg()));
    } else if (roll < 60) {
      op("addi " + reg(rd) + ", " + reg(pool_reg()) + ", " +
         std::to_string(range(-8, 8)));
    } else if (roll < 80) {
      op("li " + reg(rd) + ", " + std::to_string(below(1000)));
    } else {
      op("mov " + reg(rd) + ", " + reg(pool_reg()));
    }
  }

  // n ops of arithmetic, optionally sprinkled with loads/stores at fixed
  // base+offset slots and at most one forward branch
  void arith_block(int n, bool allow_mem, bool allow_branch) {
    bool branch_done = false;
    for (int i = 0; i < n && remaining() > 1; ++i) {
      if (allow_branch && !branch_done && n - i >= 3 && chance(25)) {
        branch_done = true;
        int skip = range(1, 2);
        std::string fwd = "F" + std::to_string(fwd_labels_++);
        static const char* kBr[] = {"beq", "bne", "blt"};
        op(std::string(kBr[below(3)]) + " " + reg(pool_reg()) + ", " +
           reg(pool_reg()) + ", " + fwd);
        for (int s = 0; s < skip; ++s) arith_op();
        label(fwd);
        i += skip;
        continue;
      }
      if (allow_mem && chance(20)) {
        int base = base_reg();
        int off = below(16);
        if (chance(50))
          op("ld " + reg(pool_reg()) + ", [" + reg(base) + "+" +
             std::to_string(off) + "]");
        else
          op("st " + reg(pool_reg()) + ", [" + reg(base) + "+" +
             std::to_string(off) + "]");
        continue;
      }
      arith_op();
    }
  }

  void prologue() {
    label("main");
    for (int i = 0; i < 3; ++i)
      op("li " + reg(kBases[i]) + ", " + std::to_string(kBaseValues[i]));
    op("li " + reg(kPred) + ", " + std::to_string(below(10)));
    int inits = range(2, 4);
    for (int i = 0; i < inits; ++i)
      op("li " + reg(kPool[i]) + ", " + std::to_string(below(1000)));
  }

  // one spawn region: the caller is in the middle of the current thread's
  // body; we spawn a successor, finish this body, and open the region
  void chain_region() {
    std::string name = "R" + std::to_string(region_labels_++);
    enum { kPerfect, kEmpty, kStale } quality;
    int roll = below(100);
    quality = roll < 50 ? kPerfect : roll < 80 ? kEmpty : kStale;
    bool induce = chance(30);
    int vo = 32 + below(16);

    op("spawn " + name);
    if (quality == kPerfect) {
      // touch only the predicted register after the spawn so every live-in
      // the child consumes matches the snapshot or the slice
      op("addi " + reg(kPred) + ", " + reg(kPred) + ", 1");
    } else {
      if (chance(60)) op("addi " + reg(kPred) + ", " + reg(kPred) + ", 1");
      arith_block(range(1, 3), false, false);
    }
    int fillers = quality == kPerfect ? range(2, 5) : range(0, 4);
    for (int i = 0; i < fillers; ++i)
      op("li " + reg(kFiller) + ", " + std::to_string(i));
    // a late store the child's early load races against
    if (induce)
      op("st " + reg(kPool[below(4)]) + ", [r5+" + std::to_string(vo) + "]");

    label(name);
    op("cqip " + name);
    op("pslice_entry " + name);
    if (quality == kPerfect)
      op("addi " + reg(kPred) + ", " + reg(kPred) + ", 1");
    else if (quality == kStale)
      op("li " + reg(kPred) + ", 7777");
    op("pslice_exit " + name);
    if (induce) op("ld r8, [r5+" + std::to_string(vo) + "]");
    if (chance(70)) op("mov r10, " + reg(kPred));
    arith_block(range(2, 5), true, true);
    op("st " + reg(pool_reg()) + ", [r6+" + std::to_string(below(16)) + "]");
  }

  // counted loop that spawns the next iteration; slice carries the counter
  void spawn_loop() {
    std::string name = "LOOP" + std::to_string(loop_labels_++);
    int trips = range(4, 10);
    bool perfect = chance(70);
    bool accumulator = chance(40);

    op("li " + reg(kCounter) + ", 0");
    op("li " + reg(kTrip) + ", " + std::to_string(trips));
    label(name);
    op("cqip " + name);
    op("pslice_entry " + name);
    if (perfect) op("addi " + reg(kCounter) + ", " + reg(kCounter) + ", 1");
    op("pslice_exit " + name);
    op("spawn " + name);
    if (accumulator) op("ld r8, [r6+0]");
    arith_block(range(3, 6), false, true);
    if (accumulator) {
      // memory-carried sum: the next iteration's early load races this store
      op("add r8, r8, " + reg(kCounter));
      op("st r8, [r6+0]");
    }
    op("add " + reg(kAddr) + ", r5, " + reg(kCounter));
    op("st " + reg(pool_reg()) + ", [" + reg(kAddr) + "+0]");
    op("addi " + reg(kCounter) + ", " + reg(kCounter) + ", 1");
    op("blt " + reg(kCounter) + ", " + reg(kTrip) + ", " + name);
  }

  void plain_loop() {
    std::string name = "PLOOP" + std::to_string(loop_labels_++);
    int trips = range(3, 8);
    op("li " + reg(kCounter) + ", 0");
    op("li " + reg(kTrip) + ", " + std::to_string(trips));
    label(name);
    arith_block(range(2, 5), false, false);
    op("add " + reg(kAddr) + ", r5, " + reg(kCounter));
    op("st " + reg(pool_reg()) + ", [" + reg(kAddr) + "+16]");
    op("addi " + reg(kCounter) + ", " + reg(kCounter) + ", 1");
    op("blt " + reg(kCounter) + ", " + reg(kTrip) + ", " + name);
  }

  std::string finish() {
    if (remaining() > 4) arith_block(range(1, 3), true, false);
    op("halt");
    std::string out;
    for (const auto& line : lines_) {
      out += line;
      out += '\n';
    }
    return out;
  }

  std::mt19937_64 eng_;
  int budget_;
  int count_ = 0;
  int fwd_labels_ = 0;
  int region_labels_ = 0;
  int loop_labels_ = 0;
  std::vector<std::string> lines_;
};

}  // namespace

std::string generate_program_text(const GeneratorOptions& opts) {
  Emitter e(opts.seed, opts.max_instructions);
  e.prologue();

  // shape: straight-line, a spawn chain, a spawn loop, or loops plus a chain
  int shape = e.below(100);
  if (shape < 15 || e.remaining() < 30) {
    int blocks = e.range(2, 4);
    for (int i = 0; i < blocks && e.remaining() > 10; ++i)
      e.arith_block(e.range(3, 8), true, true);
  } else if (shape < 55) {
    int regions = e.range(1, 3);
    for (int i = 0; i < regions && e.remaining() >= 28; ++i) e.chain_region();
  } else if (shape < 85) {
    if (e.remaining() >= 26) e.spawn_loop();
    if (e.remaining() >= 28 && e.chance(40)) e.chain_region();
  } else {
    if (e.remaining() >= 18) e.plain_loop();
    if (e.remaining() >= 28) e.chain_region();
    if (e.remaining() >= 26 && e.chance(30)) e.spawn_loop();
  }

  std::string text = e.finish();
  parse_program(text);  // a generator bug should fail here, not downstream
  return text;
}

Program generate_program(const GeneratorOptions& opts) {
  return parse_program(generate_program_text(opts));
}

}  // namespace prophet
