#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace prophet {

inline constexpr int kNumRegisters = 16;

enum class Opcode {
  Li,
  Mov,
  Add,
  Sub,
  Mul,
  Addi,
  Ld,
  St,
  Beq,
  Bne,
  Blt,
  Jmp,
  Halt,
  Spawn,
  Cqip,
  Squash,
  PsliceEntry,
  PsliceExit,
};

const char* opcode_name(Opcode op);

// spawn/cqip/squash/pslice_entry/pslice_exit: the thread-speculation
// opcodes. Each carries exactly one label operand.
bool is_speculation_opcode(Opcode op);
bool is_branch_opcode(Opcode op);  // beq/bne/blt

struct Instruction {
  Opcode op = Opcode::Halt;
  int rd = -1;        // destination register (or store source for st)
  int rs = -1;        // first source register (or base for ld/st)
  int rt = -1;        // second source register
  int64_t imm = 0;    // immediate / address offset
  std::string label;  // label operand (branches, jmp, speculation opcodes)
  int target = -1;    // resolved instruction index of `label`
  int src_line = 0;   // 1-based source line, diagnostics only

  bool operator==(const Instruction& other) const {
    return op == other.op && rd == other.rd && rs == other.rs &&
           rt == other.rt && imm == other.imm && label == other.label &&
           target == other.target;
  }
};

struct PsliceRange {
  int entry = -1;  // index of pslice_entry
  int exit = -1;   // index of pslice_exit; always entry < exit
  bool operator==(const PsliceRange&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A validated program. Instruction indices are stable addresses; labels and
// p-slice ranges are resolved at parse time. Immutable after parsing.
struct Program {
  std::vector<Instruction> instructions;
  std::map<std::string, int> labels;                 // label -> instruction index
  std::map<std::string, PsliceRange> pslice_ranges;  // label -> (entry, exit)

  bool operator==(const Program& other) const {
    return instructions == other.instructions && labels == other.labels &&
           pslice_ranges == other.pslice_ranges;
  }

  // True when index lies strictly inside some p-slice range (entry and exit
  // markers themselves count as inside).
  bool in_pslice(int index) const;
};

// Parses the line-oriented assembly format:
//   NAME:                    label definition (may share a line with an instruction)
//   # ...                    comment to end of line
//   li rD, IMM | mov rD, rS | add|sub|mul rD, rS, rT | addi rD, rS, IMM
//   ld rD, [rS+IMM] | st rS, [rT+IMM]
//   beq|bne|blt rS, rT, LABEL | jmp LABEL | halt
//   spawn|cqip|squash|pslice_entry|pslice_exit LABEL
// Throws ParseError on syntax errors, undefined/duplicate labels, unmatched
// pslice_entry/exit, and register indices outside [0, 15].
Program parse_program(std::string_view text);

// Canonical text form; parse_program(print_program(p)) == p.
std::string print_program(const Program& program);

// Range lookup for a p-slice label. Throws ParseError("unknown label ...")
// when the label has no p-slice.
PsliceRange pslice_bounds(const Program& program, const std::string& label);

// Sentinel successor for halt.
inline constexpr int kHaltPc = -1;

// The non-speculative control-flow successor of pc. Speculation opcodes are
// no-ops except pslice_entry, which skips its whole range. Conditional
// branches take `branch_taken`; halt yields kHaltPc. Throws std::out_of_range
// for an invalid pc.
int sequential_next(const Program& program, int pc, bool branch_taken = false);

}  // namespace prophet
