#include "prophet/isa.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <sstream>

namespace prophet {

namespace {

struct OpcodeInfo {
  Opcode op;
  const char* name;
};

constexpr OpcodeInfo kOpcodes[] = {
    {Opcode::Li, "li"},          {Opcode::Mov, "mov"},
    {Opcode::Add, "add"},        {Opcode::Sub, "sub"},
    {Opcode::Mul, "mul"},        {Opcode::Addi, "addi"},
    {Opcode::Ld, "ld"},          {Opcode::St, "st"},
    {Opcode::Beq, "beq"},        {Opcode::Bne, "bne"},
    {Opcode::Blt, "blt"},        {Opcode::Jmp, "jmp"},
    {Opcode::Halt, "halt"},      {Opcode::Spawn, "spawn"},
    {Opcode::Cqip, "cqip"},      {Opcode::Squash, "squash"},
    {Opcode::PsliceEntry, "pslice_entry"},
    {Opcode::PsliceExit, "pslice_exit"},
};

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (const auto& info : kOpcodes) {
    if (name == info.name) return info.op;
  }
  return std::nullopt;
}

bool is_label_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool is_valid_label(std::string_view s) {
  if (s.empty()) return false;
  if (std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), is_label_char);
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Cursor over one source line.
class LineScanner {
 public:
  LineScanner(std::string_view text, int line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool done() {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(line_, std::string("expected '") + c + "' " + what);
    ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view word() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  int reg() {
    skip_ws();
    size_t start = pos_;
    std::string_view w = word();
    if (w.size() < 2 || w[0] != 'r')
      throw ParseError(line_, "expected register, got '" + std::string(w) + "'");
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(w.data() + 1, w.data() + w.size(), value);
    if (ec != std::errc() || ptr != w.data() + w.size()) {
      pos_ = start;
      throw ParseError(line_, "expected register, got '" + std::string(w) + "'");
    }
    if (value < 0 || value >= kNumRegisters)
      throw ParseError(line_, "register index out of range: " + std::string(w));
    return value;
  }

  int64_t immediate() {
    skip_ws();
    size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    std::string_view tok = text_.substr(start, pos_ - start);
    int64_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
      throw ParseError(line_, "expected immediate, got '" + std::string(tok) + "'");
    return value;
  }

  std::string label() {
    std::string_view w = word();
    if (!is_valid_label(w))
      throw ParseError(line_, "expected label, got '" + std::string(w) + "'");
    return std::string(w);
  }

  void comma() { expect(',', "between operands"); }

  void finish() {
    if (!done())
      throw ParseError(line_, "trailing characters: '" +
                                  std::string(trim(text_.substr(pos_))) + "'");
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_;
};

// [rS+IMM] or [rS]; fills rs/imm.
void parse_mem_operand(LineScanner& sc, Instruction& ins) {
  sc.expect('[', "to open memory operand");
  ins.rs = sc.reg();
  if (sc.consume('+')) {
    ins.imm = sc.immediate();
  } else if (sc.peek() == '-') {
    ins.imm = sc.immediate();
  } else {
    ins.imm = 0;
  }
  sc.expect(']', "to close memory operand");
}

void validate(Program& prog) {
  // Resolve label operands.
  for (auto& ins : prog.instructions) {
    if (ins.label.empty()) continue;
    auto it = prog.labels.find(ins.label);
    if (it == prog.labels.end())
      throw ParseError(ins.src_line, "undefined label '" + ins.label + "'");
    ins.target = it->second;
  }

  // Pair up pslice_entry/pslice_exit per label.
  std::map<std::string, int> entries, exits;
  for (size_t i = 0; i < prog.instructions.size(); ++i) {
    const auto& ins = prog.instructions[i];
    if (ins.op == Opcode::PsliceEntry) {
      if (!entries.emplace(ins.label, static_cast<int>(i)).second)
        throw ParseError(ins.src_line,
                         "duplicate pslice_entry for label '" + ins.label + "'");
    } else if (ins.op == Opcode::PsliceExit) {
      if (!exits.emplace(ins.label, static_cast<int>(i)).second)
        throw ParseError(ins.src_line,
                         "duplicate pslice_exit for label '" + ins.label + "'");
    }
  }
  for (const auto& [label, entry] : entries) {
    auto it = exits.find(label);
    if (it == exits.end())
      throw ParseError(prog.instructions[entry].src_line,
                       "pslice_entry '" + label + "' has no matching pslice_exit");
    if (it->second <= entry)
      throw ParseError(prog.instructions[entry].src_line,
                       "pslice_exit '" + label + "' precedes its pslice_entry");
    prog.pslice_ranges[label] = {entry, it->second};
  }
  for (const auto& [label, exit] : exits) {
    if (!entries.count(label))
      throw ParseError(prog.instructions[exit].src_line,
                       "pslice_exit '" + label + "' has no matching pslice_entry");
  }

  // Ranges must be pairwise disjoint: a p-slice is a straight predict block.
  std::vector<PsliceRange> ranges;
  for (const auto& [label, r] : prog.pslice_ranges) ranges.push_back(r);
  std::sort(ranges.begin(), ranges.end(),
            [](const PsliceRange& a, const PsliceRange& b) { return a.entry < b.entry; });
  for (size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].entry <= ranges[i - 1].exit)
      throw ParseError(prog.instructions[ranges[i].entry].src_line,
                       "p-slice ranges overlap");
  }

  // No thread-management opcodes inside a p-slice, and no halt: the slice
  // must run to its pslice_exit.
  for (const auto& [label, r] : prog.pslice_ranges) {
    for (int i = r.entry + 1; i < r.exit; ++i) {
      const auto& ins = prog.instructions[i];
      if (is_speculation_opcode(ins.op) || ins.op == Opcode::Halt)
        throw ParseError(ins.src_line,
                         std::string(opcode_name(ins.op)) + " not allowed inside a p-slice");
    }
  }

  // Control flow may not cross a p-slice boundary in either direction.
  auto range_of = [&](int idx) -> int {
    int k = 0;
    for (const auto& [label, r] : prog.pslice_ranges) {
      if (idx >= r.entry && idx <= r.exit) return k;
      ++k;
    }
    return -1;
  };
  for (size_t i = 0; i < prog.instructions.size(); ++i) {
    const auto& ins = prog.instructions[i];
    if (ins.op == Opcode::Jmp || is_branch_opcode(ins.op)) {
      if (range_of(static_cast<int>(i)) != range_of(ins.target))
        throw ParseError(ins.src_line, "branch crosses a p-slice boundary");
    }
  }

  // Layout convention: `cqip L` sits exactly at label L, and every spawn
  // target is a cqip followed immediately by its p-slice.
  for (size_t i = 0; i < prog.instructions.size(); ++i) {
    const auto& ins = prog.instructions[i];
    if (ins.op == Opcode::Cqip && ins.target != static_cast<int>(i))
      throw ParseError(ins.src_line,
                       "cqip '" + ins.label + "' is not located at its label");
  }
  for (const auto& ins : prog.instructions) {
    if (ins.op != Opcode::Spawn) continue;
    int at = ins.target;
    const auto& mark = prog.instructions[at];
    if (mark.op != Opcode::Cqip || mark.label != ins.label)
      throw ParseError(ins.src_line,
                       "spawn target '" + ins.label + "' does not start with cqip");
    auto range = prog.pslice_ranges.find(ins.label);
    if (range == prog.pslice_ranges.end())
      throw ParseError(ins.src_line,
                       "spawn target '" + ins.label + "' has no p-slice");
    if (range->second.entry != at + 1)
      throw ParseError(ins.src_line,
                       "p-slice of '" + ins.label + "' must follow its cqip");
  }
}

}  // namespace

const char* opcode_name(Opcode op) {
  for (const auto& info : kOpcodes) {
    if (info.op == op) return info.name;
  }
  return "?";
}

bool is_speculation_opcode(Opcode op) {
  switch (op) {
    case Opcode::Spawn:
    case Opcode::Cqip:
    case Opcode::Squash:
    case Opcode::PsliceEntry:
    case Opcode::PsliceExit:
      return true;
    default:
      return false;
  }
}

bool is_branch_opcode(Opcode op) {
  return op == Opcode::Beq || op == Opcode::Bne || op == Opcode::Blt;
}

bool Program::in_pslice(int index) const {
  for (const auto& [label, r] : pslice_ranges) {
    if (index >= r.entry && index <= r.exit) return true;
  }
  return false;
}

Program parse_program(std::string_view text) {
  Program prog;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    // Leading label definitions.
    std::string_view rest = trim(line);
    while (true) {
      size_t colon = rest.find(':');
      if (colon == std::string_view::npos) break;
      std::string_view name = trim(rest.substr(0, colon));
      if (!is_valid_label(name)) break;  // not a label; let the parser complain
      if (!prog.labels.emplace(std::string(name),
                               static_cast<int>(prog.instructions.size()))
               .second)
        throw ParseError(line_no, "duplicate label '" + std::string(name) + "'");
      rest = trim(rest.substr(colon + 1));
    }
    if (rest.empty()) continue;

    LineScanner sc(rest, line_no);
    std::string_view mnemonic = sc.word();
    auto op = opcode_from_name(mnemonic);
    if (!op)
      throw ParseError(line_no, "unknown opcode '" + std::string(mnemonic) + "'");

    Instruction ins;
    ins.op = *op;
    ins.src_line = line_no;
    switch (*op) {
      case Opcode::Li:
        ins.rd = sc.reg();
        sc.comma();
        ins.imm = sc.immediate();
        break;
      case Opcode::Mov:
        ins.rd = sc.reg();
        sc.comma();
        ins.rs = sc.reg();
        break;
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
        ins.rd = sc.reg();
        sc.comma();
        ins.rs = sc.reg();
        sc.comma();
        ins.rt = sc.reg();
        break;
      case Opcode::Addi:
        ins.rd = sc.reg();
        sc.comma();
        ins.rs = sc.reg();
        sc.comma();
        ins.imm = sc.immediate();
        break;
      case Opcode::Ld:
        ins.rd = sc.reg();
        sc.comma();
        parse_mem_operand(sc, ins);
        break;
      case Opcode::St:
        ins.rd = sc.reg();  // value source
        sc.comma();
        parse_mem_operand(sc, ins);  // base in rs
        break;
      case Opcode::Beq:
      case Opcode::Bne:
      case Opcode::Blt:
        ins.rs = sc.reg();
        sc.comma();
        ins.rt = sc.reg();
        sc.comma();
        ins.label = sc.label();
        break;
      case Opcode::Jmp:
        ins.label = sc.label();
        break;
      case Opcode::Halt:
        break;
      case Opcode::Spawn:
      case Opcode::Cqip:
      case Opcode::Squash:
      case Opcode::PsliceEntry:
      case Opcode::PsliceExit:
        ins.label = sc.label();
        break;
    }
    sc.finish();
    prog.instructions.push_back(std::move(ins));
  }

  if (prog.instructions.empty()) throw ParseError(0, "empty program");
  for (const auto& [name, idx] : prog.labels) {
    if (idx >= static_cast<int>(prog.instructions.size()))
      throw ParseError(0, "label '" + name + "' points past the last instruction");
  }
  validate(prog);
  return prog;
}

std::string print_program(const Program& program) {
  std::ostringstream out;
  // label -> index, inverted with deterministic name order per index
  std::map<int, std::vector<std::string>> by_index;
  for (const auto& [name, idx] : program.labels) by_index[idx].push_back(name);

  for (size_t i = 0; i < program.instructions.size(); ++i) {
    auto lbls = by_index.find(static_cast<int>(i));
    if (lbls != by_index.end()) {
      for (const auto& name : lbls->second) out << name << ":\n";
    }
    const auto& ins = program.instructions[i];
    out << "    " << opcode_name(ins.op);
    switch (ins.op) {
      case Opcode::Li:
        out << " r" << ins.rd << ", " << ins.imm;
        break;
      case Opcode::Mov:
        out << " r" << ins.rd << ", r" << ins.rs;
        break;
      case Opcode::Add:
      case Opcode::Sub:
      case Opcode::Mul:
        out << " r" << ins.rd << ", r" << ins.rs << ", r" << ins.rt;
        break;
      case Opcode::Addi:
        out << " r" << ins.rd << ", r" << ins.rs << ", " << ins.imm;
        break;
      case Opcode::Ld:
        out << " r" << ins.rd << ", [r" << ins.rs << "+" << ins.imm << "]";
        break;
      case Opcode::St:
        out << " r" << ins.rd << ", [r" << ins.rs << "+" << ins.imm << "]";
        break;
      case Opcode::Beq:
      case Opcode::Bne:
      case Opcode::Blt:
        out << " r" << ins.rs << ", r" << ins.rt << ", " << ins.label;
        break;
      case Opcode::Jmp:
      case Opcode::Spawn:
      case Opcode::Cqip:
      case Opcode::Squash:
      case Opcode::PsliceEntry:
      case Opcode::PsliceExit:
        out << " " << ins.label;
        break;
      case Opcode::Halt:
        break;
    }
    out << "\n";
  }
  return out.str();
}

PsliceRange pslice_bounds(const Program& program, const std::string& label) {
  auto it = program.pslice_ranges.find(label);
  if (it == program.pslice_ranges.end())
    throw ParseError(0, "unknown label '" + label + "' (no p-slice range)");
  return it->second;
}

int sequential_next(const Program& program, int pc, bool branch_taken) {
  if (pc < 0 || pc >= static_cast<int>(program.instructions.size()))
    throw std::out_of_range("pc out of range: " + std::to_string(pc));
  const Instruction& ins = program.instructions[pc];
  switch (ins.op) {
    case Opcode::Halt:
      return kHaltPc;
    case Opcode::Jmp:
      return ins.target;
    case Opcode::Beq:
    case Opcode::Bne:
    case Opcode::Blt:
      return branch_taken ? ins.target : pc + 1;
    case Opcode::PsliceEntry:
      return program.pslice_ranges.at(ins.label).exit + 1;
    default:
      // spawn, cqip, squash, pslice_exit and all plain ops fall through
      return pc + 1;
  }
}

}  // namespace prophet
