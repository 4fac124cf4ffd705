#include "rvpipe/assembler.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fmt/format.h>
#include <tuple>

namespace rvpipe {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), ident_char);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct LexedLine {
  std::vector<std::pair<std::string, int>> labels;  // name, column
  std::optional<Statement> stmt;
};

// Strips a trailing '#' comment, honouring string and character literals.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

LexedLine lex_line(std::string_view raw, int line_no) {
  LexedLine out;
  const std::string_view line = strip_comment(raw);
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  };
  for (;;) {
    skip_ws();
    if (i >= line.size()) return out;
    size_t j = i;
    while (j < line.size() && ident_char(line[j])) ++j;
    if (j > i && ident_start(line[i]) && j < line.size() && line[j] == ':') {
      out.labels.emplace_back(std::string(line.substr(i, j - i)), static_cast<int>(i) + 1);
      i = j + 1;
      continue;
    }
    break;
  }
  Statement st;
  st.line = line_no;
  st.column = static_cast<int>(i) + 1;
  size_t j = i;
  while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
  st.mnemonic = lower(line.substr(i, j - i));
  i = j;

  // Split operands on top-level commas.
  char quote = 0;
  int depth = 0;
  size_t start = i;
  auto push = [&](size_t end) {
    std::string_view piece = line.substr(start, end - start);
    size_t lead = 0;
    while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
    std::string_view t = trim(piece);
    st.operands.push_back(Operand{std::string(t), static_cast<int>(start + lead) + 1});
  };
  bool any = false;
  for (size_t k = i; k < line.size(); ++k) {
    const char c = line[k];
    if (!std::isspace(static_cast<unsigned char>(c))) any = true;
    if (quote) {
      if (c == '\\') ++k;
      else if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    } else if (c == ',' && depth == 0) {
      push(k);
      start = k + 1;
    }
  }
  if (any) push(line.size());
  out.stmt = std::move(st);
  return out;
}

std::optional<char> unescape(char c) {
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case '0': return '\0';
    case '\\': return '\\';
    case '"': return '"';
    case '\'': return '\'';
    default: return std::nullopt;
  }
}

// Integer literal: [+-] (0x.. | 0b.. | decimal | 'c'). Magnitudes up to 2^64-1
// are accepted and wrap into two's complement.
std::optional<int64_t> parse_literal(std::string_view s, bool* too_wide = nullptr) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.size() >= 3 && s.front() == '\'' && s.back() == '\'') {
    std::string_view body = s.substr(1, s.size() - 2);
    if (body.size() == 1 && body[0] != '\\') return static_cast<unsigned char>(body[0]);
    if (body.size() == 2 && body[0] == '\\') {
      if (auto c = unescape(body[1])) return static_cast<unsigned char>(*c);
    }
    return std::nullopt;
  }
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) base = 16, s.remove_prefix(2);
  else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) base = 2, s.remove_prefix(2);
  if (s.empty()) return std::nullopt;
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec == std::errc::result_out_of_range) {
    if (too_wide) *too_wide = true;
    return std::nullopt;
  }
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  if (neg) v = ~v + 1;
  return static_cast<int64_t>(v);
}

std::string operand_count_msg(const Statement& st, size_t n) {
  return fmt::format("'{}' expects {} operand{}, got {}", st.mnemonic, n, n == 1 ? "" : "s", st.operands.size());
}

void expect_operands(const Statement& st, size_t n) {
  if (st.operands.size() != n) throw AsmError(st.column, operand_count_msg(st, n));
}

Statement derive(const Statement& src, std::string mnemonic, std::vector<Operand> ops) {
  Statement s;
  s.line = src.line;
  s.column = src.column;
  s.mnemonic = std::move(mnemonic);
  s.operands = std::move(ops);
  return s;
}

Operand lit(const Operand& like, std::string text) { return Operand{std::move(text), like.column}; }

constexpr std::string_view kPseudos[] = {"nop", "mv",  "li",   "la",   "not", "neg", "seqz", "snez", "beqz", "bnez",
                                         "bgt", "ble", "bgtu", "bleu", "j",   "jr",  "ret",  "call",
                                         "blez", "bgez", "bltz", "bgtz"};

struct Symbols {
  const std::map<std::string, uint64_t, std::less<>>& table;

  int64_t lookup(std::string_view name, int column) const {
    auto it = table.find(name);
    if (it == table.end()) throw AsmError(column, fmt::format("undefined label \"{}\"", name));
    return static_cast<int64_t>(it->second);
  }
};

uint8_t reg_operand(const Operand& op) {
  if (auto r = parse_register(lower(op.text))) return *r;
  if (op.text.empty()) throw AsmError(op.column, "missing register operand");
  throw AsmError(op.column, fmt::format("expected a register, got '{}'", op.text));
}

// label | label+const | label-const | literal | %hi(expr) | %lo(expr)
int64_t eval_expr(std::string_view text, int column, const Symbols& syms) {
  text = trim(text);
  if (text.empty()) throw AsmError(column, "missing operand");
  if (auto v = parse_literal(text)) return *v;
  auto wrapped = [&](std::string_view prefix) -> std::optional<std::string_view> {
    if (text.size() > prefix.size() + 1 && text.substr(0, prefix.size()) == prefix && text.back() == ')')
      return text.substr(prefix.size(), text.size() - prefix.size() - 1);
    return std::nullopt;
  };
  if (auto inner = wrapped("%hi(")) {
    const int64_t v = eval_expr(*inner, column, syms);
    return ((v + 0x800) >> 12) & 0xFFFFF;
  }
  if (auto inner = wrapped("%lo(")) {
    const int64_t v = eval_expr(*inner, column, syms);
    return sign_extend(static_cast<uint64_t>(v) & 0xFFF, 12);
  }
  size_t split = text.find_first_of("+-", 1);
  std::string_view name = trim(text.substr(0, split));
  if (!is_identifier(name)) throw AsmError(column, fmt::format("malformed operand '{}'", text));
  int64_t value = syms.lookup(name, column);
  if (split != std::string_view::npos) {
    auto offset = parse_literal(text.substr(split));
    if (!offset) throw AsmError(column, fmt::format("malformed offset in '{}'", text));
    value += *offset;
  }
  return value;
}

int64_t imm_in_range(const Operand& op, const Symbols& syms, int64_t lo, int64_t hi) {
  const int64_t v = eval_expr(op.text, op.column, syms);
  if (v < lo || v > hi)
    throw AsmError(op.column, fmt::format("immediate {} out of range [{}, {}]", v, lo, hi));
  return v;
}

// "imm(reg)" or "(reg)"
std::pair<int64_t, uint8_t> mem_operand(const Operand& op, const Symbols& syms) {
  std::string_view t = op.text;
  const size_t open = t.rfind('(');
  if (open == std::string_view::npos || t.back() != ')')
    throw AsmError(op.column, fmt::format("expected offset(register), got '{}'", op.text));
  const std::string_view reg_text = trim(t.substr(open + 1, t.size() - open - 2));
  auto reg = parse_register(lower(reg_text));
  if (!reg) throw AsmError(op.column, fmt::format("expected a base register, got '{}'", reg_text));
  const std::string_view off = trim(t.substr(0, open));
  int64_t imm = off.empty() ? 0 : eval_expr(off, op.column, syms);
  if (imm < -2048 || imm > 2047) throw AsmError(op.column, fmt::format("offset {} out of range [-2048, 2047]", imm));
  return {imm, *reg};
}

struct TextSpan {
  uint64_t base;
  uint64_t end;
};

int64_t branch_offset(const Operand& op, const Symbols& syms, uint64_t pc, const TextSpan& img,
                      int64_t lo, int64_t hi) {
  int64_t offset = 0;
  if (auto v = parse_literal(op.text)) {
    offset = *v;
  } else {
    const int64_t target = eval_expr(op.text, op.column, syms);
    if (static_cast<uint64_t>(target) < img.base || static_cast<uint64_t>(target) > img.end)
      throw AsmError(op.column, fmt::format("control-transfer target '{}' is outside the text segment", op.text));
    offset = target - static_cast<int64_t>(pc);
  }
  if (offset % 4 != 0) throw AsmError(op.column, fmt::format("misaligned branch target (offset {})", offset));
  if (offset < lo || offset > hi)
    throw AsmError(op.column, fmt::format("branch offset {} out of range [{}, {}]", offset, lo, hi));
  return offset;
}

Instruction build_instruction(const Statement& st, Op op, uint64_t pc, const Symbols& syms,
                              const TextSpan& img) {
  const Format f = catalog_entry(op).format;
  const auto& ops = st.operands;
  uint8_t rd = kNoReg, rs1 = kNoReg, rs2 = kNoReg;
  int64_t imm = 0;
  switch (f) {
    case Format::R:
      expect_operands(st, 3);
      rd = reg_operand(ops[0]), rs1 = reg_operand(ops[1]), rs2 = reg_operand(ops[2]);
      break;
    case Format::I:
      if (op == Op::Ecall || op == Op::Ebreak) {
        expect_operands(st, 0);
      } else if (op == Op::Jalr) {
        if (ops.size() == 1) {
          rd = 1, rs1 = reg_operand(ops[0]);
        } else if (ops.size() == 2 && ops[1].text.find('(') != std::string::npos) {
          rd = reg_operand(ops[0]);
          std::tie(imm, rs1) = mem_operand(ops[1], syms);
        } else if (ops.size() == 2) {
          rd = reg_operand(ops[0]), rs1 = reg_operand(ops[1]);
        } else {
          expect_operands(st, 3);
          rd = reg_operand(ops[0]), rs1 = reg_operand(ops[1]);
          imm = imm_in_range(ops[2], syms, -2048, 2047);
        }
      } else if (is_load(op)) {
        expect_operands(st, 2);
        rd = reg_operand(ops[0]);
        std::tie(imm, rs1) = mem_operand(ops[1], syms);
      } else {
        expect_operands(st, 3);
        rd = reg_operand(ops[0]), rs1 = reg_operand(ops[1]);
        switch (op) {
          case Op::Slli: case Op::Srli: case Op::Srai:
            imm = imm_in_range(ops[2], syms, 0, 63);
            break;
          case Op::Slliw: case Op::Srliw: case Op::Sraiw:
            imm = imm_in_range(ops[2], syms, 0, 31);
            break;
          default:
            imm = imm_in_range(ops[2], syms, -2048, 2047);
        }
      }
      break;
    case Format::S:
      expect_operands(st, 2);
      rs2 = reg_operand(ops[0]);
      std::tie(imm, rs1) = mem_operand(ops[1], syms);
      break;
    case Format::B:
      expect_operands(st, 3);
      rs1 = reg_operand(ops[0]), rs2 = reg_operand(ops[1]);
      imm = branch_offset(ops[2], syms, pc, img, -4096, 4092);
      break;
    case Format::U: {
      expect_operands(st, 2);
      rd = reg_operand(ops[0]);
      const int64_t v = imm_in_range(ops[1], syms, -0x80000, 0xFFFFF);
      imm = sign_extend(static_cast<uint64_t>(v & 0xFFFFF) << 12, 32);
      break;
    }
    case Format::J:
      if (ops.size() == 1) {
        rd = 1;
        imm = branch_offset(ops[0], syms, pc, img, -(1 << 20), (1 << 20) - 4);
      } else {
        expect_operands(st, 2);
        rd = reg_operand(ops[0]);
        imm = branch_offset(ops[1], syms, pc, img, -(1 << 20), (1 << 20) - 4);
      }
      break;
  }
  try {
    Instruction in = make_instruction(op, rd, rs1, rs2, imm, pc);
    in.source_line = st.line;
    return in;
  } catch (const EncodeError& e) {
    throw AsmError(st.column, e.what());
  }
}

struct DataItem {
  uint64_t addr;
  unsigned width;
  Operand value;
  int line;
};

struct TextItem {
  uint64_t addr;
  Statement stmt;
  std::optional<uint32_t> raw_word;  // from .word in .text
};

class Assembler {
 public:
  Assembler(std::string_view source, const SegmentLayout& layout) : source_(source) {
    img_.layout = layout;
    img_.entry = layout.text_base;
    img_.source = std::string(source);
    text_pc_ = layout.text_base;
    data_pc_ = layout.static_base;
  }

  AssemblyResult run() {
    pass1();
    pass2();
    AssemblyResult r;
    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const AsmDiagnostic& a, const AsmDiagnostic& b) { return a.line < b.line; });
    r.diagnostics = std::move(diags_);
    if (std::none_of(r.diagnostics.begin(), r.diagnostics.end(),
                     [](const AsmDiagnostic& d) { return d.severity == Severity::Error; }))
      r.image = std::move(img_);
    return r;
  }

 private:
  bool has_errors() const {
    return std::any_of(diags_.begin(), diags_.end(), [](const AsmDiagnostic& d) { return d.severity == Severity::Error; });
  }

  void error(int line, int column, std::string msg) {
    const std::string_view text = line_text(line);
    column = std::clamp(column, 1, std::max<int>(1, static_cast<int>(text.size())));
    std::string snippet(trim(text.substr(std::min<size_t>(column - 1, text.size()))));
    diags_.push_back(AsmDiagnostic{line, column, Severity::Error, std::move(msg), std::move(snippet)});
  }

  std::string_view line_text(int line) const {
    return line >= 1 && line <= static_cast<int>(lines_.size()) ? lines_[line - 1] : std::string_view{};
  }

  uint64_t& pc() { return in_text_ ? text_pc_ : data_pc_; }

  void bind_labels() {
    for (auto& [name, line, col] : pending_) {
      if (img_.symbols.count(name)) {
        error(line, col, fmt::format("duplicate label \"{}\"", name));
        continue;
      }
      img_.symbols.emplace(name, pc());
    }
    pending_.clear();
  }

  void align_data(uint64_t alignment) {
    while (data_pc_ % alignment) ++data_pc_;
  }

  void pass1() {
    std::string_view rest = source_;
    while (true) {
      const size_t nl = rest.find('\n');
      std::string_view l = rest.substr(0, nl);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      lines_.push_back(l);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
    for (size_t i = 0; i < lines_.size(); ++i) {
      const int line_no = static_cast<int>(i) + 1;
      LexedLine lexed = lex_line(lines_[i], line_no);
      for (auto& [name, col] : lexed.labels) pending_.push_back({name, line_no, col});
      if (!lexed.stmt) continue;
      try {
        statement(*lexed.stmt);
      } catch (const AsmError& e) {
        error(line_no, e.column, e.what());
      }
    }
    bind_labels();
    if (data_pc_ > img_.layout.heap_base)
      error(static_cast<int>(lines_.size()), 1, "static data overflows into the dynamic data segment");
  }

  void statement(const Statement& st) {
    if (!st.mnemonic.empty() && st.mnemonic[0] == '.') {
      directive(st);
      return;
    }
    if (!is_pseudo(st.mnemonic) && !op_from_mnemonic(st.mnemonic))
      throw AsmError(st.column, fmt::format("unknown instruction '{}'", st.mnemonic));
    if (!in_text_) throw AsmError(st.column, fmt::format("instruction '{}' outside .text", st.mnemonic));
    bind_labels();
    for (Statement& s : expand_pseudo(st)) {
      text_.push_back(TextItem{text_pc_, std::move(s), std::nullopt});
      text_pc_ += 4;
    }
  }

  void directive(const Statement& st) {
    const std::string& d = st.mnemonic;
    if (d == ".text" || d == ".data") {
      bind_labels();
      in_text_ = d == ".text";
      return;
    }
    if (d == ".globl" || d == ".global") return;
    if (d == ".align") {
      expect_operands(st, 1);
      auto n = parse_literal(st.operands[0].text);
      if (!n || *n < 0 || *n > 12) throw AsmError(st.operands[0].column, ".align expects a power-of-two exponent 0..12");
      const uint64_t a = uint64_t{1} << *n;
      if (in_text_) {
        while (text_pc_ % a) {
          Statement nop = derive(st, "addi", {lit(st.operands[0], "x0"), lit(st.operands[0], "x0"), lit(st.operands[0], "0")});
          text_.push_back(TextItem{text_pc_, nop, std::nullopt});
          text_pc_ += 4;
        }
      } else {
        align_data(a);
      }
      bind_labels();
      return;
    }
    if (in_text_) {
      if (d != ".word") throw AsmError(st.column, fmt::format("directive '{}' is not allowed in .text", d));
      bind_labels();
      if (st.operands.empty()) throw AsmError(st.column, ".word expects at least one value");
      for (const Operand& op : st.operands) {
        auto v = parse_literal(op.text);
        if (!v || *v < INT32_MIN || *v > static_cast<int64_t>(UINT32_MAX))
          throw AsmError(op.column, fmt::format("'.word' in .text expects a 32-bit literal, got '{}'", op.text));
        text_.push_back(TextItem{text_pc_, st, static_cast<uint32_t>(*v)});
        text_pc_ += 4;
      }
      return;
    }
    unsigned width = 0;
    if (d == ".byte") width = 1;
    else if (d == ".half") width = 2;
    else if (d == ".word") width = 4;
    else if (d == ".dword") width = 8;
    if (width) {
      align_data(width);
      bind_labels();
      if (st.operands.empty()) throw AsmError(st.column, fmt::format("'{}' expects at least one value", d));
      for (const Operand& op : st.operands) {
        data_.push_back(DataItem{data_pc_, width, op, st.line});
        data_pc_ += width;
      }
      return;
    }
    if (d == ".asciiz" || d == ".asciz" || d == ".string") {
      bind_labels();
      expect_operands(st, 1);
      for (char c : parse_string(st.operands[0])) img_.static_data[data_pc_++] = static_cast<uint8_t>(c);
      img_.static_data[data_pc_++] = 0;
      return;
    }
    if (d == ".space") {
      bind_labels();
      expect_operands(st, 1);
      auto n = parse_literal(st.operands[0].text);
      if (!n || *n < 0 || *n > static_cast<int64_t>(img_.layout.heap_base - img_.layout.static_base))
        throw AsmError(st.operands[0].column, ".space expects a non-negative size");
      data_pc_ += static_cast<uint64_t>(*n);
      return;
    }
    throw AsmError(st.column, fmt::format("unknown directive '{}'", d));
  }

  static std::string parse_string(const Operand& op) {
    const std::string& t = op.text;
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
      throw AsmError(op.column, fmt::format("expected a quoted string, got '{}'", t));
    std::string out;
    for (size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\') {
        if (i + 2 >= t.size()) throw AsmError(op.column, "dangling escape in string");
        auto c = unescape(t[++i]);
        if (!c) throw AsmError(op.column, fmt::format("unknown escape '\\{}'", t[i]));
        out.push_back(*c);
      } else {
        out.push_back(t[i]);
      }
    }
    return out;
  }

  void pass2() {
    Symbols syms{img_.symbols};
    img_.text.reserve(text_.size());
    const TextSpan span{img_.layout.text_base, img_.layout.text_base + 4 * text_.size()};
    for (const TextItem& item : text_) {
      TextWord w;
      w.addr = item.addr;
      w.source_line = item.stmt.line;
      if (item.raw_word) {
        w.raw = *item.raw_word;
        w.instr = decode(w.raw, w.addr);
        w.instr.source_line = item.stmt.line;
      } else {
        try {
          const Op op = *op_from_mnemonic(item.stmt.mnemonic);
          w.instr = build_instruction(item.stmt, op, item.addr, syms, span);
          w.raw = w.instr.raw;
        } catch (const AsmError& e) {
          error(item.stmt.line, e.column, e.what());
        }
      }
      img_.text.push_back(std::move(w));
    }
    for (const DataItem& item : data_) {
      try {
        const int64_t v = eval_expr(item.value.text, item.value.column, syms);
        if (item.width < 8) {
          const int64_t lo = -(int64_t{1} << (8 * item.width - 1));
          const int64_t hi = (int64_t{1} << (8 * item.width)) - 1;
          if (v < lo || v > hi)
            throw AsmError(item.value.column,
                           fmt::format("value {} does not fit in {} byte{}", v, item.width, item.width == 1 ? "" : "s"));
        }
        for (unsigned i = 0; i < item.width; ++i)
          img_.static_data[item.addr + i] = static_cast<uint8_t>(static_cast<uint64_t>(v) >> (8 * i));
      } catch (const AsmError& e) {
        error(item.line, e.column, e.what());
      }
    }
  }

  struct PendingLabel {
    std::string name;
    int line;
    int column;
  };

  std::string_view source_;
  std::vector<std::string_view> lines_;
  ProgramImage img_;
  std::vector<AsmDiagnostic> diags_;
  std::vector<PendingLabel> pending_;
  std::vector<TextItem> text_;
  std::vector<DataItem> data_;
  bool in_text_ = true;
  uint64_t text_pc_ = 0;
  uint64_t data_pc_ = 0;
};

}  // namespace

const TextWord* ProgramImage::fetch(uint64_t addr) const {
  if (addr < layout.text_base || addr % 4 != 0) return nullptr;
  const uint64_t idx = (addr - layout.text_base) / 4;
  return idx < text.size() ? &text[idx] : nullptr;
}

bool is_pseudo(std::string_view m) {
  return std::find(std::begin(kPseudos), std::end(kPseudos), m) != std::end(kPseudos);
}

std::vector<std::pair<Op, int64_t>> li_sequence(int64_t v) {
  std::vector<std::pair<Op, int64_t>> seq;
  if (v >= -2048 && v <= 2047) {
    seq.emplace_back(Op::Addi, v);
    return seq;
  }
  if (v >= INT32_MIN && v <= INT32_MAX) {
    const int64_t hi20 = ((v + 0x800) >> 12) & 0xFFFFF;
    const int64_t lo12 = sign_extend(static_cast<uint64_t>(v) & 0xFFF, 12);
    seq.emplace_back(Op::Lui, hi20);
    if (lo12 != 0) seq.emplace_back(Op::Addiw, lo12);
    return seq;
  }
  const int64_t lo12 = sign_extend(static_cast<uint64_t>(v) & 0xFFF, 12);
  const auto rest = static_cast<uint64_t>(v) - static_cast<uint64_t>(lo12);
  const int shift = std::countr_zero(rest);
  seq = li_sequence(static_cast<int64_t>(rest) >> shift);
  seq.emplace_back(Op::Slli, shift);
  if (lo12 != 0) seq.emplace_back(Op::Addi, lo12);
  return seq;
}

std::vector<Statement> expand_pseudo(const Statement& st) {
  const std::string& m = st.mnemonic;
  const auto& ops = st.operands;
  if (!is_pseudo(m)) return {st};

  auto one = [&](std::string mn, std::vector<Operand> o) { return std::vector<Statement>{derive(st, std::move(mn), std::move(o))}; };
  const Operand anchor{"", st.column};

  if (m == "nop") {
    expect_operands(st, 0);
    return one("addi", {lit(anchor, "x0"), lit(anchor, "x0"), lit(anchor, "0")});
  }
  if (m == "ret") {
    expect_operands(st, 0);
    return one("jalr", {lit(anchor, "x0"), lit(anchor, "0(x1)")});
  }
  if (m == "j" || m == "call" || m == "jr") {
    expect_operands(st, 1);
    if (m == "j") return one("jal", {lit(ops[0], "x0"), ops[0]});
    if (m == "call") return one("jal", {lit(ops[0], "x1"), ops[0]});
    return one("jalr", {lit(ops[0], "x0"), lit(ops[0], "0(" + ops[0].text + ")")});
  }
  if (m == "beqz" || m == "bnez") {
    expect_operands(st, 2);
    return one(m == "beqz" ? "beq" : "bne", {ops[0], lit(ops[0], "x0"), ops[1]});
  }
  if (m == "bltz" || m == "bgez") {
    expect_operands(st, 2);
    return one(m == "bltz" ? "blt" : "bge", {ops[0], lit(ops[0], "x0"), ops[1]});
  }
  if (m == "blez" || m == "bgtz") {
    expect_operands(st, 2);
    return one(m == "blez" ? "bge" : "blt", {lit(ops[0], "x0"), ops[0], ops[1]});
  }
  if (m == "bgt" || m == "ble" || m == "bgtu" || m == "bleu") {
    expect_operands(st, 3);
    const char* base = m == "bgt" ? "blt" : m == "ble" ? "bge" : m == "bgtu" ? "bltu" : "bgeu";
    return one(base, {ops[1], ops[0], ops[2]});
  }
  expect_operands(st, 2);
  if (m == "mv") return one("addi", {ops[0], ops[1], lit(ops[1], "0")});
  if (m == "not") return one("xori", {ops[0], ops[1], lit(ops[1], "-1")});
  if (m == "neg") return one("sub", {ops[0], lit(ops[1], "x0"), ops[1]});
  if (m == "seqz") return one("sltiu", {ops[0], ops[1], lit(ops[1], "1")});
  if (m == "snez") return one("sltu", {ops[0], lit(ops[1], "x0"), ops[1]});
  if (m == "la") {
    if (parse_literal(ops[1].text) || !is_identifier(trim(ops[1].text.substr(0, ops[1].text.find_first_of("+-", 1)))))
      throw AsmError(ops[1].column, fmt::format("'la' expects a label, got '{}'", ops[1].text));
    return {derive(st, "lui", {ops[0], lit(ops[1], "%hi(" + ops[1].text + ")")}),
            derive(st, "addi", {ops[0], ops[0], lit(ops[1], "%lo(" + ops[1].text + ")")})};
  }
  // li
  bool too_wide = false;
  auto v = parse_literal(ops[1].text, &too_wide);
  if (!v) {
    if (too_wide) throw AsmError(ops[1].column, fmt::format("immediate '{}' is wider than 64 bits", ops[1].text));
    throw AsmError(ops[1].column, fmt::format("'li' expects an integer constant, got '{}'", ops[1].text));
  }
  std::vector<Statement> out;
  bool first = true;
  for (auto [op, imm] : li_sequence(*v)) {
    const Operand src = first ? lit(ops[0], "x0") : ops[0];
    if (op == Op::Lui) out.push_back(derive(st, "lui", {ops[0], lit(ops[1], fmt::format("0x{:x}", imm))}));
    else out.push_back(derive(st, std::string(mnemonic(op)), {ops[0], src, lit(ops[1], std::to_string(imm))}));
    first = false;
  }
  return out;
}

AssemblyResult assemble(std::string_view source, const SegmentLayout& layout) {
  return Assembler(source, layout).run();
}

std::vector<ListingLine> disassemble(const ProgramImage& image) {
  std::vector<ListingLine> out;
  out.reserve(image.text.size());
  for (const TextWord& w : image.text) out.push_back({w.addr, w.raw, disassemble(w.instr), w.source_line});
  return out;
}

std::string format_listing_line(const ListingLine& l) {
  return fmt::format("0x{:08x}  0x{:08x}  {}  # line {}", l.addr, l.raw, l.text, l.source_line);
}

std::string render_listing(const ProgramImage& image) {
  std::string out;
  for (const auto& l : disassemble(image)) out += format_listing_line(l) + "\n";
  return out;
}

std::string format_diagnostic(const AsmDiagnostic& d) {
  return fmt::format("{}:{}: {}: {}{}", d.line, d.column, d.severity == Severity::Error ? "error" : "warning", d.message,
                     d.snippet.empty() ? "" : fmt::format(" [{}]", d.snippet));
}

}  // namespace rvpipe
