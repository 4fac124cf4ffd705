#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rvpipe {

// Every supported RV64IM operation, plus the illegal-word marker.
enum class Op : uint8_t {
  Illegal,
  // RV64I
  Lui, Auipc, Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Ld, Lbu, Lhu, Lwu,
  Sb, Sh, Sw, Sd,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Addiw, Slliw, Srliw, Sraiw,
  Addw, Subw, Sllw, Srlw, Sraw,
  Ecall, Ebreak,
  // M
  Mul, Mulh, Mulhsu, Mulhu, Div, Divu, Rem, Remu,
  Mulw, Divw, Divuw, Remw, Remuw,
};

enum class Format : uint8_t { R, I, S, B, U, J };

inline constexpr uint8_t kNoReg = 0xFF;

struct Instruction {
  Op op = Op::Illegal;
  Format format = Format::I;
  uint8_t rd = kNoReg;
  uint8_t rs1 = kNoReg;
  uint8_t rs2 = kNoReg;
  int64_t imm = 0;  // fully sign-extended
  uint64_t addr = 0;
  int source_line = 0;
  uint32_t raw = 0;

  bool legal() const { return op != Op::Illegal; }
  bool operator==(const Instruction&) const = default;
};

/// One row of the instruction reference. `match`/`mask` give the fixed
/// opcode/funct bits: a word belongs to the entry iff (word & mask) == match.
struct CatalogEntry {
  Op op;
  std::string_view mnemonic;
  Format format;
  uint32_t match;
  uint32_t mask;
  std::string_view syntax;
  std::string_view description;
};

struct DirectiveEntry {
  std::string_view name;
  std::string_view description;
};

std::span<const CatalogEntry> isa_catalog();
std::span<const DirectiveEntry> directive_catalog();
const CatalogEntry& catalog_entry(Op op);
std::optional<Op> op_from_mnemonic(std::string_view mnemonic);
std::string_view mnemonic(Op op);

class EncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Never throws: unknown encodings come back with op == Op::Illegal and
/// the raw word preserved.
Instruction decode(uint32_t word, uint64_t addr = 0);

/// Throws EncodeError for bad register indices or immediates that do not fit.
uint32_t encode(const Instruction& instr);

/// Builds a canonical Instruction for `op` (fills format, clears unused
/// operand fields) and encodes it into `raw`.
Instruction make_instruction(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2, int64_t imm,
                             uint64_t addr = 0);

/// Human-readable assembly, using xN register names; branch/jump
/// targets are rendered as PC-relative byte offsets so the text reassembles.
std::string disassemble(const Instruction& instr);

// Operand usage helpers shared by the assembler, hazard unit and oracle.
bool reads_rs1(const Instruction& instr);
bool reads_rs2(const Instruction& instr);
bool writes_rd(const Instruction& instr);
bool is_load(Op op);
bool is_store(Op op);
bool is_branch(Op op);
bool is_jump(Op op);
inline bool is_control_transfer(Op op) { return is_branch(op) || is_jump(op); }
bool is_word_form(Op op);

enum class MemKind : uint8_t { Load, Store };

struct MemAction {
  MemKind kind;
  uint8_t width;  // 1, 2, 4 or 8
  bool sign_extend;
  bool operator==(const MemAction&) const = default;
};

enum class WritebackSource : uint8_t { Alu, Memory };

struct Writeback {
  uint8_t rd;
  WritebackSource source;
  bool operator==(const Writeback&) const = default;
};

/// What an instruction does, computed from its operands alone. For loads and
/// stores alu_out is the effective address; for jal/jalr it is the link value.
struct SemanticResult {
  uint64_t alu_out = 0;
  bool branch_taken = false;
  std::optional<uint64_t> next_pc_override;
  std::optional<MemAction> mem_action;
  std::optional<Writeback> writeback;
  bool operator==(const SemanticResult&) const = default;
};

SemanticResult exec_semantics(const Instruction& instr, uint64_t rs1_value, uint64_t rs2_value,
                              uint64_t pc);

inline int64_t sign_extend(uint64_t value, unsigned bits) {
  const unsigned shift = 64 - bits;
  return static_cast<int64_t>(value << shift) >> shift;
}

// Register naming.
std::string_view abi_name(unsigned reg);
std::string xreg_name(unsigned reg);
std::optional<uint8_t> parse_register(std::string_view name);

}  // namespace rvpipe
