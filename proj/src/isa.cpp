#include "rvpipe/isa.hpp"

#include <array>
#include <charconv>
#include <fmt/format.h>

namespace rvpipe {
namespace {

constexpr uint32_t kOpLui = 0x37;
constexpr uint32_t kOpAuipc = 0x17;
constexpr uint32_t kOpJal = 0x6F;
constexpr uint32_t kOpJalr = 0x67;
constexpr uint32_t kOpBranch = 0x63;
constexpr uint32_t kOpLoad = 0x03;
constexpr uint32_t kOpStore = 0x23;
constexpr uint32_t kOpImm = 0x13;
constexpr uint32_t kOpReg = 0x33;
constexpr uint32_t kOpImm32 = 0x1B;
constexpr uint32_t kOpReg32 = 0x3B;
constexpr uint32_t kOpSystem = 0x73;

constexpr uint32_t kMaskOpcode = 0x0000007F;
constexpr uint32_t kMaskF3 = 0x0000707F;
constexpr uint32_t kMaskF7 = 0xFE00707F;
constexpr uint32_t kMaskF6 = 0xFC00707F;
constexpr uint32_t kMaskAll = 0xFFFFFFFF;

constexpr uint32_t pat(uint32_t opcode, uint32_t f3 = 0, uint32_t f7 = 0) {
  return opcode | (f3 << 12) | (f7 << 25);
}

// clang-format off
constexpr std::array kCatalog = {
  CatalogEntry{Op::Lui,    "lui",    Format::U, pat(kOpLui),          kMaskOpcode, "lui rd, imm20",        "Load upper immediate: rd = imm20 << 12"},
  CatalogEntry{Op::Auipc,  "auipc",  Format::U, pat(kOpAuipc),        kMaskOpcode, "auipc rd, imm20",      "Add upper immediate to PC: rd = pc + (imm20 << 12)"},
  CatalogEntry{Op::Jal,    "jal",    Format::J, pat(kOpJal),          kMaskOpcode, "jal rd, label",        "Jump and link: rd = pc + 4; pc += offset"},
  CatalogEntry{Op::Jalr,   "jalr",   Format::I, pat(kOpJalr, 0),      kMaskF3,     "jalr rd, imm(rs1)",    "Jump and link register: rd = pc + 4; pc = (rs1 + imm) & ~1"},
  CatalogEntry{Op::Beq,    "beq",    Format::B, pat(kOpBranch, 0),    kMaskF3,     "beq rs1, rs2, label",  "Branch if equal"},
  CatalogEntry{Op::Bne,    "bne",    Format::B, pat(kOpBranch, 1),    kMaskF3,     "bne rs1, rs2, label",  "Branch if not equal"},
  CatalogEntry{Op::Blt,    "blt",    Format::B, pat(kOpBranch, 4),    kMaskF3,     "blt rs1, rs2, label",  "Branch if less than (signed)"},
  CatalogEntry{Op::Bge,    "bge",    Format::B, pat(kOpBranch, 5),    kMaskF3,     "bge rs1, rs2, label",  "Branch if greater or equal (signed)"},
  CatalogEntry{Op::Bltu,   "bltu",   Format::B, pat(kOpBranch, 6),    kMaskF3,     "bltu rs1, rs2, label", "Branch if less than (unsigned)"},
  CatalogEntry{Op::Bgeu,   "bgeu",   Format::B, pat(kOpBranch, 7),    kMaskF3,     "bgeu rs1, rs2, label", "Branch if greater or equal (unsigned)"},
  CatalogEntry{Op::Lb,     "lb",     Format::I, pat(kOpLoad, 0),      kMaskF3,     "lb rd, imm(rs1)",      "Load byte, sign-extended"},
  CatalogEntry{Op::Lh,     "lh",     Format::I, pat(kOpLoad, 1),      kMaskF3,     "lh rd, imm(rs1)",      "Load halfword, sign-extended"},
  CatalogEntry{Op::Lw,     "lw",     Format::I, pat(kOpLoad, 2),      kMaskF3,     "lw rd, imm(rs1)",      "Load word, sign-extended"},
  CatalogEntry{Op::Ld,     "ld",     Format::I, pat(kOpLoad, 3),      kMaskF3,     "ld rd, imm(rs1)",      "Load doubleword"},
  CatalogEntry{Op::Lbu,    "lbu",    Format::I, pat(kOpLoad, 4),      kMaskF3,     "lbu rd, imm(rs1)",     "Load byte, zero-extended"},
  CatalogEntry{Op::Lhu,    "lhu",    Format::I, pat(kOpLoad, 5),      kMaskF3,     "lhu rd, imm(rs1)",     "Load halfword, zero-extended"},
  CatalogEntry{Op::Lwu,    "lwu",    Format::I, pat(kOpLoad, 6),      kMaskF3,     "lwu rd, imm(rs1)",     "Load word, zero-extended"},
  CatalogEntry{Op::Sb,     "sb",     Format::S, pat(kOpStore, 0),     kMaskF3,     "sb rs2, imm(rs1)",     "Store byte"},
  CatalogEntry{Op::Sh,     "sh",     Format::S, pat(kOpStore, 1),     kMaskF3,     "sh rs2, imm(rs1)",     "Store halfword"},
  CatalogEntry{Op::Sw,     "sw",     Format::S, pat(kOpStore, 2),     kMaskF3,     "sw rs2, imm(rs1)",     "Store word"},
  CatalogEntry{Op::Sd,     "sd",     Format::S, pat(kOpStore, 3),     kMaskF3,     "sd rs2, imm(rs1)",     "Store doubleword"},
  CatalogEntry{Op::Addi,   "addi",   Format::I, pat(kOpImm, 0),       kMaskF3,     "addi rd, rs1, imm",    "Add immediate"},
  CatalogEntry{Op::Slti,   "slti",   Format::I, pat(kOpImm, 2),       kMaskF3,     "slti rd, rs1, imm",    "Set if less than immediate (signed)"},
  CatalogEntry{Op::Sltiu,  "sltiu",  Format::I, pat(kOpImm, 3),       kMaskF3,     "sltiu rd, rs1, imm",   "Set if less than immediate (unsigned)"},
  CatalogEntry{Op::Xori,   "xori",   Format::I, pat(kOpImm, 4),       kMaskF3,     "xori rd, rs1, imm",    "Exclusive-or immediate"},
  CatalogEntry{Op::Ori,    "ori",    Format::I, pat(kOpImm, 6),       kMaskF3,     "ori rd, rs1, imm",     "Or immediate"},
  CatalogEntry{Op::Andi,   "andi",   Format::I, pat(kOpImm, 7),       kMaskF3,     "andi rd, rs1, imm",    "And immediate"},
  CatalogEntry{Op::Slli,   "slli",   Format::I, pat(kOpImm, 1, 0x00), kMaskF6,     "slli rd, rs1, shamt",  "Shift left logical immediate (shamt 0-63)"},
  CatalogEntry{Op::Srli,   "srli",   Format::I, pat(kOpImm, 5, 0x00), kMaskF6,     "srli rd, rs1, shamt",  "Shift right logical immediate (shamt 0-63)"},
  CatalogEntry{Op::Srai,   "srai",   Format::I, pat(kOpImm, 5, 0x20), kMaskF6,     "srai rd, rs1, shamt",  "Shift right arithmetic immediate (shamt 0-63)"},
  CatalogEntry{Op::Add,    "add",    Format::R, pat(kOpReg, 0, 0x00), kMaskF7,     "add rd, rs1, rs2",     "Add"},
  CatalogEntry{Op::Sub,    "sub",    Format::R, pat(kOpReg, 0, 0x20), kMaskF7,     "sub rd, rs1, rs2",     "Subtract"},
  CatalogEntry{Op::Sll,    "sll",    Format::R, pat(kOpReg, 1, 0x00), kMaskF7,     "sll rd, rs1, rs2",     "Shift left logical"},
  CatalogEntry{Op::Slt,    "slt",    Format::R, pat(kOpReg, 2, 0x00), kMaskF7,     "slt rd, rs1, rs2",     "Set if less than (signed)"},
  CatalogEntry{Op::Sltu,   "sltu",   Format::R, pat(kOpReg, 3, 0x00), kMaskF7,     "sltu rd, rs1, rs2",    "Set if less than (unsigned)"},
  CatalogEntry{Op::Xor,    "xor",    Format::R, pat(kOpReg, 4, 0x00), kMaskF7,     "xor rd, rs1, rs2",     "Exclusive-or"},
  CatalogEntry{Op::Srl,    "srl",    Format::R, pat(kOpReg, 5, 0x00), kMaskF7,     "srl rd, rs1, rs2",     "Shift right logical"},
  CatalogEntry{Op::Sra,    "sra",    Format::R, pat(kOpReg, 5, 0x20), kMaskF7,     "sra rd, rs1, rs2",     "Shift right arithmetic"},
  CatalogEntry{Op::Or,     "or",     Format::R, pat(kOpReg, 6, 0x00), kMaskF7,     "or rd, rs1, rs2",      "Or"},
  CatalogEntry{Op::And,    "and",    Format::R, pat(kOpReg, 7, 0x00), kMaskF7,     "and rd, rs1, rs2",     "And"},
  CatalogEntry{Op::Addiw,  "addiw",  Format::I, pat(kOpImm32, 0),     kMaskF3,     "addiw rd, rs1, imm",   "Add immediate word, sign-extend 32-bit result"},
  CatalogEntry{Op::Slliw,  "slliw",  Format::I, pat(kOpImm32, 1, 0),  kMaskF7,     "slliw rd, rs1, shamt", "Shift left logical immediate word (shamt 0-31)"},
  CatalogEntry{Op::Srliw,  "srliw",  Format::I, pat(kOpImm32, 5, 0),  kMaskF7,     "srliw rd, rs1, shamt", "Shift right logical immediate word (shamt 0-31)"},
  CatalogEntry{Op::Sraiw,  "sraiw",  Format::I, pat(kOpImm32, 5, 0x20), kMaskF7,   "sraiw rd, rs1, shamt", "Shift right arithmetic immediate word (shamt 0-31)"},
  CatalogEntry{Op::Addw,   "addw",   Format::R, pat(kOpReg32, 0, 0x00), kMaskF7,   "addw rd, rs1, rs2",    "Add word, sign-extend 32-bit result"},
  CatalogEntry{Op::Subw,   "subw",   Format::R, pat(kOpReg32, 0, 0x20), kMaskF7,   "subw rd, rs1, rs2",    "Subtract word, sign-extend 32-bit result"},
  CatalogEntry{Op::Sllw,   "sllw",   Format::R, pat(kOpReg32, 1, 0x00), kMaskF7,   "sllw rd, rs1, rs2",    "Shift left logical word"},
  CatalogEntry{Op::Srlw,   "srlw",   Format::R, pat(kOpReg32, 5, 0x00), kMaskF7,   "srlw rd, rs1, rs2",    "Shift right logical word"},
  CatalogEntry{Op::Sraw,   "sraw",   Format::R, pat(kOpReg32, 5, 0x20), kMaskF7,   "sraw rd, rs1, rs2",    "Shift right arithmetic word"},
  CatalogEntry{Op::Ecall,  "ecall",  Format::I, 0x00000073,           kMaskAll,    "ecall",                "System call selected by a7"},
  CatalogEntry{Op::Ebreak, "ebreak", Format::I, 0x00100073,           kMaskAll,    "ebreak",               "Breakpoint: halts the simulation"},
  CatalogEntry{Op::Mul,    "mul",    Format::R, pat(kOpReg, 0, 0x01), kMaskF7,     "mul rd, rs1, rs2",     "Multiply, low 64 bits"},
  CatalogEntry{Op::Mulh,   "mulh",   Format::R, pat(kOpReg, 1, 0x01), kMaskF7,     "mulh rd, rs1, rs2",    "Multiply high, signed x signed"},
  CatalogEntry{Op::Mulhsu, "mulhsu", Format::R, pat(kOpReg, 2, 0x01), kMaskF7,     "mulhsu rd, rs1, rs2",  "Multiply high, signed x unsigned"},
  CatalogEntry{Op::Mulhu,  "mulhu",  Format::R, pat(kOpReg, 3, 0x01), kMaskF7,     "mulhu rd, rs1, rs2",   "Multiply high, unsigned x unsigned"},
  CatalogEntry{Op::Div,    "div",    Format::R, pat(kOpReg, 4, 0x01), kMaskF7,     "div rd, rs1, rs2",     "Divide (signed)"},
  CatalogEntry{Op::Divu,   "divu",   Format::R, pat(kOpReg, 5, 0x01), kMaskF7,     "divu rd, rs1, rs2",    "Divide (unsigned)"},
  CatalogEntry{Op::Rem,    "rem",    Format::R, pat(kOpReg, 6, 0x01), kMaskF7,     "rem rd, rs1, rs2",     "Remainder (signed)"},
  CatalogEntry{Op::Remu,   "remu",   Format::R, pat(kOpReg, 7, 0x01), kMaskF7,     "remu rd, rs1, rs2",    "Remainder (unsigned)"},
  CatalogEntry{Op::Mulw,   "mulw",   Format::R, pat(kOpReg32, 0, 0x01), kMaskF7,   "mulw rd, rs1, rs2",    "Multiply word, sign-extend 32-bit result"},
  CatalogEntry{Op::Divw,   "divw",   Format::R, pat(kOpReg32, 4, 0x01), kMaskF7,   "divw rd, rs1, rs2",    "Divide word (signed)"},
  CatalogEntry{Op::Divuw,  "divuw",  Format::R, pat(kOpReg32, 5, 0x01), kMaskF7,   "divuw rd, rs1, rs2",   "Divide word (unsigned)"},
  CatalogEntry{Op::Remw,   "remw",   Format::R, pat(kOpReg32, 6, 0x01), kMaskF7,   "remw rd, rs1, rs2",    "Remainder word (signed)"},
  CatalogEntry{Op::Remuw,  "remuw",  Format::R, pat(kOpReg32, 7, 0x01), kMaskF7,   "remuw rd, rs1, rs2",   "Remainder word (unsigned)"},
};

constexpr std::array kDirectives = {
  DirectiveEntry{".text",   "Switch to the text segment"},
  DirectiveEntry{".data",   "Switch to the static data segment"},
  DirectiveEntry{".byte",   "Emit 8-bit values"},
  DirectiveEntry{".half",   "Emit 16-bit values"},
  DirectiveEntry{".word",   "Emit 32-bit values (in .text: a raw instruction word)"},
  DirectiveEntry{".dword",  "Emit 64-bit values"},
  DirectiveEntry{".asciiz", "Emit a NUL-terminated string"},
  DirectiveEntry{".string", "Alias of .asciiz"},
  DirectiveEntry{".asciz",  "Alias of .asciiz"},
  DirectiveEntry{".space",  "Reserve N zero bytes"},
  DirectiveEntry{".align",  "Align to 2^N bytes"},
  DirectiveEntry{".globl",  "Accepted for compatibility; no effect"},
};
// clang-format on

constexpr std::array<std::string_view, 32> kAbiNames = {
    "zero", "ra", "sp", "gp", "tp",  "t0",  "t1", "t2", "s0", "s1", "a0",
    "a1",   "a2", "a3", "a4", "a5",  "a6",  "a7", "s2", "s3", "s4", "s5",
    "s6",   "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

bool is_shift_imm(Op op) {
  switch (op) {
    case Op::Slli: case Op::Srli: case Op::Srai:
    case Op::Slliw: case Op::Srliw: case Op::Sraiw:
      return true;
    default:
      return false;
  }
}

bool is_system(Op op) { return op == Op::Ecall || op == Op::Ebreak; }

uint32_t bits(uint32_t w, unsigned hi, unsigned lo) { return (w >> lo) & ((1u << (hi - lo + 1)) - 1); }

void check_reg(uint8_t r, const char* what) {
  if (r >= 32) throw EncodeError(fmt::format("bad {} register index", what));
}

void check_range(int64_t v, int64_t lo, int64_t hi, const char* what) {
  if (v < lo || v > hi) throw EncodeError(fmt::format("{} immediate {} out of range [{}, {}]", what, v, lo, hi));
}

uint64_t sext32(uint64_t v) { return static_cast<uint64_t>(sign_extend(v, 32)); }

}  // namespace

std::span<const CatalogEntry> isa_catalog() { return kCatalog; }
std::span<const DirectiveEntry> directive_catalog() { return kDirectives; }

const CatalogEntry& catalog_entry(Op op) {
  for (const auto& e : kCatalog)
    if (e.op == op) return e;
  throw std::out_of_range("no catalog entry for operation");
}

std::optional<Op> op_from_mnemonic(std::string_view m) {
  for (const auto& e : kCatalog)
    if (e.mnemonic == m) return e.op;
  return std::nullopt;
}

std::string_view mnemonic(Op op) {
  if (op == Op::Illegal) return "illegal";
  return catalog_entry(op).mnemonic;
}

bool is_load(Op op) { return op >= Op::Lb && op <= Op::Lwu; }
bool is_store(Op op) { return op >= Op::Sb && op <= Op::Sd; }
bool is_branch(Op op) { return op >= Op::Beq && op <= Op::Bgeu; }
bool is_jump(Op op) { return op == Op::Jal || op == Op::Jalr; }

bool is_word_form(Op op) {
  switch (op) {
    case Op::Addiw: case Op::Slliw: case Op::Srliw: case Op::Sraiw:
    case Op::Addw: case Op::Subw: case Op::Sllw: case Op::Srlw: case Op::Sraw:
    case Op::Mulw: case Op::Divw: case Op::Divuw: case Op::Remw: case Op::Remuw:
      return true;
    default:
      return false;
  }
}

bool reads_rs1(const Instruction& in) {
  if (!in.legal() || is_system(in.op)) return false;
  return in.format == Format::R || in.format == Format::I || in.format == Format::S ||
         in.format == Format::B;
}

bool reads_rs2(const Instruction& in) {
  if (!in.legal()) return false;
  return in.format == Format::R || in.format == Format::S || in.format == Format::B;
}

bool writes_rd(const Instruction& in) {
  if (!in.legal() || is_system(in.op)) return false;
  return in.format == Format::R || in.format == Format::I || in.format == Format::U ||
         in.format == Format::J;
}

Instruction decode(uint32_t w, uint64_t addr) {
  Instruction in;
  in.raw = w;
  in.addr = addr;
  const CatalogEntry* entry = nullptr;
  for (const auto& e : kCatalog) {
    if ((w & e.mask) == e.match) {
      entry = &e;
      break;
    }
  }
  if (!entry) return in;

  in.op = entry->op;
  in.format = entry->format;
  const auto rd = static_cast<uint8_t>(bits(w, 11, 7));
  const auto rs1 = static_cast<uint8_t>(bits(w, 19, 15));
  const auto rs2 = static_cast<uint8_t>(bits(w, 24, 20));
  switch (in.format) {
    case Format::R:
      in.rd = rd, in.rs1 = rs1, in.rs2 = rs2;
      break;
    case Format::I:
      if (is_system(in.op)) break;
      in.rd = rd, in.rs1 = rs1;
      if (is_shift_imm(in.op))
        in.imm = is_word_form(in.op) ? bits(w, 24, 20) : bits(w, 25, 20);
      else
        in.imm = sign_extend(bits(w, 31, 20), 12);
      break;
    case Format::S:
      in.rs1 = rs1, in.rs2 = rs2;
      in.imm = sign_extend((bits(w, 31, 25) << 5) | bits(w, 11, 7), 12);
      break;
    case Format::B:
      in.rs1 = rs1, in.rs2 = rs2;
      in.imm = sign_extend((bits(w, 31, 31) << 12) | (bits(w, 7, 7) << 11) |
                               (bits(w, 30, 25) << 5) | (bits(w, 11, 8) << 1),
                           13);
      break;
    case Format::U:
      in.rd = rd;
      in.imm = sign_extend(w & 0xFFFFF000u, 32);
      break;
    case Format::J:
      in.rd = rd;
      in.imm = sign_extend((bits(w, 31, 31) << 20) | (bits(w, 19, 12) << 12) |
                               (bits(w, 20, 20) << 11) | (bits(w, 30, 21) << 1),
                           21);
      break;
  }
  return in;
}

uint32_t encode(const Instruction& in) {
  if (!in.legal()) throw EncodeError("cannot encode an illegal instruction");
  const CatalogEntry& e = catalog_entry(in.op);
  if (in.format != e.format) throw EncodeError("format does not match operation");
  uint32_t w = e.match;
  const int64_t imm = in.imm;
  switch (e.format) {
    case Format::R:
      check_reg(in.rd, "rd"), check_reg(in.rs1, "rs1"), check_reg(in.rs2, "rs2");
      w |= (uint32_t{in.rd} << 7) | (uint32_t{in.rs1} << 15) | (uint32_t{in.rs2} << 20);
      break;
    case Format::I:
      if (is_system(in.op)) {
        if (imm != 0 || in.rd != kNoReg || in.rs1 != kNoReg || in.rs2 != kNoReg)
          throw EncodeError("system instruction takes no operands");
        break;
      }
      check_reg(in.rd, "rd"), check_reg(in.rs1, "rs1");
      w |= (uint32_t{in.rd} << 7) | (uint32_t{in.rs1} << 15);
      if (is_shift_imm(in.op)) {
        check_range(imm, 0, is_word_form(in.op) ? 31 : 63, "shift");
        w |= static_cast<uint32_t>(imm) << 20;
      } else {
        check_range(imm, -2048, 2047, "12-bit");
        w |= (static_cast<uint32_t>(imm) & 0xFFF) << 20;
      }
      break;
    case Format::S:
      check_reg(in.rs1, "rs1"), check_reg(in.rs2, "rs2");
      check_range(imm, -2048, 2047, "12-bit");
      w |= (uint32_t{in.rs1} << 15) | (uint32_t{in.rs2} << 20) |
           ((static_cast<uint32_t>(imm) & 0x1F) << 7) | ((static_cast<uint32_t>(imm) >> 5 & 0x7F) << 25);
      break;
    case Format::B: {
      check_reg(in.rs1, "rs1"), check_reg(in.rs2, "rs2");
      check_range(imm, -4096, 4094, "branch");
      if (imm & 1) throw EncodeError("branch offset must be even");
      const auto u = static_cast<uint32_t>(imm);
      w |= (uint32_t{in.rs1} << 15) | (uint32_t{in.rs2} << 20) | ((u >> 12 & 1) << 31) |
           ((u >> 5 & 0x3F) << 25) | ((u >> 1 & 0xF) << 8) | ((u >> 11 & 1) << 7);
      break;
    }
    case Format::U:
      check_reg(in.rd, "rd");
      check_range(imm, -(int64_t{1} << 31), (int64_t{1} << 31) - 4096, "upper");
      if (imm & 0xFFF) throw EncodeError("upper immediate must have zero low 12 bits");
      w |= (uint32_t{in.rd} << 7) | (static_cast<uint32_t>(imm) & 0xFFFFF000u);
      break;
    case Format::J: {
      check_reg(in.rd, "rd");
      check_range(imm, -(int64_t{1} << 20), (int64_t{1} << 20) - 2, "jump");
      if (imm & 1) throw EncodeError("jump offset must be even");
      const auto u = static_cast<uint32_t>(imm);
      w |= (uint32_t{in.rd} << 7) | ((u >> 20 & 1) << 31) | ((u >> 1 & 0x3FF) << 21) |
           ((u >> 11 & 1) << 20) | ((u >> 12 & 0xFF) << 12);
      break;
    }
  }
  return w;
}

Instruction make_instruction(Op op, uint8_t rd, uint8_t rs1, uint8_t rs2, int64_t imm, uint64_t addr) {
  const CatalogEntry& e = catalog_entry(op);
  Instruction in;
  in.op = op;
  in.format = e.format;
  in.addr = addr;
  switch (e.format) {
    case Format::R: in.rd = rd, in.rs1 = rs1, in.rs2 = rs2; break;
    case Format::I:
      if (!is_system(op)) in.rd = rd, in.rs1 = rs1, in.imm = imm;
      break;
    case Format::S:
    case Format::B: in.rs1 = rs1, in.rs2 = rs2, in.imm = imm; break;
    case Format::U:
    case Format::J: in.rd = rd, in.imm = imm; break;
  }
  in.raw = encode(in);
  return in;
}

std::string_view abi_name(unsigned reg) { return reg < 32 ? kAbiNames[reg] : "?"; }
std::string xreg_name(unsigned reg) { return fmt::format("x{}", reg); }

std::optional<uint8_t> parse_register(std::string_view name) {
  if (name.size() >= 2 && name[0] == 'x') {
    unsigned v = 0;
    auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
    if (ec == std::errc{} && p == name.data() + name.size() && v < 32 &&
        !(name.size() > 2 && name[1] == '0'))
      return static_cast<uint8_t>(v);
    return std::nullopt;
  }
  if (name == "fp") return 8;
  for (unsigned i = 0; i < 32; ++i)
    if (kAbiNames[i] == name) return static_cast<uint8_t>(i);
  return std::nullopt;
}

std::string disassemble(const Instruction& in) {
  if (!in.legal()) return fmt::format(".word 0x{:08x}", in.raw);
  const std::string_view m = mnemonic(in.op);
  switch (in.format) {
    case Format::R:
      return fmt::format("{} x{}, x{}, x{}", m, in.rd, in.rs1, in.rs2);
    case Format::I:
      if (is_system(in.op)) return std::string(m);
      if (is_load(in.op) || in.op == Op::Jalr) return fmt::format("{} x{}, {}(x{})", m, in.rd, in.imm, in.rs1);
      return fmt::format("{} x{}, x{}, {}", m, in.rd, in.rs1, in.imm);
    case Format::S:
      return fmt::format("{} x{}, {}(x{})", m, in.rs2, in.imm, in.rs1);
    case Format::B:
      return fmt::format("{} x{}, x{}, {}", m, in.rs1, in.rs2, in.imm);
    case Format::U:
      return fmt::format("{} x{}, 0x{:x}", m, in.rd, (static_cast<uint64_t>(in.imm) >> 12) & 0xFFFFF);
    case Format::J:
      return fmt::format("{} x{}, {}", m, in.rd, in.imm);
  }
  return std::string(m);
}

SemanticResult exec_semantics(const Instruction& in, uint64_t a, uint64_t b, uint64_t pc) {
  SemanticResult r;
  const auto sa = static_cast<int64_t>(a);
  const auto sb = static_cast<int64_t>(b);
  const auto imm = static_cast<uint64_t>(in.imm);
  const auto a32 = static_cast<uint32_t>(a);
  const auto b32 = static_cast<uint32_t>(b);
  const auto sa32 = static_cast<int32_t>(a32);
  const auto sb32 = static_cast<int32_t>(b32);

  if (writes_rd(in)) r.writeback = Writeback{in.rd, is_load(in.op) ? WritebackSource::Memory : WritebackSource::Alu};

  auto branch = [&](bool taken) {
    r.alu_out = taken ? 1 : 0;
    r.branch_taken = taken;
    if (taken) r.next_pc_override = pc + imm;
  };
  auto load = [&](uint8_t width, bool sx) {
    r.alu_out = a + imm;
    r.mem_action = MemAction{MemKind::Load, width, sx};
  };
  auto store = [&](uint8_t width) {
    r.alu_out = a + imm;
    r.mem_action = MemAction{MemKind::Store, width, false};
  };

  switch (in.op) {
    case Op::Illegal:
    case Op::Ecall:
    case Op::Ebreak:
      break;
    case Op::Lui: r.alu_out = imm; break;
    case Op::Auipc: r.alu_out = pc + imm; break;
    case Op::Jal:
      r.alu_out = pc + 4;
      r.next_pc_override = pc + imm;
      break;
    case Op::Jalr:
      r.alu_out = pc + 4;
      r.next_pc_override = (a + imm) & ~uint64_t{1};
      break;
    case Op::Beq: branch(a == b); break;
    case Op::Bne: branch(a != b); break;
    case Op::Blt: branch(sa < sb); break;
    case Op::Bge: branch(sa >= sb); break;
    case Op::Bltu: branch(a < b); break;
    case Op::Bgeu: branch(a >= b); break;
    case Op::Lb: load(1, true); break;
    case Op::Lh: load(2, true); break;
    case Op::Lw: load(4, true); break;
    case Op::Ld: load(8, false); break;
    case Op::Lbu: load(1, false); break;
    case Op::Lhu: load(2, false); break;
    case Op::Lwu: load(4, false); break;
    case Op::Sb: store(1); break;
    case Op::Sh: store(2); break;
    case Op::Sw: store(4); break;
    case Op::Sd: store(8); break;
    case Op::Addi: r.alu_out = a + imm; break;
    case Op::Slti: r.alu_out = sa < in.imm ? 1 : 0; break;
    case Op::Sltiu: r.alu_out = a < imm ? 1 : 0; break;
    case Op::Xori: r.alu_out = a ^ imm; break;
    case Op::Ori: r.alu_out = a | imm; break;
    case Op::Andi: r.alu_out = a & imm; break;
    case Op::Slli: r.alu_out = a << (imm & 63); break;
    case Op::Srli: r.alu_out = a >> (imm & 63); break;
    case Op::Srai: r.alu_out = static_cast<uint64_t>(sa >> (imm & 63)); break;
    case Op::Add: r.alu_out = a + b; break;
    case Op::Sub: r.alu_out = a - b; break;
    case Op::Sll: r.alu_out = a << (b & 63); break;
    case Op::Slt: r.alu_out = sa < sb ? 1 : 0; break;
    case Op::Sltu: r.alu_out = a < b ? 1 : 0; break;
    case Op::Xor: r.alu_out = a ^ b; break;
    case Op::Srl: r.alu_out = a >> (b & 63); break;
    case Op::Sra: r.alu_out = static_cast<uint64_t>(sa >> (b & 63)); break;
    case Op::Or: r.alu_out = a | b; break;
    case Op::And: r.alu_out = a & b; break;
    case Op::Addiw: r.alu_out = sext32(a32 + static_cast<uint32_t>(imm)); break;
    case Op::Slliw: r.alu_out = sext32(a32 << (imm & 31)); break;
    case Op::Srliw: r.alu_out = sext32(a32 >> (imm & 31)); break;
    case Op::Sraiw: r.alu_out = static_cast<uint64_t>(int64_t{sa32 >> (imm & 31)}); break;
    case Op::Addw: r.alu_out = sext32(a32 + b32); break;
    case Op::Subw: r.alu_out = sext32(a32 - b32); break;
    case Op::Sllw: r.alu_out = sext32(a32 << (b & 31)); break;
    case Op::Srlw: r.alu_out = sext32(a32 >> (b & 31)); break;
    case Op::Sraw: r.alu_out = static_cast<uint64_t>(int64_t{sa32 >> (b & 31)}); break;
    case Op::Mul: r.alu_out = a * b; break;
    case Op::Mulh:
      r.alu_out = static_cast<uint64_t>((static_cast<__int128>(sa) * static_cast<__int128>(sb)) >> 64);
      break;
    case Op::Mulhsu:
      r.alu_out = static_cast<uint64_t>((static_cast<__int128>(sa) * static_cast<__int128>(b)) >> 64);
      break;
    case Op::Mulhu:
      r.alu_out = static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) >> 64);
      break;
    case Op::Div:
      if (b == 0) r.alu_out = ~uint64_t{0};
      else if (sa == INT64_MIN && sb == -1) r.alu_out = a;
      else r.alu_out = static_cast<uint64_t>(sa / sb);
      break;
    case Op::Divu: r.alu_out = b == 0 ? ~uint64_t{0} : a / b; break;
    case Op::Rem:
      if (b == 0) r.alu_out = a;
      else if (sa == INT64_MIN && sb == -1) r.alu_out = 0;
      else r.alu_out = static_cast<uint64_t>(sa % sb);
      break;
    case Op::Remu: r.alu_out = b == 0 ? a : a % b; break;
    case Op::Mulw: r.alu_out = sext32(a32 * b32); break;
    case Op::Divw:
      if (b32 == 0) r.alu_out = ~uint64_t{0};
      else if (sa32 == INT32_MIN && sb32 == -1) r.alu_out = sext32(a32);
      else r.alu_out = static_cast<uint64_t>(int64_t{sa32 / sb32});
      break;
    case Op::Divuw: r.alu_out = b32 == 0 ? ~uint64_t{0} : sext32(a32 / b32); break;
    case Op::Remw:
      if (b32 == 0) r.alu_out = sext32(a32);
      else if (sa32 == INT32_MIN && sb32 == -1) r.alu_out = 0;
      else r.alu_out = static_cast<uint64_t>(int64_t{sa32 % sb32});
      break;
    case Op::Remuw: r.alu_out = b32 == 0 ? sext32(a32) : sext32(a32 % b32); break;
  }
  return r;
}

}  // namespace rvpipe
