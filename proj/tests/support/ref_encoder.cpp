#include "ref_encoder.hpp"

#include <stdexcept>

namespace ref {

const std::vector<OpInfo>& ops() {
  static const std::vector<OpInfo> t = {
      {"lui", Fmt::U, 0b0110111, 0, 0},     {"auipc", Fmt::U, 0b0010111, 0, 0},
      {"jal", Fmt::J, 0b1101111, 0, 0},     {"jalr", Fmt::I, 0b1100111, 0, 0},
      {"beq", Fmt::B, 0b1100011, 0, 0},     {"bne", Fmt::B, 0b1100011, 1, 0},
      {"blt", Fmt::B, 0b1100011, 4, 0},     {"bge", Fmt::B, 0b1100011, 5, 0},
      {"bltu", Fmt::B, 0b1100011, 6, 0},    {"bgeu", Fmt::B, 0b1100011, 7, 0},
      {"lb", Fmt::I, 0b0000011, 0, 0},      {"lh", Fmt::I, 0b0000011, 1, 0},
      {"lw", Fmt::I, 0b0000011, 2, 0},      {"ld", Fmt::I, 0b0000011, 3, 0},
      {"lbu", Fmt::I, 0b0000011, 4, 0},     {"lhu", Fmt::I, 0b0000011, 5, 0},
      {"lwu", Fmt::I, 0b0000011, 6, 0},     {"sb", Fmt::S, 0b0100011, 0, 0},
      {"sh", Fmt::S, 0b0100011, 1, 0},      {"sw", Fmt::S, 0b0100011, 2, 0},
      {"sd", Fmt::S, 0b0100011, 3, 0},      {"addi", Fmt::I, 0b0010011, 0, 0},
      {"slti", Fmt::I, 0b0010011, 2, 0},    {"sltiu", Fmt::I, 0b0010011, 3, 0},
      {"xori", Fmt::I, 0b0010011, 4, 0},    {"ori", Fmt::I, 0b0010011, 6, 0},
      {"andi", Fmt::I, 0b0010011, 7, 0},    {"slli", Fmt::IShift64, 0b0010011, 1, 0b000000},
      {"srli", Fmt::IShift64, 0b0010011, 5, 0b000000}, {"srai", Fmt::IShift64, 0b0010011, 5, 0b010000},
      {"add", Fmt::R, 0b0110011, 0, 0},     {"sub", Fmt::R, 0b0110011, 0, 0b0100000},
      {"sll", Fmt::R, 0b0110011, 1, 0},     {"slt", Fmt::R, 0b0110011, 2, 0},
      {"sltu", Fmt::R, 0b0110011, 3, 0},    {"xor", Fmt::R, 0b0110011, 4, 0},
      {"srl", Fmt::R, 0b0110011, 5, 0},     {"sra", Fmt::R, 0b0110011, 5, 0b0100000},
      {"or", Fmt::R, 0b0110011, 6, 0},      {"and", Fmt::R, 0b0110011, 7, 0},
      {"addiw", Fmt::I, 0b0011011, 0, 0},   {"slliw", Fmt::IShift32, 0b0011011, 1, 0},
      {"srliw", Fmt::IShift32, 0b0011011, 5, 0}, {"sraiw", Fmt::IShift32, 0b0011011, 5, 0b0100000},
      {"addw", Fmt::R, 0b0111011, 0, 0},    {"subw", Fmt::R, 0b0111011, 0, 0b0100000},
      {"sllw", Fmt::R, 0b0111011, 1, 0},    {"srlw", Fmt::R, 0b0111011, 5, 0},
      {"sraw", Fmt::R, 0b0111011, 5, 0b0100000},
      {"ecall", Fmt::Sys, 0b1110011, 0, 0}, {"ebreak", Fmt::Sys, 0b1110011, 0, 1},
      {"mul", Fmt::R, 0b0110011, 0, 1},     {"mulh", Fmt::R, 0b0110011, 1, 1},
      {"mulhsu", Fmt::R, 0b0110011, 2, 1},  {"mulhu", Fmt::R, 0b0110011, 3, 1},
      {"div", Fmt::R, 0b0110011, 4, 1},     {"divu", Fmt::R, 0b0110011, 5, 1},
      {"rem", Fmt::R, 0b0110011, 6, 1},     {"remu", Fmt::R, 0b0110011, 7, 1},
      {"mulw", Fmt::R, 0b0111011, 0, 1},    {"divw", Fmt::R, 0b0111011, 4, 1},
      {"divuw", Fmt::R, 0b0111011, 5, 1},   {"remw", Fmt::R, 0b0111011, 6, 1},
      {"remuw", Fmt::R, 0b0111011, 7, 1},
  };
  return t;
}

const OpInfo* find(std::string_view name) {
  for (const auto& o : ops())
    if (o.name == name) return &o;
  return nullptr;
}

uint32_t encode(std::string_view name, unsigned rd, unsigned rs1, unsigned rs2, int64_t imm) {
  const OpInfo* o = find(name);
  if (!o) throw std::invalid_argument("unknown op");
  const uint32_t u = static_cast<uint32_t>(imm);
  auto bits = [&](unsigned hi, unsigned lo) { return (u >> lo) & ((1u << (hi - lo + 1)) - 1); };
  switch (o->fmt) {
    case Fmt::R:
      return o->funct7 << 25 | rs2 << 20 | rs1 << 15 | o->funct3 << 12 | rd << 7 | o->opcode;
    case Fmt::I:
      return bits(11, 0) << 20 | rs1 << 15 | o->funct3 << 12 | rd << 7 | o->opcode;
    case Fmt::IShift64:
      return o->funct7 << 26 | bits(5, 0) << 20 | rs1 << 15 | o->funct3 << 12 | rd << 7 | o->opcode;
    case Fmt::IShift32:
      return o->funct7 << 25 | bits(4, 0) << 20 | rs1 << 15 | o->funct3 << 12 | rd << 7 | o->opcode;
    case Fmt::S:
      return bits(11, 5) << 25 | rs2 << 20 | rs1 << 15 | o->funct3 << 12 | bits(4, 0) << 7 | o->opcode;
    case Fmt::B:
      return bits(12, 12) << 31 | bits(10, 5) << 25 | rs2 << 20 | rs1 << 15 | o->funct3 << 12 | bits(4, 1) << 8 |
             bits(11, 11) << 7 | o->opcode;
    case Fmt::U:
      return bits(19, 0) << 12 | rd << 7 | o->opcode;  // imm is the 20-bit operand as written
    case Fmt::J:
      return bits(20, 20) << 31 | bits(10, 1) << 21 | bits(11, 11) << 20 | bits(19, 12) << 12 | rd << 7 | o->opcode;
    case Fmt::Sys:
      return o->funct7 << 20 | o->opcode;
  }
  return 0;
}

}  // namespace ref
