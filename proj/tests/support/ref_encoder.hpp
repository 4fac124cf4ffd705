#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Independent RV64IM encoder used as a test oracle. Built straight from the
// ISA manual's opcode map; shares no code or tables with the simulator.
namespace ref {

enum class Fmt { R, I, IShift64, IShift32, S, B, U, J, Sys };

struct OpInfo {
  std::string_view name;
  Fmt fmt;
  uint32_t opcode;
  uint32_t funct3;
  uint32_t funct7;  // R: funct7; shifts: upper bits; Sys: imm12
};

const std::vector<OpInfo>& ops();
const OpInfo* find(std::string_view name);

/// Throws std::invalid_argument for unknown names.
uint32_t encode(std::string_view name, unsigned rd, unsigned rs1, unsigned rs2, int64_t imm);

}  // namespace ref
