#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rvpipe/assembler.hpp"

// Sequential (one instruction at a time) RV64IM interpreter used as the
// architectural oracle for the pipeline. It decodes and executes raw words
// with its own bit slicing, ALU and syscall code; only the segmented memory
// model is borrowed from the simulator.
namespace ref {

enum class End { Drained, Exit, Ebreak, Fault, StepLimit, NeedInput };

struct Event {
  bool out;
  std::string text;
  bool operator==(const Event&) const = default;
};

struct Result {
  std::array<uint64_t, 32> regs{};
  uint64_t pc = 0;
  std::map<uint64_t, uint8_t> memory;  // nonzero bytes
  std::vector<Event> transcript;
  End end = End::Drained;
  int64_t exit_code = 0;
  uint64_t retired = 0;
  uint64_t heap_break = 0;
};

Result run(const rvpipe::ProgramImage& image, const std::vector<std::string>& tape, uint64_t max_steps = 1'000'000);

}  // namespace ref
