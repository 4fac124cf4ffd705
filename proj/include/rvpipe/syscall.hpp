#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvpipe/machine.hpp"

namespace rvpipe {

// Codes follow the common educational convention (SPIM/RARS numbering).
enum class SyscallKind : uint8_t {
  PrintInt = 1,
  PrintString = 4,
  ReadInt = 5,
  ReadString = 8,
  Sbrk = 9,
  Exit = 10,
  PrintChar = 11,
  ReadChar = 12,
  Exit2 = 17,
};

std::optional<SyscallKind> syscall_kind(uint64_t code);
std::string_view syscall_name(SyscallKind kind);
bool is_read_kind(SyscallKind kind);

struct SyscallRequest {
  uint64_t code = 0;  // a7
  uint64_t a0 = 0;
  uint64_t a1 = 0;
  std::optional<SyscallKind> kind;  // empty for unsupported codes
};

SyscallRequest make_request(const MachineState& machine);

enum class Direction : uint8_t { Out, In };

struct ConsoleEvent {
  Direction direction = Direction::Out;
  std::string text;
  uint64_t cycle = 0;
  bool operator==(const ConsoleEvent&) const = default;
};

/// Append-only event list with structural sharing: copying a transcript is
/// O(1) and every copy is immutable history as far as its owner can tell.
class Transcript {
 public:
  void push(ConsoleEvent ev);
  size_t size() const { return head_ ? head_->count : 0; }
  std::vector<ConsoleEvent> events() const;
  std::string output_text() const;  // concatenated out-events

  bool operator==(const Transcript& other) const;

 private:
  struct Node {
    ConsoleEvent event;
    std::shared_ptr<const Node> prev;
    size_t count;
  };
  std::shared_ptr<const Node> head_;
};

struct PendingPrompt {
  SyscallKind kind;
  uint64_t cycle;
  std::vector<std::string> rejected;  // inputs that failed to parse; the prompt stays open
  bool operator==(const PendingPrompt&) const = default;
};

struct Console {
  Transcript transcript;
  std::optional<PendingPrompt> pending;
  size_t tape_pos = 0;  // inputs consumed so far
  bool operator==(const Console&) const = default;
};

using InputTape = std::vector<std::string>;

struct SyscallEffect {
  enum class Kind : uint8_t { Continue, NeedInput, Halt, Fault };
  Kind kind = Kind::Continue;
  int64_t exit_code = 0;
  std::string fault_message;
  std::optional<MemAccessFault> mem_fault;
};

/// Executes a syscall at commit. Read kinds consume the next tape entry, or
/// report NeedInput (and leave all state untouched) when the tape is exhausted.
SyscallEffect dispatch(MachineState& machine, Console& console, const SyscallRequest& request,
                       const InputTape& tape, uint64_t cycle);

/// Checks console text against what a read syscall accepts. On success
/// returns the text as it will be stored on the tape (trailing newline removed).
struct InputCheck {
  bool ok = false;
  std::string normalized;
  std::string error;
};

InputCheck validate_input(SyscallKind kind, std::string_view text);

}  // namespace rvpipe
