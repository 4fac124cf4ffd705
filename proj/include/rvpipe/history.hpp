#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "rvpipe/pipeline.hpp"

namespace rvpipe {

class HistoryError : public std::runtime_error {
 public:
  enum class Code : uint8_t { AtCycleZero, OutOfOrder, BeyondLimit, NotRecorded, NotRunning, AwaitingInput };
  HistoryError(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

std::string_view history_error_name(HistoryError::Code c);

/// Every cycle of one run, from 0 up to the latest cycle reached, plus the
/// console input tape. Moving the cursor never loses recorded cycles; stepping
/// forward from an earlier cycle reuses the recorded successor when the
/// re-executed state matches it.
class HistoryLog {
 public:
  explicit HistoryLog(SimState initial, InputTape tape = {});

  /// Appends `sim` as cycle `cycle`. Cycle 0 restarts the log.
  void record(uint64_t cycle, SimState sim);

  const SimState& current() const { return blocked_ ? *blocked_ : states_[cursor_]; }
  const SimState& at(uint64_t cycle) const;
  const SimState& restore(uint64_t cycle);

  const SimState& step();
  const SimState& step_back();
  InputOutcome provide_input(std::string_view text);

  uint64_t cursor() const { return cursor_; }
  uint64_t latest() const { return states_.size() - 1; }
  const InputTape& tape() const { return tape_; }

 private:
  std::vector<SimState> states_;
  std::optional<SimState> blocked_;  // current cycle's state while waiting for console input
  uint64_t cursor_ = 0;
  InputTape tape_;
};

}  // namespace rvpipe
