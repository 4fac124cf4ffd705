#include "rvpipe/history.hpp"

#include <fmt/format.h>

namespace rvpipe {

std::string_view history_error_name(HistoryError::Code c) {
  switch (c) {
    case HistoryError::Code::AtCycleZero: return "at-cycle-zero";
    case HistoryError::Code::OutOfOrder: return "out-of-order";
    case HistoryError::Code::BeyondLimit: return "beyond-max-cycles";
    case HistoryError::Code::NotRecorded: return "not-recorded";
    case HistoryError::Code::NotRunning: return "not-running";
    case HistoryError::Code::AwaitingInput: return "awaiting-input";
  }
  return "?";
}

HistoryLog::HistoryLog(SimState initial, InputTape tape) : tape_(std::move(tape)) {
  record(initial.cycle(), std::move(initial));
}

void HistoryLog::record(uint64_t cycle, SimState sim) {
  if (sim.cycle() != cycle)
    throw HistoryError(HistoryError::Code::OutOfOrder,
                       fmt::format("state is at cycle {}, not {}", sim.cycle(), cycle));
  if (cycle > sim.options.max_cycles)
    throw HistoryError(HistoryError::Code::BeyondLimit,
                       fmt::format("cycle {} exceeds the limit of {}", cycle, sim.options.max_cycles));
  if (cycle == 0) {
    states_.clear();
  } else if (states_.empty() || cycle != latest() + 1) {
    throw HistoryError(HistoryError::Code::OutOfOrder,
                       fmt::format("expected cycle {}, got {}", states_.empty() ? 0 : latest() + 1, cycle));
  }
  states_.push_back(std::move(sim));
  cursor_ = cycle;
  blocked_.reset();
}

const SimState& HistoryLog::at(uint64_t cycle) const {
  if (cycle > latest())
    throw HistoryError(HistoryError::Code::NotRecorded,
                       fmt::format("cycle {} has not been reached (latest is {})", cycle, latest()));
  return states_[cycle];
}

const SimState& HistoryLog::restore(uint64_t cycle) {
  at(cycle);
  cursor_ = cycle;
  blocked_.reset();
  return states_[cycle];
}

const SimState& HistoryLog::step() {
  if (blocked_) throw HistoryError(HistoryError::Code::AwaitingInput, "console input is pending");
  const SimState& cur = states_[cursor_];
  if (!cur.running())
    throw HistoryError(HistoryError::Code::NotRunning,
                       fmt::format("simulation is {}", run_state_name(cur.status().state)));
  SimState next = rvpipe::step(cur, tape_);
  if (next.cycle() == cur.cycle()) {
    blocked_ = std::move(next);
    return *blocked_;
  }
  if (cursor_ < latest() && states_[cursor_ + 1] == next) {
    ++cursor_;
    return states_[cursor_];
  }
  states_.resize(cursor_ + 1);
  record(next.cycle(), std::move(next));
  return states_[cursor_];
}

const SimState& HistoryLog::step_back() {
  if (cursor_ == 0 && !blocked_) throw HistoryError(HistoryError::Code::AtCycleZero, "already at cycle 0");
  if (blocked_) {
    // The blocked cycle never happened; undo the prompt first.
    blocked_.reset();
    if (cursor_ == 0) return states_[0];
  }
  --cursor_;
  return states_[cursor_];
}

InputOutcome HistoryLog::provide_input(std::string_view text) {
  if (!blocked_) throw HistoryError(HistoryError::Code::NotRunning, "no console input is pending");
  SimState s = *blocked_;
  InputOutcome out = rvpipe::provide_input(s, tape_, text);
  if (!out.accepted) {
    blocked_ = std::move(s);
    return out;
  }
  blocked_.reset();
  states_.resize(cursor_ + 1);
  record(s.cycle(), std::move(s));
  return out;
}

}  // namespace rvpipe
