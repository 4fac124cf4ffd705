#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rvpipe/assembler.hpp"
#include "rvpipe/isa.hpp"
#include "rvpipe/machine.hpp"
#include "rvpipe/syscall.hpp"

namespace rvpipe {

struct SimOptions {
  bool forwarding = true;
  uint64_t max_cycles = 10000;
  bool operator==(const SimOptions&) const = default;
};

enum class Stage : uint8_t { IF, ID, EX, MEM, WB };
inline constexpr std::array kStages = {Stage::IF, Stage::ID, Stage::EX, Stage::MEM, Stage::WB};
std::string_view stage_name(Stage s);

inline constexpr unsigned kColorCount = 8;

struct InstrTag {
  uint64_t seq = 0;  // dynamic fetch order, starting at 0
  uint64_t addr = 0;
  uint8_t color = 0;
  bool operator==(const InstrTag&) const = default;
};

/// A dynamic instruction sitting in a stage, carrying every value the
/// stages before it produced (i.e. the contents of the latch it came from).
struct InFlight {
  InstrTag tag;
  Instruction instr;
  // ID: register file read ports.
  uint64_t rs1_value = 0;
  uint64_t rs2_value = 0;
  // EX: ALU operands after the forwarding muxes, and the result.
  uint64_t operand_a = 0;
  uint64_t operand_b = 0;
  SemanticResult sem;
  // MEM: loaded data.
  uint64_t mem_data = 0;

  /// Value headed for rd (alu_out, or the loaded data for loads).
  uint64_t result() const;
  bool operator==(const InFlight&) const = default;
};

enum class ForwardSource : uint8_t { Register, ExMem, MemWb };
std::string_view forward_source_name(ForwardSource s);

enum class HazardKind : uint8_t { RawStall, LoadUseStall, ControlFlush };
std::string_view hazard_kind_name(HazardKind k);

struct HazardEvent {
  uint64_t cycle = 0;
  HazardKind kind = HazardKind::RawStall;
  std::optional<InstrTag> consumer;  // stalls only
  InstrTag producer;                 // for flushes: the redirecting instruction
  Stage stage = Stage::ID;
  std::vector<uint8_t> registers;
  bool operator==(const HazardEvent&) const = default;
};

enum class RunState : uint8_t { Running, AwaitingInput, Halted, Faulted };
enum class HaltReason : uint8_t { None, Drained, Exit, Ebreak, CycleLimit };
std::string_view run_state_name(RunState s);
std::string_view halt_reason_name(HaltReason r);

struct SimFault {
  std::string kind;  // "misaligned", "out-of-segment", "write-to-text", "illegal-instruction", "syscall"
  std::string message;
  uint64_t pc = 0;
  Stage stage = Stage::ID;
  bool operator==(const SimFault&) const = default;
};

struct Status {
  RunState state = RunState::Running;
  HaltReason reason = HaltReason::None;
  int64_t exit_code = 0;
  std::optional<SimFault> fault;
  bool operator==(const Status&) const = default;
};

/// What the datapath did during the most recent cycle. Everything the
/// snapshot reports that is not already in the stage slots lives here.
struct CycleActivity {
  bool stall = false;               // hazard unit fired: IF and ID hold next cycle
  std::optional<uint64_t> redirect; // MEM resolved a taken control transfer
  ForwardSource forward_a = ForwardSource::Register;
  ForwardSource forward_b = ForwardSource::Register;
  bool fetched = false;
  bool reg_write = false;
  uint8_t write_reg = 0;
  uint64_t write_data = 0;
  bool retired = false;
  std::vector<HazardEvent> events;
  std::vector<InstrTag> squashed;  // occupants cancelled this cycle
  bool operator==(const CycleActivity&) const = default;
};

struct PipelineState {
  uint64_t cycle = 0;
  std::array<std::optional<InFlight>, 5> slots;  // indexed by Stage; empty = bubble
  uint64_t fetch_pc = 0;
  uint64_t next_seq = 0;
  Status status;
  CycleActivity activity;

  const std::optional<InFlight>& slot(Stage s) const { return slots[static_cast<size_t>(s)]; }
  std::optional<InFlight>& slot(Stage s) { return slots[static_cast<size_t>(s)]; }
  bool operator==(const PipelineState&) const = default;
};

struct Stats {
  uint64_t cycles = 0;
  uint64_t retired = 0;
  uint64_t raw_stalls = 0;
  uint64_t load_use_stalls = 0;
  uint64_t flushes = 0;

  uint64_t stalls() const { return raw_stalls + load_use_stalls; }
  uint64_t flush_bubbles() const { return 3 * flushes; }
  double cpi() const { return retired ? static_cast<double>(cycles) / static_cast<double>(retired) : 0.0; }
  bool operator==(const Stats&) const = default;
};

struct SimState {
  std::shared_ptr<const ProgramImage> image;
  SimOptions options;
  MachineState machine;
  PipelineState pipe;
  Console console;
  Stats stats;

  uint64_t cycle() const { return pipe.cycle; }
  const Status& status() const { return pipe.status; }
  bool running() const { return pipe.status.state == RunState::Running; }
  bool operator==(const SimState&) const = default;
};

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cycle 0: every stage holds a bubble, registers are zero except sp.
/// Throws SimError for an image with no text.
SimState init(std::shared_ptr<const ProgramImage> image, const SimOptions& options = {});

/// Advances one clock. If the instruction committing this cycle is a read
/// syscall and the tape has no unread entry, the cycle does not happen: the
/// returned state is the input state with status AwaitingInput.
SimState step(const SimState& state, const InputTape& tape);

/// Completes a pending read: on valid text the entry is appended to the tape
/// and the blocked cycle runs. Invalid text is logged as a rejected input and
/// the state keeps waiting. Throws SimError when no input is pending.
struct InputOutcome {
  bool accepted = false;
  std::string error;
};
InputOutcome provide_input(SimState& state, InputTape& tape, std::string_view text);

// Hazard detection unit, as a pure function of what sits in EX and MEM.
struct ProducerView {
  std::optional<InstrTag> tag;  // empty = bubble
  Instruction instr;
};

struct HazardDecision {
  bool stall = false;
  std::vector<HazardEvent> events;
};

HazardDecision hazard_check(const Instruction& id_instr, const InstrTag& id_tag, const ProducerView& ex,
                            const ProducerView& mem, bool forwarding, uint64_t cycle);

struct LatchView {
  bool reg_write = false;
  uint8_t rd = 0;
};

struct ForwardSelection {
  ForwardSource a = ForwardSource::Register;
  ForwardSource b = ForwardSource::Register;
};

ForwardSelection forward_select(const Instruction& ex_instr, const LatchView& ex_mem, const LatchView& mem_wb);

// ---- Introspection -------------------------------------------------------

struct Signal {
  std::string_view name;
  uint64_t value = 0;
  bool boolean = false;
  bool operator==(const Signal&) const = default;
};

struct Component {
  std::string_view id;
  std::string_view label;
  Stage stage;
  std::string_view description;
  std::vector<Signal> signals;
  bool operator==(const Component&) const = default;
};

struct StageOccupant {
  InstrTag tag;
  std::string text;
  int source_line = 0;
  bool operator==(const StageOccupant&) const = default;
};

struct ForwardPath {
  ForwardSource source;  // ExMem or MemWb
  char operand;          // 'a' or 'b'
  uint8_t reg;
  bool operator==(const ForwardPath&) const = default;
};

struct DatapathSnapshot {
  uint64_t cycle = 0;
  bool forwarding = true;
  std::array<std::optional<StageOccupant>, 5> stages;
  std::vector<Component> components;
  std::vector<ForwardPath> forward_paths;
  std::vector<HazardEvent> hazards;
  std::vector<InstrTag> squashed;
  bool operator==(const DatapathSnapshot&) const = default;
};

DatapathSnapshot snapshot(const SimState& state);

/// Component ids present for the given mode, in drawing order.
std::vector<std::string_view> component_ids(bool forwarding);

// ---- Batch running -------------------------------------------------------

struct RunLimit {
  std::optional<uint64_t> until_cycle;
};

struct RunReport {
  std::vector<DatapathSnapshot> trace;  // cycle 0 first, when requested
  Stats stats;
};

/// Steps until the status leaves Running (halt, fault, awaiting input,
/// cycle limit) or `limit.until_cycle` is reached.
RunReport run(SimState& state, const InputTape& tape, const RunLimit& limit = {}, bool keep_trace = false);

}  // namespace rvpipe
