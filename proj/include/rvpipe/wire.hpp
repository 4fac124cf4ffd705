#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rvpipe/assembler.hpp"
#include "rvpipe/diagram.hpp"
#include "rvpipe/history.hpp"
#include "rvpipe/pipeline.hpp"

// JSON shapes shared by the session service and the CLI. Addresses,
// register contents and signal values travel as "0x..." strings so clients
// limited to 53-bit numbers lose nothing.
namespace rvpipe::wire {

using nlohmann::json;

std::string hex(uint64_t v);
/// Accepts "0x..." hex or plain decimal (optionally signed) text.
std::optional<uint64_t> parse_u64(std::string_view text);

json to_json(const Status& s);
json to_json(const Stats& s);
json to_json(const HazardEvent& e);
json to_json(const InstrTag& t);
json to_json(const DatapathSnapshot& s);
json to_json(const AsmDiagnostic& d);
json to_json(const PipelineDiagram& d);
json to_json(const std::vector<MemoryRow>& rows);
json registers(const MachineState& m);
json catalog();

/// `prev_cycle`: cycle shown in the client's previous frame, used to mark
/// which transcript events are new. `high_water`: highest cycle ever
/// reached; events at or below it have been shown before.
json console(const Console& c, uint64_t prev_cycle, uint64_t high_water);

/// One self-contained UI frame.
json state_payload(std::string_view session_id, const HistoryLog& log, uint64_t prev_cycle, uint64_t high_water);

}  // namespace rvpipe::wire
