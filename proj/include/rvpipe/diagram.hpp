#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvpipe/pipeline.hpp"

namespace rvpipe {

enum class CellKind : uint8_t {
  Empty,
  Stage,   // first cycle in a stage
  Held,    // stalled: same stage as the previous cycle ("ID*")
  Bubble,  // squashed during this cycle
};

struct Cell {
  CellKind kind = CellKind::Empty;
  Stage stage = Stage::IF;
  bool operator==(const Cell&) const = default;
};

struct DiagramRow {
  uint64_t seq = 0;
  uint64_t addr = 0;
  std::string text;
  int source_line = 0;
  uint64_t first_column = 1;  // cycle of cells[0]
  std::vector<Cell> cells;    // consecutive cycles

  bool flushed() const { return !cells.empty() && cells.back().kind == CellKind::Bubble; }
  uint64_t last_column() const { return first_column + cells.size() - 1; }
  bool operator==(const DiagramRow&) const = default;
};

/// A collapsed run of identical loop iterations: rows [first_row, first_row +
/// rows_per_iter) stand for `count` iterations, each `stride` cycles apart.
struct SquashBlock {
  size_t first_row = 0;
  size_t rows_per_iter = 0;
  size_t count = 0;
  uint64_t stride = 0;
  bool operator==(const SquashBlock&) const = default;
};

enum class DiagramMode : uint8_t { Full, Squashed };

struct PipelineDiagram {
  DiagramMode mode = DiagramMode::Full;
  uint64_t columns = 0;
  std::vector<DiagramRow> rows;
  std::vector<SquashBlock> blocks;
  bool operator==(const PipelineDiagram&) const = default;
};

class DiagramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full diagram from a snapshot stream (cycle 0 entries are ignored).
PipelineDiagram build_diagram(const std::vector<DatapathSnapshot>& trace);

/// Empty when the diagram is well formed, else one message per violation.
std::vector<std::string> check_invariants(const PipelineDiagram& d);

PipelineDiagram squash(const PipelineDiagram& full);
PipelineDiagram expand(const PipelineDiagram& squashed);

/// Legend: "IF".."WB", held "ID*", squashed "◦" (text) / "o" (CSV), with a
/// trailing '*' when the squashed cycle was itself a held one.
std::string cell_code(const DiagramRow& row, size_t index, bool csv);
std::string row_label(const DiagramRow& r);

std::string render_text(const PipelineDiagram& d, size_t width = 120);
std::string render_csv(const PipelineDiagram& d);
/// Inverse of render_csv. Throws DiagramError on malformed input.
PipelineDiagram parse_csv(std::string_view csv);

}  // namespace rvpipe
