#include "rvpipe/diagram.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace rvpipe {
namespace {

size_t sidx(Stage s) { return static_cast<size_t>(s); }

struct Segment {
  size_t begin;
  size_t end;
};

std::vector<Segment> iterations(const std::vector<DiagramRow>& rows) {
  std::vector<Segment> segs;
  std::optional<uint64_t> prev_addr;
  size_t begin = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].flushed()) continue;
    if (prev_addr && rows[i].addr <= *prev_addr && i > begin) {
      segs.push_back({begin, i});
      begin = i;
    }
    prev_addr = rows[i].addr;
  }
  if (begin < rows.size()) segs.push_back({begin, rows.size()});
  return segs;
}

bool same_pattern(const std::vector<DiagramRow>& rows, Segment a, Segment b) {
  if (a.end - a.begin != b.end - b.begin) return false;
  const uint64_t aa = rows[a.begin].first_column;
  const uint64_t ba = rows[b.begin].first_column;
  for (size_t k = 0; k < a.end - a.begin; ++k) {
    const DiagramRow& x = rows[a.begin + k];
    const DiagramRow& y = rows[b.begin + k];
    if (x.addr != y.addr || x.text != y.text || x.source_line != y.source_line || x.cells != y.cells ||
        x.first_column - aa != y.first_column - ba)
      return false;
  }
  return true;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw DiagramError("unterminated quoted field");
  out.push_back(std::move(cur));
  return out;
}

std::optional<Stage> stage_from(std::string_view s) {
  for (Stage st : kStages)
    if (stage_name(st) == s) return st;
  return std::nullopt;
}

// Seqs in a squashed diagram skip the iterations folded into each block.
void assign_seqs(PipelineDiagram& d) {
  uint64_t seq = 0;
  size_t b = 0;
  for (size_t i = 0; i < d.rows.size(); ++i) {
    d.rows[i].seq = seq++;
    if (b < d.blocks.size() && i + 1 == d.blocks[b].first_row + d.blocks[b].rows_per_iter) {
      seq += (d.blocks[b].count - 1) * d.blocks[b].rows_per_iter;
      ++b;
    }
  }
}

}  // namespace

PipelineDiagram build_diagram(const std::vector<DatapathSnapshot>& trace) {
  std::map<uint64_t, DiagramRow> rows;
  PipelineDiagram d;
  for (const DatapathSnapshot& snap : trace) {
    if (snap.cycle == 0) continue;
    d.columns = std::max(d.columns, snap.cycle);
    for (Stage st : kStages) {
      const auto& occ = snap.stages[sidx(st)];
      if (!occ) continue;
      auto [it, fresh] = rows.try_emplace(occ->tag.seq);
      DiagramRow& r = it->second;
      if (fresh) {
        r.seq = occ->tag.seq;
        r.addr = occ->tag.addr;
        r.text = occ->text;
        r.source_line = occ->source_line;
        r.first_column = snap.cycle;
      }
      const bool squashed = std::any_of(snap.squashed.begin(), snap.squashed.end(),
                                        [&](const InstrTag& t) { return t.seq == occ->tag.seq; });
      Cell c{CellKind::Stage, st};
      if (squashed) c.kind = CellKind::Bubble;
      else if (!r.cells.empty() && r.cells.back().stage == st) c.kind = CellKind::Held;
      r.cells.push_back(c);
    }
  }
  for (auto& [seq, r] : rows) d.rows.push_back(std::move(r));
  return d;
}

std::vector<std::string> check_invariants(const PipelineDiagram& d) {
  std::vector<std::string> errs;
  std::map<std::pair<uint64_t, Stage>, size_t> owner;
  for (size_t i = 0; i < d.rows.size(); ++i) {
    const DiagramRow& r = d.rows[i];
    if (r.cells.empty()) {
      errs.push_back(fmt::format("row {} has no cells", i));
      continue;
    }
    if (r.first_column < 1 || r.last_column() > d.columns)
      errs.push_back(fmt::format("row {} spans columns outside 1..{}", i, d.columns));
    for (size_t k = 0; k < r.cells.size(); ++k) {
      const Cell& c = r.cells[k];
      const uint64_t col = r.first_column + k;
      if (c.kind == CellKind::Empty) errs.push_back(fmt::format("row {} has a gap at column {}", i, col));
      if (c.kind == CellKind::Bubble && k + 1 != r.cells.size())
        errs.push_back(fmt::format("row {} continues after being flushed", i));
      if (k == 0) {
        if (c.stage != Stage::IF || c.kind == CellKind::Held) errs.push_back(fmt::format("row {} does not start in IF", i));
      } else {
        const Stage prev = r.cells[k - 1].stage;
        const bool held = c.kind == CellKind::Held;
        const bool ok = held ? c.stage == prev
                             : sidx(c.stage) == sidx(prev) + 1 || (c.kind == CellKind::Bubble && c.stage == prev);
        if (!ok) errs.push_back(fmt::format("row {} moves {} -> {} at column {}", i, stage_name(prev), stage_name(c.stage), col));
      }
      if (c.kind != CellKind::Empty) {
        auto [it, fresh] = owner.try_emplace({col, c.stage}, i);
        if (!fresh && d.mode == DiagramMode::Full)
          errs.push_back(fmt::format("column {} has {} in rows {} and {}", col, stage_name(c.stage), it->second, i));
      }
    }
  }
  return errs;
}

PipelineDiagram squash(const PipelineDiagram& full) {
  if (full.mode != DiagramMode::Full) throw DiagramError("diagram is already squashed");
  PipelineDiagram out;
  out.mode = DiagramMode::Squashed;
  const auto& rows = full.rows;
  const auto segs = iterations(rows);
  uint64_t shift = 0;
  auto emit = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      DiagramRow r = rows[i];
      r.first_column -= shift;
      out.rows.push_back(std::move(r));
    }
  };
  size_t i = 0;
  while (i < segs.size()) {
    size_t j = i + 1;
    uint64_t stride = 0;
    while (j < segs.size() && same_pattern(rows, segs[i], segs[j])) {
      const uint64_t s = rows[segs[j].begin].first_column - rows[segs[j - 1].begin].first_column;
      if (j == i + 1) stride = s;
      else if (s != stride) break;
      ++j;
    }
    const size_t count = j - i;
    if (count >= 2) {
      out.blocks.push_back(SquashBlock{out.rows.size(), segs[i].end - segs[i].begin, count, stride});
      emit(segs[i].begin, segs[i].end);
      shift += (count - 1) * stride;
      i = j;
    } else {
      emit(segs[i].begin, segs[i].end);
      ++i;
    }
  }
  out.columns = full.columns - shift;
  return out;
}

PipelineDiagram expand(const PipelineDiagram& sq) {
  if (sq.mode == DiagramMode::Full) return sq;
  PipelineDiagram out;
  uint64_t shift = 0;
  size_t b = 0;
  for (size_t i = 0; i < sq.rows.size();) {
    if (b < sq.blocks.size() && sq.blocks[b].first_row == i) {
      const SquashBlock& blk = sq.blocks[b];
      for (size_t j = 0; j < blk.count; ++j) {
        for (size_t k = 0; k < blk.rows_per_iter; ++k) {
          DiagramRow r = sq.rows[i + k];
          r.first_column += shift + j * blk.stride;
          r.seq += j * blk.rows_per_iter;
          out.rows.push_back(std::move(r));
        }
      }
      shift += (blk.count - 1) * blk.stride;
      i += blk.rows_per_iter;
      ++b;
    } else {
      DiagramRow r = sq.rows[i];
      r.first_column += shift;
      out.rows.push_back(std::move(r));
      ++i;
    }
  }
  out.columns = sq.columns + shift;
  return out;
}

std::string cell_code(const DiagramRow& r, size_t k, bool csv) {
  const Cell& c = r.cells[k];
  switch (c.kind) {
    case CellKind::Empty: return "";
    case CellKind::Stage: return std::string(stage_name(c.stage));
    case CellKind::Held: return std::string(stage_name(c.stage)) + "*";
    case CellKind::Bubble: {
      const bool held = k > 0 && r.cells[k - 1].stage == c.stage;
      return std::string(csv ? "o" : "◦") + (held ? "*" : "");
    }
  }
  return "";
}

std::string row_label(const DiagramRow& r) {
  std::string s = fmt::format("0x{:08x}: {}", r.addr, r.text);
  if (r.source_line > 0) s += fmt::format("  # line {}", r.source_line);
  return s;
}

std::string render_text(const PipelineDiagram& d, size_t width) {
  constexpr size_t kCell = 5;
  size_t label_w = 5;
  for (const auto& r : d.rows) label_w = std::max(label_w, row_label(r).size());
  label_w = std::min<size_t>(label_w, 48);
  const size_t per_chunk = std::max<size_t>(1, width > label_w + 2 ? (width - label_w - 2) / kCell : 1);

  std::map<size_t, const SquashBlock*> block_end;
  for (const auto& b : d.blocks) block_end[b.first_row + b.rows_per_iter - 1] = &b;

  std::string out;
  for (uint64_t c0 = 1; c0 <= std::max<uint64_t>(d.columns, 1); c0 += per_chunk) {
    const uint64_t c1 = std::min<uint64_t>(d.columns, c0 + per_chunk - 1);
    if (c0 > 1) out += '\n';
    out += fmt::format("{:<{}}  ", "", label_w);
    for (uint64_t c = c0; c <= c1; ++c) out += fmt::format("{:<{}}", c, kCell);
    out += '\n';
    bool block_seen = false;  // some row of the current block is in this chunk
    for (size_t i = 0; i < d.rows.size(); ++i) {
      const DiagramRow& r = d.rows[i];
      if (std::any_of(d.blocks.begin(), d.blocks.end(), [&](const SquashBlock& b) { return b.first_row == i; }))
        block_seen = false;
      if (r.first_column <= c1 && r.last_column() >= c0) {
        block_seen = true;
        std::string label = row_label(r);
        if (label.size() > label_w) label = label.substr(0, label_w - 1) + "~";
        std::string line = fmt::format("{:<{}}  ", label, label_w);
        for (uint64_t c = c0; c <= c1; ++c) {
          std::string code;
          if (c >= r.first_column && c <= r.last_column()) code = cell_code(r, c - r.first_column, false);
          // the bubble glyph is one column wide but three bytes long
          const size_t vis = code.starts_with("◦") ? code.size() - 2 : code.size();
          line += code + std::string(kCell - std::min(vis, kCell), ' ');
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
      }
      if (auto it = block_end.find(i); it != block_end.end()) {
        const SquashBlock& blk = *it->second;
        if (block_seen)
          out += fmt::format("{:<{}}  × {}  (rows {}-{} repeat every {} cycles)\n", "", label_w, blk.count,
                             blk.first_row + 1, blk.first_row + blk.rows_per_iter, blk.stride);
      }
    }
    if (c1 >= d.columns) break;
  }
  return out;
}

std::string render_csv(const PipelineDiagram& d) {
  std::string out = "instr";
  for (uint64_t c = 1; c <= d.columns; ++c) out += fmt::format(",{}", c);
  out += '\n';
  if (d.mode == DiagramMode::Squashed) out += "# mode squashed\n";
  for (const auto& b : d.blocks)
    out += fmt::format("# squash first_row={} rows={} count={} stride={}\n", b.first_row, b.rows_per_iter, b.count, b.stride);
  for (const auto& r : d.rows) {
    out += csv_field(row_label(r));
    for (uint64_t c = 1; c <= d.columns; ++c) {
      out += ',';
      if (c >= r.first_column && c <= r.last_column()) out += cell_code(r, c - r.first_column, true);
    }
    out += '\n';
  }
  return out;
}

PipelineDiagram parse_csv(std::string_view csv) {
  PipelineDiagram d;
  std::istringstream in{std::string(csv)};
  std::string line;
  if (!std::getline(in, line)) throw DiagramError("empty CSV");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "instr") throw DiagramError("header must start with 'instr'");
  d.columns = header.size() - 1;
  for (uint64_t c = 1; c <= d.columns; ++c)
    if (header[c] != std::to_string(c)) throw DiagramError(fmt::format("bad header column '{}'", header[c]));
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      SquashBlock b;
      if (line == "# mode squashed") {
        d.mode = DiagramMode::Squashed;
      } else if (std::sscanf(line.c_str(), "# squash first_row=%zu rows=%zu count=%zu stride=%lu", &b.first_row,
                             &b.rows_per_iter, &b.count, &b.stride) == 4) {
        d.blocks.push_back(b);
      } else {
        throw DiagramError(fmt::format("line {}: unknown annotation", lineno));
      }
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != d.columns + 1) throw DiagramError(fmt::format("line {}: expected {} fields", lineno, d.columns + 1));
    DiagramRow r;
    std::string_view label = f[0];
    unsigned long long addr = 0;
    int consumed = 0;
    if (std::sscanf(f[0].c_str(), "0x%llx: %n", &addr, &consumed) < 1 || consumed == 0)
      throw DiagramError(fmt::format("line {}: bad instruction label", lineno));
    r.addr = addr;
    label.remove_prefix(consumed);
    if (const size_t p = label.rfind("  # line "); p != std::string_view::npos) {
      r.source_line = std::stoi(std::string(label.substr(p + 9)));
      label = label.substr(0, p);
    }
    r.text = std::string(label);
    std::optional<uint64_t> first, last;
    for (uint64_t c = 1; c <= d.columns; ++c) {
      const std::string& code = f[c];
      if (code.empty()) {
        if (first && !last) last = c - 1;
        continue;
      }
      if (last) throw DiagramError(fmt::format("line {}: gap in row", lineno));
      if (!first) first = c;
      Cell cell;
      if (code == "o" || code == "o*") {
        cell.kind = CellKind::Bubble;
        if (!r.cells.empty()) {
          const Stage prev = r.cells.back().stage;
          if (code == "o" && prev == Stage::WB) throw DiagramError(fmt::format("line {}: bubble after WB", lineno));
          cell.stage = code == "o*" ? prev : static_cast<Stage>(sidx(prev) + 1);
        }
      } else if (code.back() == '*') {
        auto st = stage_from(std::string_view(code).substr(0, code.size() - 1));
        if (!st) throw DiagramError(fmt::format("line {}: unknown cell '{}'", lineno, code));
        cell = {CellKind::Held, *st};
      } else {
        auto st = stage_from(code);
        if (!st) throw DiagramError(fmt::format("line {}: unknown cell '{}'", lineno, code));
        cell = {CellKind::Stage, *st};
      }
      r.cells.push_back(cell);
    }
    if (!first) throw DiagramError(fmt::format("line {}: row has no cells", lineno));
    r.first_column = *first;
    d.rows.push_back(std::move(r));
  }
  assign_seqs(d);
  return d;
}

}  // namespace rvpipe
