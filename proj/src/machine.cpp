#include "rvpipe/machine.hpp"

#include <algorithm>
#include <fmt/format.h>

#include "rvpipe/isa.hpp"

namespace rvpipe {

std::string_view segment_name(Segment s) {
  switch (s) {
    case Segment::Text: return "text";
    case Segment::Static: return "static";
    case Segment::Dynamic: return "dynamic";
    case Segment::Stack: return "stack";
  }
  return "?";
}

std::optional<Segment> parse_segment(std::string_view name) {
  for (Segment s : {Segment::Text, Segment::Static, Segment::Dynamic, Segment::Stack})
    if (segment_name(s) == name) return s;
  return std::nullopt;
}

std::string_view fault_kind_name(FaultKind k) {
  switch (k) {
    case FaultKind::Misaligned: return "misaligned";
    case FaultKind::OutOfSegment: return "out-of-segment";
    case FaultKind::WriteToText: return "write-to-text";
  }
  return "?";
}

std::string MemAccessFault::message() const {
  switch (kind) {
    case FaultKind::Misaligned:
      return fmt::format("misaligned {}-byte access at 0x{:016x} (pc 0x{:08x})", width, addr, pc);
    case FaultKind::OutOfSegment:
      return fmt::format("{}-byte access at 0x{:016x} is outside every segment (pc 0x{:08x})", width, addr, pc);
    case FaultKind::WriteToText:
      return fmt::format("write to read-only text segment at 0x{:016x} (pc 0x{:08x})", addr, pc);
  }
  return "memory fault";
}

uint8_t SparseMemory::read_byte(uint64_t addr) const {
  auto it = pages_.find(addr / kPageSize);
  return it == pages_.end() ? 0 : (*it->second)[addr % kPageSize];
}

void SparseMemory::write_byte(uint64_t addr, uint8_t value) {
  auto& page = pages_[addr / kPageSize];
  if (!page) {
    if (value == 0) {
      pages_.erase(addr / kPageSize);
      return;
    }
    page = std::make_shared<Page>();
    page->fill(0);
  } else if (page.use_count() > 1) {
    page = std::make_shared<Page>(*page);
  }
  (*page)[addr % kPageSize] = value;
}

uint64_t SparseMemory::read(uint64_t addr, unsigned width) const {
  uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v |= uint64_t{read_byte(addr + i)} << (8 * i);
  return v;
}

void SparseMemory::write(uint64_t addr, unsigned width, uint64_t value) {
  for (unsigned i = 0; i < width; ++i) write_byte(addr + i, static_cast<uint8_t>(value >> (8 * i)));
}

std::map<uint64_t, uint8_t> SparseMemory::nonzero_bytes() const {
  std::map<uint64_t, uint8_t> out;
  for (const auto& [no, page] : pages_)
    for (uint64_t i = 0; i < kPageSize; ++i)
      if ((*page)[i] != 0) out.emplace(no * kPageSize + i, (*page)[i]);
  return out;
}

bool SparseMemory::operator==(const SparseMemory& other) const {
  auto zero = [](const Page& p) { return std::all_of(p.begin(), p.end(), [](uint8_t b) { return b == 0; }); };
  for (const auto& [no, page] : pages_) {
    auto it = other.pages_.find(no);
    if (it == other.pages_.end()) {
      if (!zero(*page)) return false;
    } else if (page != it->second && *page != *it->second) {
      return false;
    }
  }
  for (const auto& [no, page] : other.pages_)
    if (!pages_.count(no) && !zero(*page)) return false;
  return true;
}

MachineState::MachineState(const SegmentLayout& layout, uint64_t text_end)
    : layout_(layout), text_end_(text_end), heap_break_(layout.heap_base) {
  regs_[2] = layout.stack_top;
  pc = layout.text_base;
}

std::pair<uint64_t, uint64_t> MachineState::segment_bounds(Segment s) const {
  switch (s) {
    case Segment::Text: return {layout_.text_base, text_end_};
    case Segment::Static: return {layout_.static_base, layout_.heap_base};
    case Segment::Dynamic: return {layout_.heap_base, heap_break_};
    case Segment::Stack: return {layout_.stack_floor(), layout_.stack_top};
  }
  return {0, 0};
}

std::optional<Segment> MachineState::segment_of(uint64_t addr, unsigned width) const {
  for (Segment s : {Segment::Text, Segment::Static, Segment::Dynamic, Segment::Stack}) {
    auto [lo, hi] = segment_bounds(s);
    if (addr >= lo && addr < hi && width <= hi - addr) return s;
  }
  return std::nullopt;
}

std::optional<MemAccessFault> MachineState::check(uint64_t addr, unsigned width, bool write) const {
  const auto w = static_cast<uint8_t>(width);
  if (addr % width != 0) return MemAccessFault{FaultKind::Misaligned, addr, w, pc};
  auto seg = segment_of(addr, width);
  if (!seg) return MemAccessFault{FaultKind::OutOfSegment, addr, w, pc};
  if (write && *seg == Segment::Text) return MemAccessFault{FaultKind::WriteToText, addr, w, pc};
  return std::nullopt;
}

MachineState::LoadResult MachineState::load(uint64_t addr, unsigned width, bool sx) const {
  if (auto f = check(addr, width, false)) return {0, f};
  uint64_t v = mem_.read(addr, width);
  if (sx && width < 8) v = static_cast<uint64_t>(sign_extend(v, 8 * width));
  return {v, std::nullopt};
}

std::optional<MemAccessFault> MachineState::store(uint64_t addr, unsigned width, uint64_t value) {
  if (auto f = check(addr, width, true)) return f;
  mem_.write(addr, width, value);
  return std::nullopt;
}

std::vector<MemoryRow> memory_window(const MachineState& state, Segment segment, uint64_t addr,
                                     uint64_t len) {
  if (len == 0) return {};
  if (len > kMaxWindow) throw WindowError(fmt::format("window length {} exceeds {}", len, kMaxWindow));
  auto [lo, hi] = state.segment_bounds(segment);
  if (addr < lo || addr >= hi)
    throw WindowError(fmt::format("address 0x{:x} outside {} segment [0x{:x}, 0x{:x})", addr,
                                  segment_name(segment), lo, hi));
  const uint64_t end = std::min(hi, addr + len);
  const uint64_t row_width = segment == Segment::Text ? 4 : 8;
  std::vector<MemoryRow> rows;
  for (uint64_t a = addr; a < end;) {
    MemoryRow row;
    row.addr = a;
    const uint64_t row_end = std::min(end, a - a % row_width + row_width);
    for (; a < row_end; ++a) row.bytes.push_back(state.memory().read_byte(a));
    if (segment == Segment::Text && row.bytes.size() == 4 && row.addr % 4 == 0) {
      const auto word = static_cast<uint32_t>(state.memory().read(row.addr, 4));
      row.disassembly = disassemble(decode(word, row.addr));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace rvpipe
