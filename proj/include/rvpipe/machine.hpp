#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rvpipe {

/// Where the segments live. Defaults follow the usual classroom simulator
/// convention; every base is configurable.
struct SegmentLayout {
  uint64_t text_base = 0x00400000;
  uint64_t static_base = 0x10010000;
  uint64_t heap_base = 0x10040000;
  uint64_t stack_top = 0x7FFFFFF0;  // initial sp
  uint64_t stack_size = 1u << 20;

  uint64_t stack_floor() const { return stack_top - stack_size; }
  bool operator==(const SegmentLayout&) const = default;
};

enum class Segment : uint8_t { Text, Static, Dynamic, Stack };

std::string_view segment_name(Segment s);
std::optional<Segment> parse_segment(std::string_view name);

enum class FaultKind : uint8_t { Misaligned, OutOfSegment, WriteToText };

std::string_view fault_kind_name(FaultKind k);

struct MemAccessFault {
  FaultKind kind;
  uint64_t addr = 0;
  uint8_t width = 0;
  uint64_t pc = 0;

  std::string message() const;
  bool operator==(const MemAccessFault&) const = default;
};

/// Sparse little-endian byte store over 4 KiB pages. Copies share pages
/// and clone one only on the first write after a copy, so snapshotting a
/// whole machine costs one map copy.
class SparseMemory {
 public:
  static constexpr uint64_t kPageSize = 4096;

  uint8_t read_byte(uint64_t addr) const;
  void write_byte(uint64_t addr, uint8_t value);
  uint64_t read(uint64_t addr, unsigned width) const;
  void write(uint64_t addr, unsigned width, uint64_t value);

  /// Every nonzero byte, keyed by address.
  std::map<uint64_t, uint8_t> nonzero_bytes() const;
  size_t page_count() const { return pages_.size(); }

  bool operator==(const SparseMemory& other) const;

 private:
  using Page = std::array<uint8_t, kPageSize>;
  std::map<uint64_t, std::shared_ptr<Page>> pages_;
};

class MachineState {
 public:
  MachineState() = default;
  MachineState(const SegmentLayout& layout, uint64_t text_end);

  uint64_t read_reg(unsigned idx) const { return regs_.at(idx); }
  void write_reg(unsigned idx, uint64_t value) {
    if (idx != 0) regs_.at(idx) = value;
  }
  const std::array<uint64_t, 32>& regs() const { return regs_; }

  uint64_t pc = 0;

  struct LoadResult {
    uint64_t value = 0;
    std::optional<MemAccessFault> fault;
  };

  LoadResult load(uint64_t addr, unsigned width, bool sign_extend) const;
  std::optional<MemAccessFault> store(uint64_t addr, unsigned width, uint64_t value);

  /// Writes bypassing the text write-protection (program loading only).
  void load_image_bytes(uint64_t addr, uint8_t value) { mem_.write_byte(addr, value); }

  /// Segment containing [addr, addr + width), if any.
  std::optional<Segment> segment_of(uint64_t addr, unsigned width = 1) const;
  /// Half-open address range currently covered by a segment.
  std::pair<uint64_t, uint64_t> segment_bounds(Segment s) const;

  uint64_t heap_break() const { return heap_break_; }
  void set_heap_break(uint64_t b) { heap_break_ = b; }
  const SegmentLayout& layout() const { return layout_; }
  uint64_t text_end() const { return text_end_; }
  const SparseMemory& memory() const { return mem_; }

  bool operator==(const MachineState&) const = default;

 private:
  std::optional<MemAccessFault> check(uint64_t addr, unsigned width, bool write) const;

  std::array<uint64_t, 32> regs_{};
  SparseMemory mem_;
  SegmentLayout layout_;
  uint64_t text_end_ = 0;
  uint64_t heap_break_ = 0;
};

struct MemoryRow {
  uint64_t addr = 0;
  std::vector<uint8_t> bytes;
  std::optional<std::string> disassembly;  // text segment only
};

inline constexpr uint64_t kMaxWindow = 4096;

class WindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows of 4 bytes (text, with disassembly) or 8 bytes (data). Rows are
/// clipped to the segment; an address outside the segment throws WindowError.
std::vector<MemoryRow> memory_window(const MachineState& state, Segment segment, uint64_t addr,
                                     uint64_t len);

}  // namespace rvpipe
