#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rvpipe/isa.hpp"
#include "rvpipe/machine.hpp"

namespace rvpipe {

struct TextWord {
  uint64_t addr = 0;
  uint32_t raw = 0;
  Instruction instr;
  int source_line = 0;
};

struct ProgramImage {
  SegmentLayout layout;
  std::vector<TextWord> text;
  std::map<uint64_t, uint8_t> static_data;
  std::map<std::string, uint64_t, std::less<>> symbols;
  uint64_t entry = 0;
  std::string source;

  uint64_t text_end() const { return layout.text_base + 4 * text.size(); }
  /// Word at `addr`, or null when outside the text segment or misaligned.
  const TextWord* fetch(uint64_t addr) const;
};

enum class Severity : uint8_t { Error, Warning };

struct AsmDiagnostic {
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  Severity severity = Severity::Error;
  std::string message;
  std::string snippet;
};

struct AssemblyResult {
  std::optional<ProgramImage> image;
  std::vector<AsmDiagnostic> diagnostics;

  bool ok() const { return image.has_value(); }
};

/// One source statement after lexing: mnemonic plus raw operand strings.
struct Operand {
  std::string text;
  int column = 1;
};

struct Statement {
  int line = 1;
  int column = 1;
  std::string mnemonic;
  std::vector<Operand> operands;
};

/// Thrown by statement-level helpers; the assembler turns it into a diagnostic.
class AsmError : public std::runtime_error {
 public:
  AsmError(int column, const std::string& message) : std::runtime_error(message), column(column) {}
  int column;
};

/// Two passes: layout and symbols, then encoding. Every problem found is
/// reported; no image is produced if any error was found.
AssemblyResult assemble(std::string_view source, const SegmentLayout& layout = {});

bool is_pseudo(std::string_view mnemonic);

/// Rewrites a pseudo-instruction into base statements. Non-pseudo statements
/// come back unchanged as a single element.
std::vector<Statement> expand_pseudo(const Statement& stmt);

/// Shortest lui/addi(w)/slli ladder materialising `value` (operations applied to
/// the destination register in order; the first one reads x0).
std::vector<std::pair<Op, int64_t>> li_sequence(int64_t value);

struct ListingLine {
  uint64_t addr = 0;
  uint32_t raw = 0;
  std::string text;
  int source_line = 0;
};

std::vector<ListingLine> disassemble(const ProgramImage& image);

/// "0x00400000  0x00500093  addi x1, x0, 5  # line 1"
std::string format_listing_line(const ListingLine& line);
std::string render_listing(const ProgramImage& image);

std::string format_diagnostic(const AsmDiagnostic& d);

}  // namespace rvpipe
