#include <gtest/gtest.h>

#include "harness.hpp"
#include "rvpipe/diagram.hpp"
#include "rvpipe/examples.hpp"

using namespace rvpipe;
using namespace testing_support;

namespace {

PipelineDiagram diagram_of(const std::string& src, bool fwd) {
  return build_diagram(run_pipeline(assemble_ok(src), fwd, {}).trace);
}

std::vector<std::string> codes(const DiagramRow& r) {
  std::vector<std::string> out;
  for (size_t i = 0; i < r.cells.size(); ++i) out.push_back(cell_code(r, i, false));
  return out;
}

std::string source_of(std::string_view name) {
  for (const auto& e : builtin_examples())
    if (e.name == name) return std::string(e.source);
  throw std::runtime_error("no example");
}

}  // namespace

class DiagramLaws : public ::testing::TestWithParam<std::tuple<size_t, bool>> {};

TEST_P(DiagramLaws, HoldOnCorpusTraces) {
  const auto& [index, fwd] = GetParam();
  const CorpusProgram& p = corpus().at(index);
  const PipelineRun run = run_pipeline(assemble_ok(p.source), fwd, p.tape);
  const PipelineDiagram full = build_diagram(run.trace);
  EXPECT_EQ(full.columns, run.state.cycle());
  EXPECT_EQ(check_invariants(full), std::vector<std::string>{});

  // Column exclusivity, checked here without the library's own checker.
  for (uint64_t c = 1; c <= full.columns; ++c) {
    std::array<int, 5> used{};
    for (const auto& r : full.rows) {
      if (c < r.first_column || c > r.last_column()) continue;
      const Cell& cell = r.cells[c - r.first_column];
      if (cell.kind == CellKind::Stage || cell.kind == CellKind::Held) ++used[static_cast<size_t>(cell.stage)];
    }
    for (int u : used) ASSERT_LE(u, 1) << p.name << " column " << c;
  }
  // Row consecutiveness: stages never move backwards and never skip.
  for (const auto& r : full.rows) {
    ASSERT_FALSE(r.cells.empty());
    for (size_t i = 0; i < r.cells.size(); ++i) ASSERT_NE(r.cells[i].kind, CellKind::Empty) << p.name;
    for (size_t i = 1; i < r.cells.size(); ++i) {
      if (r.cells[i].kind == CellKind::Bubble) {
        ASSERT_EQ(i, r.cells.size() - 1);
        continue;
      }
      const int prev = static_cast<int>(r.cells[i - 1].stage);
      const int cur = static_cast<int>(r.cells[i].stage);
      if (r.cells[i].kind == CellKind::Held) ASSERT_EQ(cur, prev);
      else ASSERT_EQ(cur, prev + 1) << p.name << " row " << r.seq;
    }
  }

  const PipelineDiagram sq = squash(full);
  EXPECT_EQ(check_invariants(sq), std::vector<std::string>{});
  EXPECT_LE(sq.rows.size(), full.rows.size());
  EXPECT_EQ(expand(sq), full);
  EXPECT_EQ(parse_csv(render_csv(full)), full);
  EXPECT_EQ(parse_csv(render_csv(sq)), sq);
  EXPECT_EQ(render_csv(parse_csv(render_csv(sq))), render_csv(sq));
  EXPECT_THROW(squash(sq), DiagramError);
}

INSTANTIATE_TEST_SUITE_P(Corpus, DiagramLaws,
                         ::testing::Combine(::testing::Range<size_t>(0, corpus().size()), ::testing::Bool()),
                         [](const auto& info) {
                           return corpus()[std::get<0>(info.param)].name + (std::get<1>(info.param) ? "_fwd" : "_nofwd");
                         });

TEST(Diagram, RawPairWithoutForwardingHoldsInDecode) {
  const PipelineDiagram d = diagram_of(".text\naddi x1, x0, 1\naddi x2, x0, 2\nadd x3, x1, x2\n", false);
  ASSERT_EQ(d.rows.size(), 3u);
  EXPECT_EQ(d.columns, 9u);
  EXPECT_EQ(codes(d.rows[0]), (std::vector<std::string>{"IF", "ID", "EX", "MEM", "WB"}));
  EXPECT_EQ(d.rows[2].first_column, 3u);
  EXPECT_EQ(codes(d.rows[2]), (std::vector<std::string>{"IF", "ID", "ID*", "ID*", "EX", "MEM", "WB"}));
  EXPECT_EQ(d.rows[2].text, "add x3, x1, x2");
  EXPECT_EQ(d.rows[2].source_line, 4);
}

TEST(Diagram, FlushedRowsEndInABubble) {
  const PipelineDiagram d = diagram_of(".text\nj t\naddi x1, x0, 1\naddi x3, x0, 1\naddi x4, x0, 1\nt: nop\n", true);
  ASSERT_EQ(d.rows.size(), 5u);
  size_t flushed = 0;
  for (const auto& r : d.rows) flushed += r.flushed();
  EXPECT_EQ(flushed, 3u);
  EXPECT_EQ(codes(d.rows[1]), (std::vector<std::string>{"IF", "ID", "◦"}));
  EXPECT_EQ(cell_code(d.rows[1], 2, true), "o");
  EXPECT_EQ(codes(d.rows[3]), std::vector<std::string>{"◦"});
  EXPECT_EQ(d.rows[3].first_column, 4u);
  EXPECT_EQ(d.rows[4].first_column, 5u);
}

TEST(Diagram, LabelsCarryAddressTextAndLine) {
  const PipelineDiagram d = diagram_of(".text\naddi x1, x0, 5\n", true);
  EXPECT_EQ(row_label(d.rows.at(0)), "0x00400000: addi x1, x0, 5  # line 2");
}

TEST(Squash, CollapsesIdenticalLoopIterations) {
  const PipelineDiagram full = diagram_of(source_of("loop"), true);
  const PipelineDiagram sq = squash(full);
  ASSERT_FALSE(sq.blocks.empty());
  const SquashBlock& b = sq.blocks[0];
  EXPECT_GE(b.count, 2u);
  EXPECT_GT(b.stride, 0u);
  EXPECT_EQ(sq.rows.size(), full.rows.size() - (b.count - 1) * b.rows_per_iter);
  EXPECT_EQ(sq.columns, full.columns - (b.count - 1) * b.stride);
  EXPECT_EQ(sq.mode, DiagramMode::Squashed);
  EXPECT_EQ(expand(sq), full);
}

TEST(Squash, LeavesStraightLineCodeAlone) {
  const PipelineDiagram full = diagram_of(".text\nnop\nnop\nnop\n", true);
  const PipelineDiagram sq = squash(full);
  EXPECT_TRUE(sq.blocks.empty());
  EXPECT_EQ(sq.rows, full.rows);
  EXPECT_EQ(expand(sq), full);
}

TEST(Squash, DifferentPatternsAreNotMerged) {
  // The first iteration stalls on the load, later ones do not.
  const PipelineDiagram full = diagram_of(R"(.text
    li   t0, 4
    li   t2, 0
loop:
    addi t2, t2, 1
    addi t0, t0, -1
    bnez t0, loop
)", false);
  const PipelineDiagram sq = squash(full);
  for (const auto& b : sq.blocks) {
    const auto& first = sq.rows[b.first_row];
    EXPECT_EQ(first.addr, 0x400008u);
  }
  EXPECT_EQ(expand(sq), full);
}

TEST(Csv, HeaderAndCells) {
  const PipelineDiagram d = diagram_of(".text\naddi x1, x0, 1\n", true);
  const std::string csv = render_csv(d);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "instr,1,2,3,4,5");
  EXPECT_NE(csv.find("\"0x00400000: addi x1, x0, 1  # line 2\",IF,ID,EX,MEM,WB"), std::string::npos);
  EXPECT_EQ(csv.find("# mode"), std::string::npos);
  EXPECT_NE(render_csv(squash(d)).find("# mode squashed"), std::string::npos);
}

TEST(Csv, RejectsMalformedInput) {
  EXPECT_THROW(parse_csv(""), DiagramError);
  EXPECT_THROW(parse_csv("nonsense\n"), DiagramError);
  EXPECT_THROW(parse_csv("instr,1,2\n# mode full\n\"0x00400000: nop  # line 1\",IF,XX\n"), DiagramError);
  EXPECT_THROW(parse_csv("instr,1,2\n# mode full\n\"0x00400000: nop  # line 1\",IF,ID,EX\n"), DiagramError);
  EXPECT_THROW(parse_csv("instr,1,2\n# mode full\nbad label,IF,ID\n"), DiagramError);
}

TEST(Text, WrapsLongDiagramsIntoChunks) {
  const PipelineDiagram d = diagram_of(source_of("loop"), true);
  const std::string narrow = render_text(d, 80);
  const std::string wide = render_text(d, 100000);
  size_t max_line = 0;
  for (size_t pos = 0; pos < narrow.size();) {
    const size_t nl = narrow.find('\n', pos);
    const std::string line = narrow.substr(pos, nl - pos);
    size_t width = 0;
    for (unsigned char c : line) width += (c & 0xC0) != 0x80;
    max_line = std::max(max_line, width);
    pos = nl == std::string::npos ? narrow.size() : nl + 1;
  }
  EXPECT_LE(max_line, 80u);
  EXPECT_GT(std::count(narrow.begin(), narrow.end(), '\n'), std::count(wide.begin(), wide.end(), '\n'));
}

TEST(Text, AnnotatesSquashedBlocks) {
  const PipelineDiagram sq = squash(diagram_of(source_of("loop"), true));
  const std::string text = render_text(sq, 100000);
  EXPECT_NE(text.find("× " + std::to_string(sq.blocks.at(0).count)), std::string::npos);
}

TEST(Invariants, DetectViolations) {
  PipelineDiagram d = diagram_of(".text\nnop\nnop\n", true);
  d.rows[1].first_column = 1;
  EXPECT_FALSE(check_invariants(d).empty());
  PipelineDiagram e = diagram_of(".text\nnop\n", true);
  e.rows[0].cells[2] = Cell{CellKind::Stage, Stage::WB};
  EXPECT_FALSE(check_invariants(e).empty());
}
