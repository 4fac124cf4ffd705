#include "harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace testing_support {

namespace fs = std::filesystem;

const std::vector<CorpusProgram>& corpus() {
  static const std::vector<CorpusProgram> all = [] {
    std::vector<CorpusProgram> v;
    for (const auto& e : fs::directory_iterator(RVPIPE_CORPUS_DIR)) {
      if (e.path().extension() != ".s") continue;
      CorpusProgram p;
      p.name = e.path().stem().string();
      std::ifstream f(e.path());
      std::stringstream ss;
      ss << f.rdbuf();
      p.source = ss.str();
      fs::path in = e.path();
      in.replace_extension(".in");
      if (std::ifstream t{in}) {
        for (std::string line; std::getline(t, line);) p.tape.push_back(line);
      }
      v.push_back(std::move(p));
    }
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return v;
  }();
  return all;
}

std::shared_ptr<const rvpipe::ProgramImage> assemble_ok(const std::string& source) {
  auto r = rvpipe::assemble(source);
  if (!r.ok()) {
    std::string msg = "assembly failed:";
    for (const auto& d : r.diagnostics) msg += "\n  " + rvpipe::format_diagnostic(d);
    throw std::runtime_error(msg);
  }
  return std::make_shared<const rvpipe::ProgramImage>(std::move(*r.image));
}

PipelineRun run_pipeline(std::shared_ptr<const rvpipe::ProgramImage> image, bool forwarding,
                         const std::vector<std::string>& tape, bool keep_states) {
  PipelineRun r{rvpipe::init(std::move(image), rvpipe::SimOptions{forwarding, 10000}), {}, {}};
  r.trace.push_back(rvpipe::snapshot(r.state));
  if (keep_states) r.states.push_back(r.state);
  while (r.state.running()) {
    r.state = rvpipe::step(r.state, tape);
    if (r.state.status().state == rvpipe::RunState::AwaitingInput) break;
    r.trace.push_back(rvpipe::snapshot(r.state));
    if (keep_states) r.states.push_back(r.state);
  }
  return r;
}

std::string compare_with_reference(const rvpipe::SimState& s, const ref::Result& ref) {
  using rvpipe::HaltReason;
  using rvpipe::RunState;
  std::string diff;
  auto note = [&](std::string msg) {
    if (diff.size() < 2000) diff += msg + "\n";
  };
  const auto& st = s.status();
  bool end_ok = false;
  switch (ref.end) {
    case ref::End::Drained: end_ok = st.state == RunState::Halted && st.reason == HaltReason::Drained; break;
    case ref::End::Exit:
      end_ok = st.state == RunState::Halted && st.reason == HaltReason::Exit && st.exit_code == ref.exit_code;
      break;
    case ref::End::Ebreak: end_ok = st.state == RunState::Halted && st.reason == HaltReason::Ebreak; break;
    case ref::End::Fault: end_ok = st.state == RunState::Faulted; break;
    case ref::End::NeedInput: end_ok = st.state == RunState::AwaitingInput; break;
    case ref::End::StepLimit: end_ok = st.reason == HaltReason::CycleLimit; break;
  }
  if (!end_ok)
    note(fmt::format("end state differs: pipeline {}/{} exit {}, reference {} exit {}", rvpipe::run_state_name(st.state),
                     rvpipe::halt_reason_name(st.reason), st.exit_code, static_cast<int>(ref.end), ref.exit_code));
  for (unsigned i = 0; i < 32; ++i)
    if (s.machine.read_reg(i) != ref.regs[i])
      note(fmt::format("x{}: pipeline 0x{:x}, reference 0x{:x}", i, s.machine.read_reg(i), ref.regs[i]));
  if (s.machine.pc != ref.pc) note(fmt::format("pc: pipeline 0x{:x}, reference 0x{:x}", s.machine.pc, ref.pc));
  if (s.stats.retired != ref.retired) note(fmt::format("retired: pipeline {}, reference {}", s.stats.retired, ref.retired));
  if (s.machine.heap_break() != ref.heap_break) note("heap break differs");
  const auto mem = s.machine.memory().nonzero_bytes();
  if (mem != ref.memory) {
    for (const auto& [a, b] : mem) {
      auto it = ref.memory.find(a);
      if (it == ref.memory.end() || it->second != b) {
        note(fmt::format("memory 0x{:x}: pipeline 0x{:02x}, reference 0x{:02x}", a, b,
                         it == ref.memory.end() ? 0 : it->second));
      }
    }
    for (const auto& [a, b] : ref.memory)
      if (!mem.count(a)) note(fmt::format("memory 0x{:x}: pipeline 0x00, reference 0x{:02x}", a, b));
  }
  std::vector<ref::Event> events;
  for (const auto& e : s.console.transcript.events()) events.push_back({e.direction == rvpipe::Direction::Out, e.text});
  if (events != ref.transcript) note("console transcript differs");
  return diff;
}

bool straight_line(const rvpipe::ProgramImage& image) {
  return std::none_of(image.text.begin(), image.text.end(),
                      [](const rvpipe::TextWord& w) { return rvpipe::is_control_transfer(w.instr.op); });
}

}  // namespace testing_support
