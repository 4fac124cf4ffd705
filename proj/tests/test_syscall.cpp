#include <gtest/gtest.h>

#include "rvpipe/syscall.hpp"

using namespace rvpipe;

namespace {

struct Rig {
  SegmentLayout layout;
  MachineState m{layout, layout.text_base + 16};
  Console console;
  InputTape tape;

  Rig() { m.set_heap_break(layout.heap_base); }

  SyscallEffect call(uint64_t code, uint64_t a0 = 0, uint64_t a1 = 0) {
    m.write_reg(17, code);
    m.write_reg(10, a0);
    m.write_reg(11, a1);
    return dispatch(m, console, make_request(m), tape, 7);
  }
};

}  // namespace

TEST(Syscall, KindsAndNames) {
  EXPECT_EQ(syscall_kind(1), SyscallKind::PrintInt);
  EXPECT_EQ(syscall_kind(17), SyscallKind::Exit2);
  EXPECT_FALSE(syscall_kind(2).has_value());
  EXPECT_EQ(syscall_name(SyscallKind::ReadString), "read_string");
  EXPECT_TRUE(is_read_kind(SyscallKind::ReadChar));
  EXPECT_FALSE(is_read_kind(SyscallKind::Sbrk));
}

TEST(Syscall, PrintsIntegersCharsAndStrings) {
  Rig r;
  r.call(1, static_cast<uint64_t>(-42));
  r.call(11, 'Z');
  const uint64_t s = r.layout.static_base;
  ASSERT_FALSE(r.m.store(s, 1, 'h'));
  ASSERT_FALSE(r.m.store(s + 1, 1, 'i'));
  EXPECT_EQ(r.call(4, s).kind, SyscallEffect::Kind::Continue);
  EXPECT_EQ(r.console.transcript.output_text(), "-42Zhi");
  const auto ev = r.console.transcript.events();
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_EQ(ev[0].cycle, 7u);
  EXPECT_EQ(ev[0].direction, Direction::Out);
}

TEST(Syscall, PrintStringFaultsOnBadPointer) {
  Rig r;
  const auto e = r.call(4, 0x10);
  EXPECT_EQ(e.kind, SyscallEffect::Kind::Fault);
  ASSERT_TRUE(e.mem_fault);
  EXPECT_EQ(e.mem_fault->kind, FaultKind::OutOfSegment);
}

TEST(Syscall, ReadsConsumeTheTapeInOrder) {
  Rig r;
  r.tape = {"  -17 ", "", "abc", "hello world"};
  EXPECT_EQ(r.call(5).kind, SyscallEffect::Kind::Continue);
  EXPECT_EQ(r.m.read_reg(10), static_cast<uint64_t>(-17));
  r.call(12);
  EXPECT_EQ(r.m.read_reg(10), uint64_t{'\n'});
  r.call(12);
  EXPECT_EQ(r.m.read_reg(10), uint64_t{'a'});
  const uint64_t buf = r.layout.static_base;
  r.call(8, buf, 6);
  EXPECT_EQ(r.m.load(buf, 8, false).value, 0x006f6c6c6568ull);  // "hello\0"
  EXPECT_EQ(r.console.tape_pos, 4u);
  const auto ev = r.console.transcript.events();
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_EQ(ev[3].direction, Direction::In);
  EXPECT_EQ(ev[3].text, "hello world");
}

TEST(Syscall, ReadWithEmptyTapeNeedsInputAndChangesNothing) {
  Rig r;
  const Console cbefore = r.console;
  const auto e = r.call(5, 123);
  EXPECT_EQ(e.kind, SyscallEffect::Kind::NeedInput);
  EXPECT_EQ(r.console, cbefore);
  EXPECT_EQ(r.m.read_reg(10), 123u);
}

TEST(Syscall, ReadStringWithZeroCapacityStoresNothing) {
  Rig r;
  r.tape = {"xyz"};
  r.call(8, r.layout.static_base, 0);
  EXPECT_EQ(r.m.load(r.layout.static_base, 8, false).value, 0u);
  EXPECT_EQ(r.console.tape_pos, 1u);
}

TEST(Syscall, SbrkGrowsTheHeapInDoublewords) {
  Rig r;
  r.call(9, 5);
  EXPECT_EQ(r.m.read_reg(10), r.layout.heap_base);
  EXPECT_EQ(r.m.heap_break(), r.layout.heap_base + 8);
  r.call(9, 16);
  EXPECT_EQ(r.m.read_reg(10), r.layout.heap_base + 8);
  EXPECT_EQ(r.m.heap_break(), r.layout.heap_base + 24);
  EXPECT_EQ(r.call(9, static_cast<uint64_t>(-8)).kind, SyscallEffect::Kind::Fault);
  EXPECT_EQ(r.call(9, 1ull << 40).kind, SyscallEffect::Kind::Fault);
}

TEST(Syscall, ExitCodes) {
  Rig r;
  auto e = r.call(10, 5);
  EXPECT_EQ(e.kind, SyscallEffect::Kind::Halt);
  EXPECT_EQ(e.exit_code, 0);
  e = r.call(17, static_cast<uint64_t>(-3));
  EXPECT_EQ(e.kind, SyscallEffect::Kind::Halt);
  EXPECT_EQ(e.exit_code, -3);
}

TEST(Syscall, UnknownCodeFaults) {
  Rig r;
  const auto e = r.call(99);
  EXPECT_EQ(e.kind, SyscallEffect::Kind::Fault);
  EXPECT_NE(e.fault_message.find("99"), std::string::npos);
}

TEST(Syscall, ValidatesConsoleInput) {
  EXPECT_TRUE(validate_input(SyscallKind::ReadInt, "12\n").ok);
  EXPECT_EQ(validate_input(SyscallKind::ReadInt, "12\n").normalized, "12");
  EXPECT_FALSE(validate_input(SyscallKind::ReadInt, "twelve").ok);
  EXPECT_FALSE(validate_input(SyscallKind::ReadInt, "99999999999999999999").ok);
  EXPECT_FALSE(validate_input(SyscallKind::ReadInt, "").ok);
  EXPECT_EQ(validate_input(SyscallKind::ReadChar, "").normalized, "\n");
  EXPECT_EQ(validate_input(SyscallKind::ReadString, "a b\r\n").normalized, "a b");
  EXPECT_FALSE(validate_input(SyscallKind::PrintInt, "1").ok);
}

TEST(Transcript, CopiesShareHistory) {
  Transcript a;
  a.push({Direction::Out, "x", 1});
  Transcript b = a;
  b.push({Direction::Out, "y", 2});
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(b.size(), 2u);
  EXPECT_FALSE(a == b);
  Transcript c;
  c.push({Direction::Out, "x", 1});
  EXPECT_TRUE(a == c);
  EXPECT_EQ(b.output_text(), "xy");
}
